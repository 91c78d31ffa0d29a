"""Seeded random tensor networks for tests and benchmarks."""

from dataclasses import dataclass
from random import Random

from ._util import derive_seed
from .core import TensorNetwork, TensorSig
from .errors import EinPathError, GenerationError

__all__ = ["GenConfig", "generate"]

_MAX_ATTEMPTS = 1000


@dataclass(frozen=True)
class GenConfig:
    n_tensors: int
    regularity: float = 3.0
    n_open: int = 0
    extent_min: int = 2
    extent_max: int = 2
    seed: int = 0
    max_indices: int | None = None

    def __post_init__(self):
        if self.n_tensors < 1:
            raise EinPathError("n_tensors must be >= 1")
        if self.regularity < 0:
            raise EinPathError("regularity must be >= 0")
        if self.n_open < 0:
            raise EinPathError("n_open must be >= 0")
        if not 1 <= self.extent_min <= self.extent_max:
            raise EinPathError("need 1 <= extent_min <= extent_max")
        if self.max_indices is not None and self.max_indices < 0:
            raise EinPathError("max_indices must be >= 0")


def _distinct_pair(rng, n, first=None):
    a = rng.randrange(n) if first is None else first
    b = rng.randrange(n - 1)
    if b >= a:
        b += 1
    return a, b


def _build(config, attempt):
    rng = Random(derive_seed(config.seed, attempt))
    n = config.n_tensors
    base = round(n * config.regularity / 2)
    if base > 0 and n < 2:
        raise GenerationError("contracting indices need at least two tensors")
    indices = [[] for _ in range(n)]
    extents = {}
    k = 0
    for _ in range(base):
        a, b = _distinct_pair(rng, n)
        name = f"c{k}"
        k += 1
        indices[a].append(name)
        indices[b].append(name)
        extents[name] = rng.randint(config.extent_min, config.extent_max)
    output = []
    for j in range(config.n_open):
        t = rng.randrange(n)
        name = f"o{j}"
        indices[t].append(name)
        extents[name] = rng.randint(config.extent_min, config.extent_max)
        output.append(name)
    # a tensor the pairing never touched still needs a leg somewhere
    for t in range(n):
        if not indices[t] and n >= 2:
            _, other = _distinct_pair(rng, n, first=t)
            name = f"c{k}"
            k += 1
            indices[t].append(name)
            indices[other].append(name)
            extents[name] = rng.randint(config.extent_min, config.extent_max)
    tensors = tuple(TensorSig(i, tuple(ixs)) for i, ixs in enumerate(indices))
    return TensorNetwork(tensors, extents, tuple(output)), k


def generate(config):
    """Random network: round(n * regularity / 2) contracting indices, each
    shared by a uniform pair of distinct tensors, plus n_open output legs on
    random tensors. Extents are uniform in [extent_min, extent_max]. Fully
    deterministic in the seed; when max_indices is set, fresh attempts (with
    a seed derived from the attempt number) run until the contracting-index
    count fits, or GenerationError after 1000 tries."""
    base = round(config.n_tensors * config.regularity / 2)
    if config.max_indices is not None and base > config.max_indices:
        raise GenerationError(
            f"regularity {config.regularity} needs {base} contracting indices, "
            f"above the cap of {config.max_indices}"
        )
    for attempt in range(_MAX_ATTEMPTS):
        network, n_contracting = _build(config, attempt)
        if config.max_indices is None or n_contracting <= config.max_indices:
            return network
    raise GenerationError(
        f"no network with at most {config.max_indices} contracting indices "
        f"after {_MAX_ATTEMPTS} attempts"
    )
