"""Reading and writing networks, paths, einsum strings and DOT trees."""

import json
import math

from .core import CostReport, SsaPath, TensorNetwork, TensorSig, tensor_size, _fold_entries
from .errors import EinsumSyntaxError, NetworkValidationError, MalformedPathError, TraceError

__all__ = [
    "network_to_document",
    "document_to_network",
    "dumps_network",
    "loads_network",
    "path_to_document",
    "document_to_path",
    "dumps_path",
    "loads_path",
    "parse_einsum",
    "export_dot",
]


def _need(doc, key, kind, location, kindname):
    if key not in doc:
        raise NetworkValidationError(location, f"missing key '{key}'")
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, kind):
        raise NetworkValidationError(f"{location}.{key}", f"expected {kindname}")
    return value


def network_to_document(network):
    return {
        "tensors": [
            {"id": sig.id, "indices": list(sig.indices)} for sig in network.tensors
        ],
        "extents": {ix: network.extents[ix] for ix in sorted(network.extents)},
        "output": list(network.output),
    }


def document_to_network(doc):
    """Build a network from its JSON document, pointing at whatever is wrong."""
    if not isinstance(doc, dict):
        raise NetworkValidationError("$", "document must be an object")
    for key in doc:
        if key not in ("tensors", "extents", "output"):
            raise NetworkValidationError(key, "unexpected key")
    tensors_raw = _need(doc, "tensors", list, "$", "an array")
    extents_raw = _need(doc, "extents", dict, "$", "an object")
    output_raw = _need(doc, "output", list, "$", "an array")

    sigs = []
    for pos, entry in enumerate(tensors_raw):
        where = f"tensors[{pos}]"
        if not isinstance(entry, dict):
            raise NetworkValidationError(where, "expected an object")
        tid = _need(entry, "id", int, where, "an integer")
        indices = _need(entry, "indices", list, where, "an array")
        for j, ix in enumerate(indices):
            if not isinstance(ix, str) or not ix:
                raise NetworkValidationError(
                    f"{where}.indices[{j}]", "index names are non-empty strings"
                )
        for key in entry:
            if key not in ("id", "indices"):
                raise NetworkValidationError(f"{where}.{key}", "unexpected key")
        try:
            sigs.append(TensorSig(tid, tuple(indices)))
        except TraceError as exc:
            raise NetworkValidationError(f"{where}.indices", str(exc)) from exc

    extents = {}
    for name, extent in extents_raw.items():
        if isinstance(extent, bool) or not isinstance(extent, int):
            raise NetworkValidationError(f"extents.{name}", "extents are integers")
        extents[name] = extent

    for j, name in enumerate(output_raw):
        if not isinstance(name, str) or not name:
            raise NetworkValidationError(
                f"output[{j}]", "output entries are index names"
            )

    return TensorNetwork(tuple(sigs), extents, tuple(output_raw))


def dumps_network(network):
    """Canonical text: stable key order, extents sorted by name."""
    return json.dumps(network_to_document(network), indent=2) + "\n"


def loads_network(text):
    return document_to_network(_loads(text))


def _loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkValidationError(
            f"line {exc.lineno} column {exc.colno}", exc.msg
        ) from exc


def path_to_document(path, report, optimizer, seed):
    return {
        "ssa_path": [[a, b] for a, b in path],
        "cost": {
            "flops": str(report.flops),
            "peak_size": str(report.peak_size),
            "write_volume": str(report.write_volume),
        },
        "optimizer": optimizer,
        "seed": seed,
    }


def document_to_path(doc):
    """Returns (SsaPath, CostReport, optimizer, seed); costs come back as ints."""
    if not isinstance(doc, dict):
        raise MalformedPathError("path document must be an object")
    raw = doc.get("ssa_path")
    if not isinstance(raw, list):
        raise MalformedPathError("ssa_path must be an array of pairs")
    pairs = []
    for pos, item in enumerate(raw):
        ok = (
            isinstance(item, list)
            and len(item) == 2
            and all(isinstance(x, int) and not isinstance(x, bool) for x in item)
        )
        if not ok:
            raise MalformedPathError(f"ssa_path[{pos}] is not a pair of integers")
        pairs.append((item[0], item[1]))
    costs = doc.get("cost")
    if not isinstance(costs, dict):
        raise MalformedPathError("cost must be an object")
    values = {}
    for key in ("flops", "peak_size", "write_volume"):
        text = costs.get(key)
        # decimal strings keep arbitrarily large counts exact in JSON
        if not isinstance(text, str) or not text.isdigit():
            raise MalformedPathError(f"cost.{key} must be a decimal string")
        values[key] = int(text)
    optimizer = doc.get("optimizer")
    if not isinstance(optimizer, str):
        raise MalformedPathError("optimizer must be a string")
    seed = doc.get("seed")
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise MalformedPathError("seed must be an integer")
    return SsaPath(tuple(pairs)), CostReport(**values), optimizer, seed


def dumps_path(path, report, optimizer, seed):
    return json.dumps(path_to_document(path, report, optimizer, seed), indent=2) + "\n"


def loads_path(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedPathError(
            f"line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return document_to_path(doc)


def parse_einsum(equation, extents):
    """Network from an einsum equation with single-character index names.

    The '->' part is mandatory so the output never has to be inferred.
    Repeated names inside one operand (traces) are not representable and
    raise TraceError.
    """
    text = "".join(equation.split())
    if "->" not in text:
        raise EinsumSyntaxError("equation needs an explicit '->'")
    lhs, _, rhs = text.partition("->")
    if "->" in rhs:
        raise EinsumSyntaxError("more than one '->'")
    if not lhs:
        raise EinsumSyntaxError("no operands before '->'")
    names = set()
    for part in lhs.split(","):
        names.update(part)
    for ch in sorted(names | set(rhs)):
        if not ch.isalpha():
            raise EinsumSyntaxError(f"index names are letters, got {ch!r}")
    seen_out = set()
    for ch in rhs:
        if ch not in names:
            raise EinsumSyntaxError(f"output index '{ch}' never appears on the left")
        if ch in seen_out:
            raise EinsumSyntaxError(f"output index '{ch}' repeats")
        seen_out.add(ch)
    sigs = tuple(
        TensorSig(i, tuple(part)) for i, part in enumerate(lhs.split(","))
    )
    known = {ix: extents[ix] for ix in sorted(names) if ix in extents}
    return TensorNetwork(sigs, known, tuple(rhs))


def export_dot(tree, network):
    """Graphviz text for a contraction tree.

    Every branch becomes a node labeled with its flop count; every tensor
    (leaf or intermediate) becomes an edge labeled with its size, pointing
    at the contraction that consumes it (the root feeds a terminal anchor).
    Leaves and the anchor render as points. `weight` attributes carry log10
    of the label so plotting tools can scale without reparsing.
    """
    extents = network.extents
    n = len(network.tensors)
    declared = []
    edges = []
    counter = n
    # post-order walk mirroring SSA numbering
    stack = [(tree, 0)]
    results = []
    while stack:
        node, state = stack.pop()
        if node.is_leaf:
            results.append((f"t{node.leaf_id}", tensor_size(node.head, extents)))
            continue
        if state < len(node.args):
            stack.append((node, state + 1))
            stack.append((node.args[state], 0))
            continue
        children = results[len(results) - len(node.args):]
        del results[len(results) - len(node.args):]
        name = f"n{counter}"
        counter += 1
        flops = sum(f for f, _ in _fold_entries(node, extents))
        declared.append((name, flops))
        for child_name, child_size in children:
            edges.append((child_name, name, child_size))
        results.append((name, tensor_size(node.head, extents)))
    root_name, root_size = results[0]
    lines = ["digraph contraction {"]
    for i in range(n):
        lines.append(f'  t{i} [shape=point];')
    for name, flops in declared:
        lines.append(
            f'  {name} [label="{flops}", weight="{math.log10(flops):.6f}"];'
        )
    lines.append("  out [shape=point];")
    for tail, head, size in edges:
        lines.append(
            f'  {tail} -> {head} [label="{size}", weight="{math.log10(size):.6f}"];'
        )
    lines.append(
        f'  {root_name} -> out [label="{root_size}", weight="{math.log10(root_size):.6f}"];'
    )
    lines.append("}")
    return "\n".join(lines) + "\n"
