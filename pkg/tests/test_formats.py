import pytest

from conftest import EQUATION, EXTENTS
from einpath import (
    CostReport,
    EinsumSyntaxError,
    NetworkValidationError,
    MalformedPathError,
    SearchConfig,
    SsaPath,
    TraceError,
    document_to_network,
    document_to_path,
    dumps_network,
    dumps_path,
    export_dot,
    loads_network,
    loads_path,
    naive,
    network_to_document,
    parse_einsum,
    path_to_document,
)
from einpath.search import exhaustive_dfs


def _doc():
    return {
        "tensors": [
            {"id": 0, "indices": ["a", "b"]},
            {"id": 1, "indices": ["b"]},
        ],
        "extents": {"a": 2, "b": 3},
        "output": ["a"],
    }


def test_network_round_trip(closed6):
    assert document_to_network(network_to_document(closed6)) == closed6
    assert loads_network(dumps_network(closed6)) == closed6


def test_dumps_network_canonical():
    net = parse_einsum("ab,b->a", {"b": 3, "a": 2})
    expected = (
        '{\n'
        '  "tensors": [\n'
        '    {\n'
        '      "id": 0,\n'
        '      "indices": [\n'
        '        "a",\n'
        '        "b"\n'
        '      ]\n'
        '    },\n'
        '    {\n'
        '      "id": 1,\n'
        '      "indices": [\n'
        '        "b"\n'
        '      ]\n'
        '    }\n'
        '  ],\n'
        '  "extents": {\n'
        '    "a": 2,\n'
        '    "b": 3\n'
        '  },\n'
        '  "output": [\n'
        '    "a"\n'
        '  ]\n'
        '}\n'
    )
    assert dumps_network(net) == expected


@pytest.mark.parametrize("mutate, location", [
    (lambda d: d.pop("tensors"), "$"),
    (lambda d: d.update(tensors={}), "$.tensors"),
    (lambda d: d.update(extra=1), "extra"),
    (lambda d: d["tensors"].__setitem__(0, 7), "tensors[0]"),
    (lambda d: d["tensors"][1].update(id="1"), "tensors[1].id"),
    (lambda d: d["tensors"][0]["indices"].__setitem__(1, ""), "tensors[0].indices[1]"),
    (lambda d: d["tensors"][1].update(shape=[3]), "tensors[1].shape"),
    (lambda d: d["tensors"][0].update(indices=["a", "a"]), "tensors[0].indices"),
    (lambda d: d["extents"].update(b=True), "extents.b"),
    (lambda d: d["output"].__setitem__(0, 9), "output[0]"),
])
def test_network_validation_locations(mutate, location):
    doc = _doc()
    mutate(doc)
    with pytest.raises(NetworkValidationError) as info:
        document_to_network(doc)
    assert info.value.location == location


def test_loads_network_bad_json():
    with pytest.raises(NetworkValidationError, match="line 2 column"):
        loads_network('{\n  "tensors": [}\n}')


def test_path_round_trip():
    path = SsaPath(((0, 1), (2, 3)))
    report = CostReport(10**40, 3, 10**38 + 1)
    text = dumps_path(path, report, "greedy", 7)
    back_path, back_report, optimizer, seed = loads_path(text)
    assert back_path == path
    assert back_report == report
    assert (optimizer, seed) == ("greedy", 7)
    # huge counts ride along as decimal strings, never floats
    assert f'"{10 ** 40}"' in text


@pytest.mark.parametrize("mutate, message", [
    (lambda d: d.pop("ssa_path"), "ssa_path"),
    (lambda d: d["ssa_path"].append([4]), "ssa_path\\[2\\] is not a pair"),
    (lambda d: d["ssa_path"].__setitem__(0, [0, True]), "ssa_path\\[0\\] is not a pair"),
    (lambda d: d.pop("cost"), "cost must be an object"),
    (lambda d: d["cost"].update(flops=104), "cost.flops must be a decimal string"),
    (lambda d: d["cost"].update(peak_size="-3"), "cost.peak_size must be a decimal string"),
    (lambda d: d.pop("optimizer"), "optimizer must be a string"),
    (lambda d: d.update(seed=True), "seed must be an integer"),
])
def test_path_validation(mutate, message):
    doc = path_to_document(SsaPath(((0, 1), (2, 3))), CostReport(104, 16, 41), "greedy", 0)
    mutate(doc)
    with pytest.raises(MalformedPathError, match=message):
        document_to_path(doc)


def test_loads_path_bad_json():
    with pytest.raises(MalformedPathError, match="line 1 column"):
        loads_path("[1,")


def test_parse_einsum_worked_example(closed6):
    assert parse_einsum(EQUATION, EXTENTS) == closed6
    spaced = " im , ijp,jkn, klp ,mno,lo -> "
    assert parse_einsum(spaced, EXTENTS) == closed6


def test_parse_einsum_extents_filtered():
    net = parse_einsum("ij,jk->ik", {"i": 2, "j": 3, "k": 4, "z": 9})
    assert "z" not in net.extents


def test_parse_einsum_errors():
    with pytest.raises(EinsumSyntaxError, match="explicit '->'"):
        parse_einsum("ij,jk", {"i": 2, "j": 2, "k": 2})
    with pytest.raises(EinsumSyntaxError, match="more than one"):
        parse_einsum("ij->j->j", {"i": 2, "j": 2})
    with pytest.raises(EinsumSyntaxError, match="no operands"):
        parse_einsum("->", {})
    with pytest.raises(EinsumSyntaxError, match="never appears"):
        parse_einsum("ij,jk->iz", {"i": 2, "j": 2, "k": 2, "z": 2})
    with pytest.raises(EinsumSyntaxError, match="repeats"):
        parse_einsum("ij,jk->ii", {"i": 2, "j": 2, "k": 2})
    with pytest.raises(EinsumSyntaxError, match="letters"):
        parse_einsum("i1,1k->ik", {"i": 2, "1": 2, "k": 2})
    with pytest.raises(TraceError):
        parse_einsum("ii->", {"i": 2})
    with pytest.raises(NetworkValidationError, match="missing extent for index 'k'"):
        parse_einsum("ij,jk->ik", {"i": 2, "j": 3})


def test_export_dot_frozen():
    net = parse_einsum("ij,jk->ik", {"i": 2, "j": 3, "k": 4})
    tree, _, _ = exhaustive_dfs(net, SearchConfig())
    expected = (
        "digraph contraction {\n"
        "  t0 [shape=point];\n"
        "  t1 [shape=point];\n"
        '  n2 [label="24", weight="1.380211"];\n'
        "  out [shape=point];\n"
        '  t0 -> n2 [label="6", weight="0.778151"];\n'
        '  t1 -> n2 [label="12", weight="1.079181"];\n'
        '  n2 -> out [label="8", weight="0.903090"];\n'
        "}\n"
    )
    assert export_dot(tree, net) == expected
    assert export_dot(tree, net) == export_dot(tree, net)


def test_export_dot_nary(closed6):
    # the single-node tree still renders: one contraction, six incoming edges
    text = export_dot(naive(closed6), closed6)
    assert text.count("-> n6") == 6
    assert "n6 -> out" in text


def test_export_dot_worked_tree(closed6):
    tree, _, _ = exhaustive_dfs(closed6, SearchConfig())
    text = export_dot(tree, closed6)
    assert text.startswith("digraph contraction {\n")
    assert text.count("shape=point") == 7  # six leaves and the out anchor
    assert text.count("label=") == 5 + 11  # five branches, eleven edges
