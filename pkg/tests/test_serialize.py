import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from germoid import serialize as io
from germoid.coarse import generate_coarse_structure, pair_index
from germoid.corpus import basic_groupoids, full_representations, semigroups, spaces, wagner_preston_representations
from germoid.fintop import all_topologies, sierpinski
from germoid.germs import germ_groupoid
from germoid.invsemi import symmetric_inverse_monoid
from germoid.report import ParseError


def _same_rep(a, b):
    return a.semigroup == b.semigroup and a.space == b.space and a.assign == b.assign


def _roundtrip(obj):
    text = io.dump_object(obj)
    kind, back, report = io.loads(text)
    assert report.valid, report.to_dict()
    assert io.dump_object(back) == text
    return kind, back


@pytest.mark.parametrize("name", sorted(spaces(3)))
def test_space_roundtrip(name):
    X = spaces(3)[name]
    kind, back = _roundtrip(X)
    assert kind == "space" and back == X


@pytest.mark.parametrize("name", sorted(semigroups()))
def test_semigroup_roundtrip(name):
    S = semigroups()[name]
    kind, back = _roundtrip(S)
    assert back == S and back.labels == S.labels


def test_pseudogroup_roundtrip():
    for X in all_topologies(2):
        P = symmetric_inverse_monoid(X)
        kind, back = _roundtrip(P)
        assert kind == "pseudogroup" and back.elements == P.elements and back.space == X


def test_representation_roundtrip():
    reps = list(wagner_preston_representations(5).values()) + list(full_representations().values())
    for rep in reps:
        kind, back = _roundtrip(rep)
        assert kind == "representation" and _same_rep(back, rep)


@pytest.mark.parametrize("name", sorted(basic_groupoids()))
def test_groupoid_roundtrip(name):
    G = basic_groupoids()[name]
    kind, back = _roundtrip(G)
    assert back == G


def test_groupoid_labels_survive():
    g = germ_groupoid(full_representations()["I(top2-3)"])
    text = io.dumps(io.document(io.groupoid_body(g.groupoid, io.germ_labels(g))))
    _, back, _ = io.loads(text)
    assert back.labels == tuple(io.germ_labels(g))
    assert io.dumps(io.document(io.groupoid_body(back))) == text


def test_coarse_roundtrip():
    for n in (1, 2, 3):
        E = generate_coarse_structure(n)
        kind, back = _roundtrip(E)
        assert back == E


def test_coarse_controlled_form():
    doc = {"v": 1, "kind": "coarse", "points": 1, "controlled": [[[0, 0]]]}
    kind, E, report = io.load_document(doc)
    assert report.valid and E.unital
    doc = {"v": 1, "kind": "coarse", "points": 2, "controlled": [[[0, 1]]]}
    _, _, report = io.load_document(doc)
    assert "singletons" in report.axioms()


def test_space_opens_form_accepted():
    doc = {"v": 1, "kind": "space", "points": 2, "opens": [[], [0], [0, 1]]}
    _, X, report = io.load_document(doc)
    assert report.valid and X == sierpinski()
    doc["opens"] = [[], [0]]
    _, _, report = io.load_document(doc)
    assert "full-set" in report.axioms()


def test_canonical_text_is_sorted_and_compact():
    text = io.dump_object(sierpinski())
    assert text == '{\n  "kind": "space",\n  "nbhd": [\n    [0],\n    [0, 1]\n  ],\n  "points": 2,\n  "v": 1\n}\n'
    json.loads(text)


@pytest.mark.parametrize(
    "text",
    [
        "{",
        "[]",
        '{"v": 2, "kind": "space", "points": 1, "nbhd": [[0]]}',
        '{"v": 1, "kind": "blob"}',
        '{"v": 1, "kind": "space", "points": 1}',
        '{"v": 1, "kind": "space", "points": 1, "nbhd": [[1]]}',
        '{"v": 1, "kind": "space", "points": 2, "nbhd": [[1, 0], [1]]}',
        '{"v": 1, "kind": "space", "points": true, "nbhd": []}',
        '{"v": 1, "kind": "semigroup", "size": 2, "mul": [[0, 1], [1]]}',
        '{"v": 1, "kind": "semigroup", "size": 1, "mul": [[3]]}',
        '{"v": 1, "kind": "groupoid", "objects": {"kind": "space", "points": 1, "nbhd": [[0]]},'
        ' "arrows": {"kind": "space", "points": 1, "nbhd": [[0]]}, "d": [0], "r": [0], "u": [0], "i": [0],'
        ' "mul": [[0, 0]]}',
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        io.loads(text)


def test_invalid_structure_reported_not_raised():
    # left-zero band: parses, fails its axioms
    _, S, report = io.loads('{"v": 1, "kind": "semigroup", "size": 2, "mul": [[0, 0], [1, 1]], "inv": [0, 1]}')
    assert not report.valid and "idempotents-commute" in report.axioms()


def test_write_atomic(tmp_path):
    p = tmp_path / "x.json"
    io.write_atomic(str(p), "abc\n")
    io.write_atomic(str(p), "def\n")
    assert p.read_text() == "def\n"
    assert [f.name for f in tmp_path.iterdir()] == ["x.json"]


@st.composite
def coarse_inputs(draw):
    n = draw(st.integers(1, 3))
    gens = draw(st.lists(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), min_size=1), max_size=3))
    return n, [sorted(g) for g in gens]


@settings(max_examples=50, deadline=None)
@given(coarse_inputs())
def test_coarse_documents_roundtrip(args):
    n, gens = args
    doc = {"v": 1, "kind": "coarse", "points": n, "generators": [[list(p) for p in g] for g in gens]}
    _, E, report = io.load_document(doc)
    assert report.valid
    expected = generate_coarse_structure(n, [sum(1 << pair_index(n, x, y) for x, y in g) for g in gens])
    assert E == expected
    _roundtrip(E)
