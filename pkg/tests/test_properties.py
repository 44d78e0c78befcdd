"""Randomised invariants over generated structures."""

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from germoid import serialize as io
from germoid.corpus import basic_groupoids, semigroups
from germoid.fintop import all_topologies
from germoid.germs import equiv_unital_mx, equiv_wide_unital, germ_groupoid, roundtrip_groupoid, roundtrip_semigroup
from germoid.groupoid import disjoint_union, is_etale, verify_groupoid
from germoid.invsemi import (
    abstract_from_pseudogroup,
    all_partial_homeomorphisms,
    compose,
    direct_product,
    generate_pseudogroup,
    invert,
    is_complete,
    is_infinitely_distributive,
    verify_inverse_semigroup,
    wagner_preston,
)
from germoid.representation import (
    check_mx_quotient,
    classify,
    extend_to_unit,
    identity_representation,
    mx_quotient,
    verify_representation,
)

SMALL = sorted(name for name, S in semigroups().items() if S.size <= 3)
SPACES = all_topologies(1) + all_topologies(2) + all_topologies(3)
GROUPOIDS = sorted(name for name, G in basic_groupoids().items() if G.object_count <= 2)


@st.composite
def space_and_maps(draw, k=3):
    X = draw(st.sampled_from(SPACES))
    hs = all_partial_homeomorphisms(X)
    return X, [draw(st.sampled_from(hs)) for _ in range(k)]


@settings(max_examples=150, deadline=None)
@given(space_and_maps())
def test_partial_homeomorphism_laws(args):
    X, (h, k, l) = args
    assert compose(compose(h, k), l) == compose(h, compose(k, l))
    assert invert(compose(h, k)) == compose(invert(k), invert(h))
    assert compose(compose(h, invert(h)), h) == h


@settings(max_examples=40, deadline=None)
@given(space_and_maps(k=2))
def test_generated_pseudogroups(args):
    X, gens = args
    P = generate_pseudogroup(X, gens)
    S, els = abstract_from_pseudogroup(P)
    assert verify_inverse_semigroup(S).valid
    rep = identity_representation(S, els, X)
    assert verify_representation(rep).valid
    c = classify(rep)
    assert c.is_wide or not (c.is_full or c.is_unital)
    if not c.is_wide:
        return
    g = germ_groupoid(rep)
    assert verify_groupoid(g.groupoid).valid and is_etale(g.groupoid).etale
    assert equiv_wide_unital(rep).valid
    if c.is_unital:
        assert check_mx_quotient(mx_quotient(rep)).valid
        assert equiv_unital_mx(rep).valid
    if c.is_full and is_complete(S) and is_infinitely_distributive(S):
        assert roundtrip_semigroup(rep).valid


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SMALL), st.sampled_from(SMALL))
def test_products_wagner_preston(a, b):
    S = direct_product(semigroups()[a], semigroups()[b])
    assume(S.size <= 9)
    assert verify_inverse_semigroup(S).valid
    _, rep = wagner_preston(S)
    assert verify_representation(rep).valid
    assert classify(extend_to_unit(rep)).is_unital
    assert equiv_wide_unital(rep).valid


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from(GROUPOIDS), min_size=1, max_size=2))
def test_disjoint_unions_roundtrip(names):
    G = basic_groupoids()[names[0]]
    for n in names[1:]:
        G = disjoint_union(G, basic_groupoids()[n])
    assert verify_groupoid(G).valid
    assert roundtrip_groupoid(G).valid
    _, back, report = io.loads(io.dump_object(G))
    assert report.valid and back == G
