from itertools import product

import pytest

from germoid.corpus import full_monoid, semigroups
from germoid.fintop import bits, discrete
from germoid.groupoid import group_groupoid, groupoid_isomorphic, is_etale, verify_groupoid
from germoid.invsemi import chain_semilattice, compose, cyclic_group, identity, invert, symmetric_group
from germoid.representation import classify, verify_representation
from germoid.universal import (
    character_space,
    enumerate_characters,
    literal_basis_topology,
    principal_characters,
    universal_groupoid,
    universal_representation,
)


def _characters_brute(S):
    # oracle: every map E -> {0,1} as a dict, filtered by the two axioms
    E = [int(f) for f in S.idempotents]
    out = []
    for vals in product((0, 1), repeat=len(E)):
        x = dict(zip(E, vals))
        if not any(vals):
            continue
        if all(x[int(S.mul[f, g])] == x[f] * x[g] for f in E for g in E):
            out.append(sum(1 << f for f in E if x[f]))
    return sorted(out)


def test_group_has_one_character():
    for n in (1, 2, 5):
        assert len(character_space(cyclic_group(n)).characters) == 1


def test_chain_has_two_characters():
    cs = character_space(chain_semilattice(2))
    # top (1) always 1; bottom free
    assert cs.characters == (0b10, 0b11)


def test_i2_characters_are_filters_of_boolean_lattice():
    S = full_monoid(discrete(2)).semigroup
    chars = enumerate_characters(S)
    assert chars == _characters_brute(S)
    # the 4 partial identities form a Boolean square with bottom the empty map:
    # its filters are the 3 principal upsets of nonzero elements plus the whole thing
    assert len(chars) == 4


@pytest.mark.parametrize("name", sorted(semigroups()))
def test_characters_match_oracle(name):
    S = semigroups()[name]
    chars = enumerate_characters(S)
    assert chars == _characters_brute(S)
    assert chars == principal_characters(S)


@pytest.mark.parametrize("name", sorted(semigroups()))
def test_minimal_basis_matches_literal_basis(name):
    S = semigroups()[name]
    cs = character_space(S)
    if len(S.idempotents) <= 8:
        assert literal_basis_topology(cs) == cs.space


def test_idempotents_act_as_identities():
    for S in semigroups().values():
        cs = character_space(S)
        rho = universal_representation(S, cs)
        for f in S.idempotents:
            assert rho.assign[int(f)] == identity(cs.space, cs.D(int(f)))


def test_z2_action_trivial():
    rho = universal_representation(cyclic_group(2))
    assert rho.space.point_count == 1
    assert rho.assign[1].mapping == (0,)


@pytest.mark.parametrize("name", sorted(semigroups()))
def test_universal_corpus(name):
    S = semigroups()[name]
    cs = character_space(S)
    rho = universal_representation(S, cs)
    assert verify_representation(rho).valid
    assert classify(rho).is_wide
    for s in range(S.size):
        h = rho.assign[s]
        t = int(S.inv[s])
        assert h.domain == cs.D(s) and h.codomain == cs.D(t)
        assert compose(h, rho.assign[t]) == identity(cs.space, cs.D(s))
        assert rho.assign[t] == invert(h)
    g = universal_groupoid(S)
    assert verify_groupoid(g.groupoid).valid and is_etale(g.groupoid).etale
    assert g.groupoid.objects == cs.space


def test_group_case():
    for S in (cyclic_group(2), cyclic_group(3), symmetric_group(3)):
        g = universal_groupoid(S)
        assert g.groupoid.object_count == 1 and g.groupoid.arrow_count == S.size
        assert groupoid_isomorphic(g.groupoid, group_groupoid(S)) is not None


def test_semilattice_case():
    for name in ("chain2", "chain3", "chain2xchain2", "order3-1"):
        S = semigroups()[name]
        if len(S.idempotents) != S.size:
            continue
        G = universal_groupoid(S).groupoid
        assert G.non_unit_arrows() == []


def test_i1_universal():
    S = full_monoid(discrete(1)).semigroup
    g = universal_groupoid(S)
    assert g.groupoid.object_count == 2
    assert is_etale(g.groupoid).etale


def test_principal_method_agrees():
    for S in semigroups().values():
        a = character_space(S, method="enumerate")
        b = character_space(S, method="principal")
        assert a.characters == b.characters and a.space == b.space


def test_characters_nonzero_and_multiplicative():
    for S in semigroups().values():
        E = [int(f) for f in S.idempotents]
        for c in character_space(S).characters:
            assert c
            assert all(c >> f & 1 for f in bits(c)) and all(f in E for f in bits(c))
            for f in E:
                for g in E:
                    assert (c >> int(S.mul[f, g]) & 1) == (c >> f & 1) * (c >> g & 1)
