
import pytest

from germoid.corpus import full_monoid, full_representations, semigroups, wagner_preston_representations
from germoid.fintop import discrete, sierpinski
from germoid.groupoid import canonical_representation, local_bisections, pair_groupoid, unit_groupoid
from germoid.invsemi import (
    InverseSemigroup,
    PartialBijection,
    abstract_from_pseudogroup,
    chain_semilattice,
    compose,
    cyclic_group,
    identity,
    invert,
    restrict,
    symmetric_inverse_monoid,
    verify_inverse_semigroup,
    wagner_preston,
)
from germoid.report import (
    FactorizationError,
    HypothesisViolatedError,
    NonCommutingSquareError,
    NotUnitalError,
    NotWideError,
)
from germoid.representation import (
    Representation,
    check_mx_quotient,
    classify,
    enumerate_homomorphisms,
    extend_to_unit,
    extensional_classes,
    factor_through_mx,
    mx_quotient,
    omega_downarrow,
    verify_representation,
)


def regular_z2(n=2):
    """Z/2 on the discrete space with the generator acting as (0 1)."""
    X = discrete(n)
    swap = tuple([1, 0] + list(range(2, n)))
    return Representation(cyclic_group(2), X, (identity(X, X.full), PartialBijection(X, swap)))


def chain2_on_sierpinski():
    X = sierpinski()
    return Representation(chain_semilattice(2), X, (identity(X, 0b01), identity(X, 0b11)))


def chain3_on_sierpinski():
    X = sierpinski()
    return Representation(chain_semilattice(3), X, (identity(X, 0), identity(X, 0b01), identity(X, 0b11)))


def test_classify_examples():
    for G in (unit_groupoid(sierpinski()), pair_groupoid(2)):
        assert classify(canonical_representation(G)).is_full
    for rep in wagner_preston_representations().values():
        assert classify(rep).is_wide
    c = classify(chain3_on_sierpinski())
    assert c == (True, True, True)


def test_chain2_on_sierpinski_is_not_full():
    # Sierpinski space has three opens, the 2-chain has two idempotents: no bijection
    c = classify(chain2_on_sierpinski())
    assert c.is_unital and c.is_wide and not c.is_full


def test_classify_non_wide():
    X = discrete(2)
    rep = Representation(chain_semilattice(1), X, (identity(X, 0b01),))
    assert classify(rep) == (False, False, False)
    with pytest.raises(NotWideError):
        extend_to_unit(rep)


def test_classify_implications_on_corpus():
    reps = list(wagner_preston_representations().values()) + list(full_representations().values())
    reps += [regular_z2(3), chain2_on_sierpinski(), chain3_on_sierpinski()]
    for rep in reps:
        assert verify_representation(rep).valid
        c = classify(rep)
        assert c.is_wide or not (c.is_full or c.is_unital)


def test_verify_representation_catches_non_homomorphism():
    X = discrete(2)
    bad = Representation(cyclic_group(2), X, (identity(X, X.full), identity(X, 0b01)))
    assert "homomorphism" in verify_representation(bad).axioms()
    assert "shape" in verify_representation(Representation(cyclic_group(2), X, (identity(X, 3),))).axioms()


def test_omega_downarrow_trivial():
    X = discrete(1)
    one = InverseSemigroup([[0]], [0], 0)
    D, elems = omega_downarrow(Representation(one, X, (identity(X, 1),)))
    assert [tuple(e) for e in elems] == [(0, 0), (1, 0)]
    assert D.mul.tolist() == chain_semilattice(2).mul.tolist()


def test_omega_downarrow_sierpinski_count():
    D, elems = omega_downarrow(full_monoid(sierpinski()))
    assert D.size == 6
    assert verify_inverse_semigroup(D).valid


def test_omega_downarrow_unit_law_on_corpus():
    for rep in full_representations().values():
        D, elems = omega_downarrow(rep)
        assert verify_inverse_semigroup(D).valid
        assert all(D.mul[i, D.unit] == i for i in range(D.size))


def _naive_first_violation(rep):
    S = rep.semigroup
    for s in range(S.size):
        if rep.assign[S.inv[s]] != invert(rep.assign[s]):
            return "inverse", (s,)
        for t in range(S.size):
            if rep.assign[S.mul[s, t]] != compose(rep.assign[s], rep.assign[t]):
                return "homomorphism", (s, t)
    return None


def test_verify_representation_matches_naive_loop():
    reps = list(full_representations().values()) + list(wagner_preston_representations(5).values())
    seen = 0
    for rep in reps:
        assert verify_representation(rep).valid and _naive_first_violation(rep) is None
        n = rep.semigroup.size
        for k in range(0, n, max(1, n // 4)):
            # move one element onto another image
            assign = list(rep.assign)
            assign[k] = rep.assign[(k + 1) % n]
            broken = Representation(rep.semigroup, rep.space, tuple(assign))
            want = _naive_first_violation(broken)
            got = verify_representation(broken).violations
            if want is None:
                assert not got
            else:
                seen += 1
                assert [(v.axiom, tuple(v.witness)) for v in got] == [want]
    assert seen > 20


def test_omega_downarrow_dense_matches_loop(monkeypatch):
    import germoid.representation as R

    reps = list(full_representations().values())
    reps += [extend_to_unit(r) for r in wagner_preston_representations(4).values()]
    for rep in reps:
        dense, e1 = omega_downarrow(rep)
        monkeypatch.setattr(R, "DENSE_SUBSET_POINTS", -1)
        loop, e2 = omega_downarrow(rep)
        monkeypatch.undo()
        assert e1 == e2 and dense == loop


def test_omega_downarrow_requires_unit():
    _, rep = wagner_preston(semigroups()["B2"])
    with pytest.raises(NotUnitalError):
        omega_downarrow(rep)


def test_mx_full_collapses():
    mx = mx_quotient(full_monoid(sierpinski()))
    assert mx.semigroup.size == 3
    assert check_mx_quotient(mx).valid


def test_mx_idempotent_classes_biject_with_opens():
    for rep in [regular_z2(), chain2_on_sierpinski()] + list(full_representations().values()):
        mx = mx_quotient(rep)
        X = rep.space
        assert sorted(mx.embed_open(u) for u in X.opens) == sorted(int(f) for f in mx.semigroup.idempotents)
        assert len({mx.embed_open(u) for u in X.opens}) == len(X.opens)


def _brute_mx_size(rep):
    # oracle: group formal restrictions by exhaustive witness search
    S, X = rep.semigroup, rep.space
    pairs = [(u, s) for s in range(S.size) for u in X.opens_within(rep.dom(s))]
    cls = []
    for u, s in pairs:
        for c in cls:
            v, t = c[0]
            if v == u and any(u & ~rep.dom(f) == 0 and S.mul[f, s] == S.mul[f, t] for f in S.idempotents):
                c.append((u, s))
                break
        else:
            cls.append([(u, s)])
    return len(cls)


def test_mx_z2_regular():
    rep = regular_z2()
    mx = mx_quotient(rep)
    # (U, e) and (U, a) over the four opens never merge: M has no idempotent
    # below e, so even the two restrictions to the empty set stay apart
    assert mx.semigroup.size == _brute_mx_size(rep) == 8
    assert check_mx_quotient(mx).valid
    _assert_refines_extensional(rep, mx)
    assert len(set(extensional_classes(rep, mx.restrictions))) == 7


def _assert_refines_extensional(rep, mx):
    ext = extensional_classes(rep, mx.restrictions)
    by_class = {}
    for i, c in enumerate(mx.class_of):
        by_class.setdefault(c, set()).add(ext[i])
    assert all(len(v) == 1 for v in by_class.values())
    # away from the empty open the two groupings coincide for these reps
    nonempty = [i for i, r in enumerate(mx.restrictions) if r.open]
    assert len({mx.class_of[i] for i in nonempty}) == len({ext[i] for i in nonempty})


@pytest.mark.parametrize("name", sorted(full_representations()))
def test_mx_matches_oracle_on_full(name):
    rep = full_representations()[name]
    mx = mx_quotient(rep)
    assert mx.semigroup.size == _brute_mx_size(rep) == rep.semigroup.size
    assert check_mx_quotient(mx).valid


def test_mx_on_unital_corpus():
    for name, rep in wagner_preston_representations(6).items():
        if not classify(rep).is_unital:
            continue
        mx = mx_quotient(rep)
        assert check_mx_quotient(mx).valid, name
        assert mx.semigroup.size == _brute_mx_size(rep), name
        _assert_refines_extensional(rep, mx)
        for c, cl in enumerate(mx.classes):
            assert mx.representation.assign[c] == restrict(rep.assign[cl.representative.element], cl.representative.open)


def test_factor_identity():
    rep = regular_z2()
    mx = mx_quotient(rep)
    X = rep.space
    alpha = [mx.embed_element(s) for s in range(rep.semigroup.size)]
    beta = {u: mx.embed_open(u) for u in X.opens}
    f = factor_through_mx(mx, mx.semigroup, alpha, beta)
    assert f.hom == tuple(range(mx.semigroup.size))
    assert f.unique is True


def test_factor_into_ix_recovers_rho_x():
    rep = regular_z2()
    mx = mx_quotient(rep)
    X = rep.space
    P = symmetric_inverse_monoid(X)
    T, els = abstract_from_pseudogroup(P)
    idx = {h: i for i, h in enumerate(els)}
    alpha = [idx[rep.assign[s]] for s in range(rep.semigroup.size)]
    beta = {u: idx[identity(X, u)] for u in X.opens}
    f = factor_through_mx(mx, T, alpha, beta)
    assert [els[k] for k in f.hom] == list(mx.representation.assign)


def _z2_on_three_points():
    rep = regular_z2(3)
    mx = mx_quotient(rep)
    T, els = abstract_from_pseudogroup(symmetric_inverse_monoid(rep.space))
    idx = {h: i for i, h in enumerate(els)}
    return rep, mx, T, els, idx


def test_factor_broken_beta():
    rep, mx, T, els, idx = _z2_on_three_points()
    X = rep.space
    tau = PartialBijection(X, (0, 2, 1))
    alpha = [idx[h] for h in rep.assign]
    # conjugate beta by a swap of points 1 and 2: still a semilattice map, but not equivariant
    beta = {u: idx[compose(compose(tau, identity(X, u)), tau)] for u in X.opens}
    with pytest.raises((HypothesisViolatedError, NonCommutingSquareError)) as exc:
        factor_through_mx(mx, T, alpha, beta)
    assert exc.value.witness is not None


def test_factor_non_commuting_square():
    rep = chain3_on_sierpinski()
    mx = mx_quotient(rep)
    X = rep.space
    T, els = abstract_from_pseudogroup(symmetric_inverse_monoid(X))
    idx = {h: i for i, h in enumerate(els)}
    alpha = [idx[h] for h in rep.assign]
    full = idx[identity(X, X.full)]
    with pytest.raises(NonCommutingSquareError):
        factor_through_mx(mx, T, alpha, {u: full for u in X.opens})


def test_factor_rejects_non_homomorphism():
    rep = regular_z2()
    mx = mx_quotient(rep)
    X = rep.space
    T, els = abstract_from_pseudogroup(symmetric_inverse_monoid(X))
    idx = {h: i for i, h in enumerate(els)}
    beta = {u: idx[identity(X, u)] for u in X.opens}
    with pytest.raises(FactorizationError):
        factor_through_mx(mx, T, [idx[identity(X, X.full)], idx[identity(X, 1)]], beta)


def _factors(mx, T, alpha, beta):
    try:
        return factor_through_mx(mx, T, alpha, beta)
    except (FactorizationError, HypothesisViolatedError, NonCommutingSquareError):
        return None


def test_factor_search_over_all_betas():
    # oracle: for each semilattice map beta, a factorization exists iff the
    # formula beta(U) alpha(s) is a homomorphism found by exhaustive search
    rep, mx, T, els, idx = _z2_on_three_points()
    X = rep.space
    alpha = [idx[h] for h in rep.assign]
    canonical = {u: idx[identity(X, u)] for u in X.opens}
    assert _factors(mx, T, alpha, canonical) is not None
    opens = X.opens
    omega = InverseSemigroup(
        [[opens.index(u & v) for v in opens] for u in opens], list(range(len(opens))), len(opens) - 1
    )
    found = failed = 0
    for vals in enumerate_homomorphisms(omega, T, {omega.unit: T.unit}):
        beta = dict(zip(opens, vals))
        res = _factors(mx, T, alpha, beta)
        if res is None:
            failed += 1
            continue
        found += 1
        fixed = {mx.embed_open(u): beta[u] for u in X.opens}
        fixed.update({mx.embed_element(s): alpha[s] for s in range(rep.semigroup.size)})
        assert enumerate_homomorphisms(mx.semigroup, T, fixed, limit=2) == [res.hom]
    assert found >= 1 and failed >= 1


def test_enumerate_homomorphisms_counts():
    Z2 = cyclic_group(2)
    assert sorted(enumerate_homomorphisms(Z2, Z2)) == [(0, 0), (0, 1)]
    C2 = chain_semilattice(2)
    assert len(enumerate_homomorphisms(C2, C2)) == 3


def test_extend_to_unit_examples():
    _, rep = wagner_preston(chain_semilattice(2))
    ext = extend_to_unit(rep)
    assert ext.semigroup.size == 3 and ext.space.point_count == 2
    assert classify(ext).is_unital
    rep = regular_z2()
    ext = extend_to_unit(rep)
    assert ext.assign[:2] == rep.assign
    assert ext.assign[ext.semigroup.unit] == identity(rep.space, rep.space.full)


def test_extend_to_unit_corpus():
    for rep in wagner_preston_representations().values():
        ext = extend_to_unit(rep)
        assert verify_representation(ext).valid
        assert classify(ext).is_unital


def test_canonical_reps_of_pair_groupoid_are_identity():
    G = pair_groupoid(2)
    bis = local_bisections(G)
    rho = canonical_representation(G, bis)
    assert sorted(rho.assign, key=lambda h: h.sort_key()) == sorted(
        symmetric_inverse_monoid(discrete(2)).elements, key=lambda h: h.sort_key()
    )


def test_named_semigroups_have_wide_wp():
    for S in semigroups().values():
        assert uncovered(wagner_preston(S)[1]) == 0


def uncovered(rep):
    from germoid.representation import uncovered_points

    return uncovered_points(rep)
