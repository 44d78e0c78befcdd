"""Representations of inverse semigroups by partial homeomorphisms.

Covers classification (unital / full / wide), the monoid of formal
restrictions ``(U, s)``, its quotient ``M_X`` carrying a full representation,
the universal factorization through ``M_X``, and unit extension.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .fintop import bits
from .invsemi import (
    InverseSemigroup,
    adjoin_unit,
    check_homomorphism,
    identity,
    invert,
    restrict,
    verify_inverse_semigroup,
    verify_partial_bijection,
)
from .report import (
    CharacterizationMismatch,
    FactorizationError,
    HypothesisViolatedError,
    NonCommutingSquareError,
    NotUnitalError,
    NotWideError,
    Report,
)

UNIQUENESS_SEARCH_LIMIT = 10_000
DENSE_SUBSET_POINTS = 12  # omega_downarrow uses 2^points-row tables up to here


@dataclass(frozen=True, eq=False)
class Representation:
    semigroup: InverseSemigroup
    space: object
    assign: tuple

    def __call__(self, s):
        return self.assign[s]

    def dom(self, s):
        return self.assign[s].domain

    def cod(self, s):
        return self.assign[s].codomain

    @cached_property
    def _by_image(self):
        out = {}
        for s, h in enumerate(self.assign):
            out.setdefault(h, []).append(s)
        return out

    def elements_mapping_to(self, h):
        return self._by_image.get(h, [])


def verify_representation(rep):
    report = Report("representation")
    S = rep.semigroup
    if len(rep.assign) != S.size:
        report.add("shape", (len(rep.assign), S.size))
        return report
    for s, h in enumerate(rep.assign):
        if h.space != rep.space:
            report.add("space", (s,))
            return report
        sub = verify_partial_bijection(h)
        if not sub.valid:
            report.extend(sub, prefix=f"element-{s}:")
    if not report.valid:
        return report
    # the first failure in (s, then each t) order, as a nested loop would find it
    bad_inv = next((s for s in range(S.size) if rep.assign[S.inv[s]] != invert(rep.assign[s])), S.size)
    bad_hom = _first_hom_violation(rep)
    if bad_hom is not None and bad_hom[0] < bad_inv:
        report.add("homomorphism", bad_hom)
    elif bad_inv < S.size:
        report.add("inverse", (bad_inv,))
    return report


def _first_hom_violation(rep):
    S = rep.semigroup
    n, m = S.size, rep.space.point_count
    if m == 0:
        return None
    # column m holds -1 so that "undefined" composes to undefined
    A = np.full((n, m + 1), -1, dtype=np.int64)
    A[:, :m] = [h.mapping for h in rep.assign]
    step = max(1, (1 << 18) // max(n * m, 1))
    for lo in range(0, n, step):
        rows = A[lo:lo + step, :m]
        composed = A[:, rows].transpose(1, 0, 2)  # [s, t, p] -> rho(t)(rho(s)(p))
        expected = A[S.mul[lo:lo + step], :m]
        bad = np.argwhere((composed != expected).any(axis=2))
        if bad.size:
            return lo + int(bad[0, 0]), int(bad[0, 1])
    return None


class Classification(NamedTuple):
    is_unital: bool
    is_full: bool
    is_wide: bool


def uncovered_points(rep):
    cover = 0
    for f in rep.semigroup.idempotents:
        cover |= rep.dom(int(f))
    return rep.space.full & ~cover


def classify(rep):
    S, X = rep.semigroup, rep.space
    wide = uncovered_points(rep) == 0
    unital = S.unit is not None and rep.assign[S.unit] == identity(X, X.full)
    images = [rep.assign[int(f)] for f in S.idempotents]
    opens = X.opens
    full = (
        len(images) == len(opens)
        and all(h.is_idempotent() for h in images)
        and sorted(h.domain for h in images) == list(opens)
    )
    if (full or unital) and not wide:
        raise CharacterizationMismatch("full or unital representation that is not wide", rep)
    return Classification(unital, full, wide)


def require_unital(rep):
    if not classify(rep).is_unital:
        raise NotUnitalError("representation is not unital", rep.semigroup.unit)


# ----------------------------------------------------------------------------
# formal restrictions and M_X


class FormalRestriction(NamedTuple):
    open: int
    element: int


@dataclass(frozen=True)
class MXClass:
    representative: FormalRestriction
    members: frozenset


def omega_downarrow(rep):
    """The inverse monoid of pairs ``(U, s)`` with ``U`` open inside ``dom rho(s)``.

    Returns ``(semigroup, elements)``; ``elements[i]`` is a FormalRestriction.
    """
    require_unital(rep)
    S, X = rep.semigroup, rep.space
    elems = []
    for s in range(S.size):
        for u in X.opens_within(rep.dom(s)):
            elems.append(FormalRestriction(u, s))
    elems.sort()
    index = {e: i for i, e in enumerate(elems)}
    n = len(elems)
    if X.point_count <= DENSE_SUBSET_POINTS:
        mul, inv = _downarrow_tables(rep, elems, index)
        unit = index[FormalRestriction(X.full, S.unit)]
        labels = tuple(f"({u},{s})" for u, s in elems)
        return InverseSemigroup(mul, inv, unit, labels), tuple(elems)
    mul = np.empty((n, n), dtype=np.int64)
    inv = np.empty(n, dtype=np.int64)
    for i, (u, s) in enumerate(elems):
        h = rep.assign[s]
        hu = h.image(u)
        inv[i] = index[FormalRestriction(hu, int(S.inv[s]))]
        for j, (v, t) in enumerate(elems):
            w = u & h.preimage(v & hu)
            mul[i, j] = index[FormalRestriction(w, int(S.mul[s, t]))]
    unit = index[FormalRestriction(X.full, S.unit)]
    labels = tuple(f"({u},{s})" for u, s in elems)
    return InverseSemigroup(mul, inv, unit, labels), tuple(elems)


def _downarrow_tables(rep, elems, index):
    """Table form of the loop in omega_downarrow, over subsets encoded as ints."""
    S, X = rep.semigroup, rep.space
    subsets = np.arange(1 << X.point_count)
    pre = np.array([[h.preimage(int(v)) for v in subsets] for h in rep.assign], dtype=np.int64)
    img = np.array([[h.image(int(v)) for v in subsets] for h in rep.assign], dtype=np.int64)
    key = np.full((subsets.size, S.size), -1, dtype=np.int64)
    for (u, s), i in index.items():
        key[u, s] = i
    U = np.array([u for u, _ in elems], dtype=np.int64)
    E = np.array([s for _, s in elems], dtype=np.int64)
    HU = img[E, U]
    W = U[:, None] & pre[E[:, None], U[None, :] & HU[:, None]]
    mul = key[W, S.mul[E[:, None], E[None, :]]]
    inv = key[HU, S.inv[E]]
    return mul, inv


@dataclass(frozen=True, eq=False)
class MXQuotient:
    source: Representation
    downarrow: InverseSemigroup
    restrictions: tuple
    class_of: tuple  # restriction index -> class index
    classes: tuple  # MXClass per class index
    semigroup: InverseSemigroup
    representation: Representation

    def embed_open(self, u):
        """``U -> [U, e]``."""
        return self._lookup(u, self.source.semigroup.unit)

    def embed_element(self, s):
        """``s -> [dom rho(s), s]``."""
        return self._lookup(self.source.dom(s), s)

    def class_index(self, u, s):
        return self._lookup(u, s)

    def _lookup(self, u, s):
        return self.class_of[self._restriction_index[FormalRestriction(u, s)]]

    @cached_property
    def _restriction_index(self):
        return {r: i for i, r in enumerate(self.restrictions)}


def restriction_classes(rep, restrictions):
    """Witness-based congruence classes: ``(U,s) ~ (U,t)`` iff some idempotent
    ``f`` with ``U`` inside ``dom rho(f)`` has ``f s = f t``."""
    S = rep.semigroup
    by_open = {}
    for i, (u, s) in enumerate(restrictions):
        by_open.setdefault(u, []).append(i)
    class_of = [-1] * len(restrictions)
    for u in sorted(by_open):
        idx = by_open[u]
        elems = np.array([restrictions[i].element for i in idx], dtype=np.int64)
        wit = np.array([f for f in S.idempotents if u & ~rep.dom(int(f)) == 0], dtype=np.int64)
        labels = K.witness_labels(S.mul, wit, elems)
        for i, lab in zip(idx, labels):
            class_of[i] = idx[int(lab)]
    return class_of


def mx_quotient(rep):
    X = rep.space
    down, restrictions = omega_downarrow(rep)
    leader = restriction_classes(rep, restrictions)
    leaders = sorted(set(leader))
    cidx = {r: k for k, r in enumerate(leaders)}
    class_of = tuple(cidx[leader[i]] for i in range(len(restrictions)))
    members = [[] for _ in leaders]
    for i, c in enumerate(class_of):
        members[c].append(restrictions[i])
    classes = tuple(MXClass(restrictions[r], frozenset(m)) for r, m in zip(leaders, members))
    n = len(leaders)
    mul = np.empty((n, n), dtype=np.int64)
    inv = np.empty(n, dtype=np.int64)
    for a, ra in enumerate(leaders):
        inv[a] = class_of[down.inv[ra]]
        for b, rb in enumerate(leaders):
            mul[a, b] = class_of[down.mul[ra, rb]]
    unit = class_of[down.unit]
    labels = tuple(f"[{c.representative.open},{c.representative.element}]" for c in classes)
    MX = InverseSemigroup(mul, inv, unit, labels)
    assign = tuple(restrict(rep.assign[c.representative.element], c.representative.open) for c in classes)
    rho_x = Representation(MX, X, assign)
    return MXQuotient(rep, down, restrictions, class_of, classes, MX, rho_x)


def extensional_classes(rep, restrictions):
    """Oracle grouping: same open and equal restricted maps."""
    key = {}
    out = []
    for u, s in restrictions:
        k = (u, restrict(rep.assign[s], u))
        out.append(key.setdefault(k, len(key)))
    return out


def check_mx_quotient(mx):
    """Well-definedness, fullness, the commuting square and the decomposition
    ``[U,s] = [U,e][dom rho(s), s]``."""
    report = Report("mx-quotient")
    rep = mx.source
    S = rep.semigroup
    down = mx.downarrow
    for i in range(len(mx.restrictions)):
        for j in range(len(mx.restrictions)):
            if mx.class_of[down.mul[i, j]] != mx.semigroup.mul[mx.class_of[i], mx.class_of[j]]:
                report.add("well-defined-product", (mx.restrictions[i], mx.restrictions[j]))
                return report
        if mx.class_of[down.inv[i]] != mx.semigroup.inv[mx.class_of[i]]:
            report.add("well-defined-inverse", (mx.restrictions[i],))
            return report
    report.extend(verify_inverse_semigroup(mx.semigroup), prefix="semigroup:")
    if not classify(mx.representation).is_full:
        report.add("full")
    report.extend(verify_representation(mx.representation), prefix="rho_X:")
    for f in S.idempotents:
        f = int(f)
        if mx.embed_open(rep.dom(f)) != mx.embed_element(f):
            report.add("commuting-square", (f,))
    phi = [mx.embed_element(s) for s in range(S.size)]
    report.extend(check_homomorphism(S, mx.semigroup, phi), prefix="M->M_X:")
    for c, cl in enumerate(mx.classes):
        u, s = cl.representative
        left = mx.embed_open(u)
        right = mx.embed_element(s)
        if mx.semigroup.mul[left, right] != c:
            report.add("decomposition", (u, s))
    return report


# ----------------------------------------------------------------------------
# universal property


@dataclass(frozen=True)
class Factorization:
    hom: tuple
    unique: object  # True, or "proved-by-construction" above the search limit


def factor_through_mx(mx, target, alpha, beta):
    """The homomorphism ``[U,s] -> beta(U) alpha(s)`` from ``M_X`` into ``target``.

    ``alpha``: sequence indexed by elements of M; ``beta``: mapping open -> element.
    """
    rep = mx.source
    M, X = rep.semigroup, rep.space
    T = target
    opens = X.opens
    alpha = [int(a) for a in alpha]
    beta = {int(u): int(beta[u]) for u in opens}

    hom = check_homomorphism(M, T, alpha)
    if not hom.valid or (T.unit is None or alpha[M.unit] != T.unit):
        raise FactorizationError("alpha is not a monoid homomorphism", hom.violations[:1] or ("unit",))
    for u in opens:
        for v in opens:
            if beta[u & v] != T.mul[beta[u], beta[v]]:
                raise FactorizationError("beta is not a semilattice homomorphism", (u, v))
    if beta[X.full] != T.unit:
        raise FactorizationError("beta does not preserve the unit", (X.full,))
    for f in M.idempotents:
        f = int(f)
        if alpha[f] != beta[rep.dom(f)]:
            raise NonCommutingSquareError("alpha and beta disagree on an idempotent", (f, rep.dom(f)))
    for s in range(M.size):
        h = rep.assign[s]
        si = int(M.inv[s])
        for u in X.opens_within(rep.dom(s)):
            hu = h.image(u)
            if T.mul[alpha[si], beta[u]] != T.mul[beta[hu], alpha[si]]:
                raise HypothesisViolatedError("conjugation hypothesis fails", (u, None, s))
            for v in opens:
                w = u & h.preimage(v & hu)
                lhs = T.mul[beta[w], alpha[s]]
                rhs = T.mul[T.mul[beta[u], alpha[s]], beta[v]]
                if lhs != rhs:
                    raise HypothesisViolatedError("restriction hypothesis fails", (u, v, s))

    MX = mx.semigroup
    out = []
    for c, cl in enumerate(mx.classes):
        vals = {int(T.mul[beta[u], alpha[s]]) for u, s in cl.members}
        if len(vals) != 1:
            raise FactorizationError("formula is not constant on a class", (c,))
        out.append(vals.pop())
    check = check_homomorphism(MX, T, out)
    if not check.valid:
        raise FactorizationError("induced map is not a homomorphism", check.violations[0].witness)

    if MX.size * T.size <= UNIQUENESS_SEARCH_LIMIT:
        fixed = {mx.embed_open(u): beta[u] for u in opens}
        for s in range(M.size):
            fixed[mx.embed_element(s)] = alpha[s]
        sols = enumerate_homomorphisms(MX, T, fixed, limit=2)
        if sols != [tuple(out)]:
            raise FactorizationError("uniqueness search disagrees with the formula", len(sols))
        unique = True
    else:
        unique = "proved-by-construction"
    return Factorization(tuple(out), unique)


def enumerate_homomorphisms(A, B, fixed=None, limit=None):
    """All homomorphisms ``A -> B`` agreeing with ``fixed`` (backtracking)."""
    fixed = dict(fixed or {})
    n = A.size
    assign = [-1] * n
    for a, b in fixed.items():
        if assign[a] not in (-1, b):
            return []
        assign[a] = b
    amul, bmul = A.mul, B.mul
    for a in range(n):
        for c in range(n):
            if assign[a] >= 0 and assign[c] >= 0 and assign[amul[a, c]] >= 0:
                if assign[amul[a, c]] != bmul[assign[a], assign[c]]:
                    return []
    order = [a for a in range(n) if a not in fixed]
    sols = []

    def consistent(a):
        for c in range(n):
            if assign[c] < 0:
                continue
            for x, y in ((a, c), (c, a)):
                p = assign[amul[x, y]]
                if p >= 0 and p != bmul[assign[x], assign[y]]:
                    return False
        return True

    def go(k):
        if limit is not None and len(sols) >= limit:
            return
        if k == len(order):
            sols.append(tuple(assign))
            return
        a = order[k]
        for b in range(B.size):
            assign[a] = b
            if consistent(a):
                go(k + 1)
            assign[a] = -1

    go(0)
    return sols


# ----------------------------------------------------------------------------
# unit extension


def extend_to_unit(rep):
    """Adjoin a unit to the semigroup and send it to the identity of X."""
    bad = uncovered_points(rep)
    if bad:
        raise NotWideError("representation is not wide", next(bits(bad)))
    Se = adjoin_unit(rep.semigroup)
    assign = rep.assign + (identity(rep.space, rep.space.full),)
    return Representation(Se, rep.space, assign)


def identity_representation(P_semigroup, elements, space):
    """Tautological representation of a pseudogroup-backed semigroup."""
    return Representation(P_semigroup, space, tuple(elements))

