"""Inverse semigroups: concrete pseudogroups of partial homeomorphisms and
abstract Cayley tables, with the natural order, compatibility and joins.

Products follow the left-to-right convention throughout: for partial maps,
``compose(h, k)`` is "first ``h``, then ``k``".
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import permutations

import numpy as np

from . import _kernels as K
from .fintop import FiniteSpace, bits, discrete, mask_of, popcount
from .report import IncompatibleSetError, InvalidStructure, Report, SizeGuardError

MAX_ORDER_SEARCH = 256


# ----------------------------------------------------------------------------
# partial bijections


@dataclass(frozen=True)
class PartialBijection:
    space: FiniteSpace
    mapping: tuple  # image of each point, -1 off the domain

    @cached_property
    def domain(self):
        return mask_of(p for p, q in enumerate(self.mapping) if q >= 0)

    @cached_property
    def codomain(self):
        return mask_of(q for q in self.mapping if q >= 0)

    def __call__(self, x):
        y = self.mapping[x]
        if y < 0:
            raise ValueError(f"{x} is outside the domain")
        return y

    def pairs(self):
        return [(p, q) for p, q in enumerate(self.mapping) if q >= 0]

    def image(self, subset):
        out = 0
        for p in bits(subset):
            q = self.mapping[p]
            if q >= 0:
                out |= 1 << q
        return out

    def preimage(self, subset):
        out = 0
        for p, q in enumerate(self.mapping):
            if q >= 0 and subset >> q & 1:
                out |= 1 << p
        return out

    def is_idempotent(self):
        return all(q < 0 or q == p for p, q in enumerate(self.mapping))

    def sort_key(self):
        return (popcount(self.domain), self.domain, self.mapping)

    @classmethod
    def from_pairs(cls, space, pairs, check=True):
        m = [-1] * space.point_count
        for p, q in pairs:
            if m[p] != -1:
                raise ValueError(f"point {p} mapped twice")
            m[p] = q
        h = cls(space, tuple(m))
        if check:
            report = verify_partial_bijection(h)
            if not report.valid:
                raise InvalidStructure(report)
        return h

    def __repr__(self):
        body = ", ".join(f"{p}->{q}" for p, q in self.pairs())
        return f"PB({body})"


def verify_partial_bijection(h):
    report = Report("partial-bijection")
    sp = h.space
    if len(h.mapping) != sp.point_count:
        report.add("shape", (len(h.mapping), sp.point_count))
        return report
    targets = [q for q in h.mapping if q >= 0]
    if any(q >= sp.point_count for q in targets):
        report.add("range", tuple(q for q in targets if q >= sp.point_count))
        return report
    if len(set(targets)) != len(targets):
        report.add("injective", tuple(sorted(targets)))
        return report
    if not sp.is_open(h.domain):
        report.add("domain-open", (h.domain,))
    if not sp.is_open(h.codomain):
        report.add("codomain-open", (h.codomain,))
    if report.valid:
        for p in bits(h.domain):
            if h.image(sp.nbhd[p]) != sp.nbhd[h.mapping[p]]:
                report.add("homeomorphism", (p,), "neighbourhood not carried onto neighbourhood")
                break
    return report


def identity(space, subset):
    return PartialBijection(space, tuple(p if subset >> p & 1 else -1 for p in space.points()))


def empty_map(space):
    return PartialBijection(space, (-1,) * space.point_count)


def compose(h, k):
    """First ``h``, then ``k``: defined on ``h^-1(cod h & dom k)``."""
    if h.space != k.space:
        raise ValueError("partial bijections live on different spaces")
    km = k.mapping
    return PartialBijection(h.space, tuple(-1 if q < 0 else km[q] for q in h.mapping))


def invert(h):
    m = [-1] * h.space.point_count
    for p, q in enumerate(h.mapping):
        if q >= 0:
            m[q] = p
    return PartialBijection(h.space, tuple(m))


def restrict(h, subset):
    return PartialBijection(
        h.space, tuple(q if subset >> p & 1 else -1 for p, q in enumerate(h.mapping))
    )


def all_partial_homeomorphisms(space):
    """Every homeomorphism between two open sets of ``space``."""
    opens = space.opens
    by_size = {}
    for u in opens:
        by_size.setdefault(popcount(u), []).append(u)
    out = []
    for group in by_size.values():
        for u in group:
            src = list(bits(u))
            for v in group:
                for tgt in permutations(bits(v)):
                    m = [-1] * space.point_count
                    for p, q in zip(src, tgt):
                        m[p] = q
                    h = PartialBijection(space, tuple(m))
                    if all(h.image(space.nbhd[p]) == space.nbhd[h.mapping[p]] for p in src):
                        out.append(h)
    out.sort(key=PartialBijection.sort_key)
    return out


# ----------------------------------------------------------------------------
# abstract inverse semigroups


class InverseSemigroup:
    """A finite semigroup given by its Cayley table and inverse table.

    Construction does not validate; run :func:`verify_inverse_semigroup`.
    """

    def __init__(self, mul, inv, unit=None, labels=None):
        self.mul = K.as_table(mul)
        self.inv = K.as_table(inv)
        self.mul.setflags(write=False)
        self.inv.setflags(write=False)
        self.unit = None if unit is None else int(unit)
        self.labels = None if labels is None else tuple(labels)

    @property
    def size(self):
        return self.mul.shape[0]

    def __len__(self):
        return self.size

    def __eq__(self, other):
        if not isinstance(other, InverseSemigroup):
            return NotImplemented
        return (
            self.mul.shape == other.mul.shape
            and np.array_equal(self.mul, other.mul)
            and np.array_equal(self.inv, other.inv)
            and self.unit == other.unit
        )

    __hash__ = None

    def __repr__(self):
        return f"InverseSemigroup(size={self.size}, unit={self.unit})"

    def m(self, s, t):
        return int(self.mul[s, t])

    def product(self, *elems):
        out = elems[0]
        for t in elems[1:]:
            out = int(self.mul[out, t])
        return out

    @cached_property
    def is_idempotent(self):
        d = np.diagonal(self.mul)
        return d == np.arange(self.size)

    @cached_property
    def idempotents(self):
        return np.flatnonzero(self.is_idempotent).astype(np.int64)

    @cached_property
    def leq(self):
        return K.natural_order(self.mul, self.idempotents)

    @cached_property
    def up(self):
        """``up[s]``: bitmask of the elements above ``s``."""
        return [mask_of(np.flatnonzero(row)) for row in self.leq]

    @cached_property
    def compat(self):
        idem = self.is_idempotent
        return idem[self.mul[:, self.inv]] & idem[self.mul[self.inv, :]]

    @cached_property
    def compat_masks(self):
        return [mask_of(np.flatnonzero(row)) for row in self.compat]

    @property
    def all_mask(self):
        return (1 << self.size) - 1


def from_table(mul, unit=None, labels=None):
    """Build an :class:`InverseSemigroup` from a bare table, finding inverses."""
    mul = K.as_table(mul)
    n = mul.shape[0]
    inv = np.full(n, -1, dtype=np.int64)
    for s in range(n):
        cands = [t for t in range(n) if mul[mul[s, t], s] == s and mul[mul[t, s], t] == t]
        if len(cands) != 1:
            raise ValueError(f"element {s} has {len(cands)} inverses")
        inv[s] = cands[0]
    if unit is None:
        unit = find_unit(mul)
    return InverseSemigroup(mul, inv, unit, labels)


def find_unit(mul):
    n = mul.shape[0]
    idx = np.arange(n)
    for e in range(n):
        if np.array_equal(mul[e], idx) and np.array_equal(mul[:, e], idx):
            return e
    return None


def verify_inverse_semigroup(S):
    report = Report("semigroup")
    mul, inv, n = S.mul, S.inv, S.size
    if mul.ndim != 2 or mul.shape != (n, n) or inv.shape != (n,):
        report.add("shape", (mul.shape, inv.shape))
        return report
    if n and (mul.min() < 0 or mul.max() >= n or inv.min() < 0 or inv.max() >= n):
        report.add("index-range")
        return report
    a, b, c = K.assoc_violation(mul)
    if a >= 0:
        report.add("associativity", (a, b, c), f"({a}{b}){c} != {a}({b}{c})")
    s, code = K.inverse_violation(mul, inv)
    if s >= 0:
        axiom = "inverse-sts" if code == 1 else "inverse-tst"
        report.add(axiom, (s, int(inv[s])))
    e, f = K.idempotent_commute_violation(mul, S.idempotents)
    if e >= 0:
        report.add("idempotents-commute", (e, f))
    counts = K.inverse_counts(mul)
    bad = np.flatnonzero(counts != 1)
    if bad.size:
        report.add("unique-inverse", (int(bad[0]), int(counts[bad[0]])))
    if S.unit is not None:
        u = S.unit
        idx = np.arange(n)
        if not (0 <= u < n) or not (np.array_equal(mul[u], idx) and np.array_equal(mul[:, u], idx)):
            report.add("unit", (u,))
    return report


def idempotents(S):
    return tuple(int(f) for f in S.idempotents)


def natural_leq(S, s, t):
    return bool(S.leq[s, t])


def is_compatible(S, s, t):
    return bool(S.compat[s, t])


def _least(S, mask):
    for u in bits(mask):
        if mask & ~S.up[u] == 0:
            return u
    return None


def join(S, Z):
    """Least upper bound of the compatible set ``Z``, or ``None``."""
    Z = sorted(set(int(z) for z in Z))
    for i, s in enumerate(Z):
        for t in Z[i + 1:]:
            if not S.compat[s, t]:
                raise IncompatibleSetError(f"{s} and {t} are not compatible", (s, t))
    ub = S.all_mask
    for z in Z:
        ub &= S.up[z]
    return _least(S, ub)


def _guard(S):
    if S.size > MAX_ORDER_SEARCH:
        raise SizeGuardError(f"exhaustive order search capped at {MAX_ORDER_SEARCH} elements", S.size)


def compatible_states(S, allowed=None):
    """Enumerate every compatible subset up to what determines its join.

    Returns a dict ``(C, U) -> Z`` where ``Z`` is a witness subset (sorted
    tuple), ``C`` the elements compatible with all of ``Z`` and ``U`` the
    common upper bounds of ``Z``.  Two subsets with the same state have the
    same join and the same compatible extensions, so this covers all of them.
    """
    _guard(S)
    allowed = S.all_mask if allowed is None else allowed
    start = (allowed, S.all_mask)
    states = {start: ()}
    frontier = [start]
    while frontier:
        nxt = []
        for state in frontier:
            C, U = state
            Z = states[state]
            for z in bits(C):
                new = (C & S.compat_masks[z], U & S.up[z])
                if new not in states:
                    states[new] = tuple(sorted(Z + (z,)))
                    nxt.append(new)
        frontier = nxt
    return states


def check_complete(S):
    """Every compatible subset has a join; the empty set is its own clause."""
    report = Report("completeness")
    states = compatible_states(S)
    missing = sorted((Z for (C, U), Z in states.items() if _least(S, U) is None), key=lambda z: (len(z), z))
    for Z in missing:
        if not Z:
            report.add("empty-join", (), "no least element")
        else:
            report.add("join", Z, "compatible set without a join")
            break
    return report


def is_complete(S):
    return check_complete(S).valid


def check_infinitely_distributive(S):
    """``s * join(Z) == join(s * Z)`` for every ``s`` and compatible ``Z`` with a join."""
    report = Report("distributivity")
    _guard(S)
    mul = S.mul
    full = S.all_mask
    for s in range(S.size):
        start = (full, full, full, full, True)
        states = {start: ()}
        frontier = [start]
        while frontier:
            nxt = []
            for state in frontier:
                C, U, Cs, Us, ok = state
                Z = states[state]
                j = _least(S, U)
                if j is not None:
                    if not ok:
                        report.add("sZ-compatible", (s, Z))
                        return report
                    js = _least(S, Us)
                    if js is None or int(mul[s, j]) != js:
                        report.add("distributivity", (s, Z), f"s*join={int(mul[s, j])}, join(sZ)={js}")
                        return report
                for z in bits(C):
                    sz = int(mul[s, z])
                    new = (
                        C & S.compat_masks[z],
                        U & S.up[z],
                        Cs & S.compat_masks[sz],
                        Us & S.up[sz],
                        ok and bool(Cs >> sz & 1),
                    )
                    if new not in states:
                        states[new] = tuple(sorted(Z + (z,)))
                        nxt.append(new)
            frontier = nxt
    return report


def is_infinitely_distributive(S):
    return check_infinitely_distributive(S).valid


def is_compatibly_prime(S, members):
    """Return ``(True, None)`` or ``(False, Z)`` with ``join(Z)`` in the set but
    ``Z`` disjoint from it."""
    states = compatible_states(S, allowed=S.all_mask & ~members)
    for (C, U), Z in sorted(states.items(), key=lambda kv: (len(kv[1]), kv[1])):
        j = _least(S, U)
        if j is not None and members >> j & 1:
            return False, Z
    return True, None


def check_join_preservation(S, T, phi):
    """``phi(join Z) == join(phi Z)`` for every compatible ``Z`` of ``S`` that has a join."""
    report = Report("join-preservation")
    for (C, U), Z in sorted(compatible_states(S).items(), key=lambda kv: (len(kv[1]), kv[1])):
        j = _least(S, U)
        if j is None:
            continue
        image = sorted({int(phi[z]) for z in Z})
        if any(not T.compat[a, b] for a in image for b in image):
            report.add("image-compatible", Z)
            break
        if join(T, image) != int(phi[j]):
            report.add("join", Z, f"phi(join)={int(phi[j])}")
            break
    return report


def adjoin_unit(S):
    """Adjoin a fresh two-sided unit as the last element."""
    n = S.size
    mul = np.empty((n + 1, n + 1), dtype=np.int64)
    mul[:n, :n] = S.mul
    mul[n, :] = np.arange(n + 1)
    mul[:, n] = np.arange(n + 1)
    inv = np.append(S.inv, n)
    labels = None if S.labels is None else S.labels + ("1",)
    return InverseSemigroup(mul, inv, n, labels)


def check_semigroup_iso(S, T, phi):
    report = Report("semigroup-iso")
    phi = K.as_table(phi)
    if S.size != T.size or phi.shape != (S.size,) or sorted(phi.tolist()) != list(range(T.size)):
        report.add("bijection", tuple(phi.tolist()))
        return report
    a, b = K.hom_violation(S.mul, T.mul, phi)
    if a >= 0:
        report.add("multiplication", (a, b))
    return report


def check_homomorphism(S, T, phi):
    report = Report("homomorphism")
    phi = K.as_table(phi)
    if phi.shape != (S.size,) or (S.size and (phi.min() < 0 or phi.max() >= T.size)):
        report.add("shape", tuple(phi.tolist()))
        return report
    a, b = K.hom_violation(S.mul, T.mul, phi)
    if a >= 0:
        report.add("multiplication", (a, b))
    return report


# ----------------------------------------------------------------------------
# pseudogroups


class Pseudogroup:
    """A set of partial homeomorphisms closed under composition and inversion."""

    def __init__(self, space, elements):
        self.space = space
        self.elements = tuple(sorted(set(elements), key=PartialBijection.sort_key))
        self.index = {h: i for i, h in enumerate(self.elements)}
        n = len(self.elements)
        mul = np.empty((n, n), dtype=np.int64)
        inv = np.empty(n, dtype=np.int64)
        for i, h in enumerate(self.elements):
            try:
                inv[i] = self.index[invert(h)]
                for j, k in enumerate(self.elements):
                    mul[i, j] = self.index[compose(h, k)]
            except KeyError as exc:
                raise ValueError("element set is not closed under composition and inversion") from exc
        self.mul = mul
        self.inv = inv

    def __len__(self):
        return len(self.elements)

    def __contains__(self, h):
        return h in self.index

    @cached_property
    def is_full(self):
        return all(identity(self.space, u) in self.index for u in self.space.opens)

    @cached_property
    def is_complete(self):
        if not self.is_full:
            return False
        opens = self.space.opens
        for h in all_partial_homeomorphisms(self.space):
            if h in self.index:
                continue
            cover = 0
            for u in opens:
                if u & ~h.domain == 0 and restrict(h, u) in self.index:
                    cover |= u
            if cover == h.domain:
                return False
        return True


def generate_pseudogroup(space, generators):
    elems = set(generators)
    elems |= {invert(h) for h in elems}
    work = list(elems)
    while work:
        h = work.pop()
        new = []
        for k in list(elems):
            for c in (compose(h, k), compose(k, h)):
                if c not in elems:
                    new.append(c)
        for c in new:
            for x in (c, invert(c)):
                if x not in elems:
                    elems.add(x)
                    work.append(x)
    return Pseudogroup(space, elems)


def symmetric_inverse_monoid(space):
    return Pseudogroup(space, all_partial_homeomorphisms(space))


def abstract_from_pseudogroup(P):
    """Cayley-table view of ``P``; element ``i`` is ``P.elements[i]``."""
    full = identity(P.space, P.space.full)
    unit = P.index.get(full)
    labels = tuple(repr(h) for h in P.elements)
    return InverseSemigroup(P.mul, P.inv, unit, labels), P.elements


def wagner_preston(S):
    """Right regular representation of ``S`` on the discrete space ``S``.

    ``s`` acts by ``x -> x*s`` on ``{x : x*s*s^-1 = x}``; with left-to-right
    composition this is a homomorphism (the left action would reverse
    products).
    """
    from .representation import Representation

    n = S.size
    space = discrete(n)
    mul, inv = S.mul, S.inv
    assign = []
    for s in range(n):
        m = [-1] * n
        for x in range(n):
            if mul[mul[x, s], inv[s]] == x:
                m[x] = int(mul[x, s])
        assign.append(PartialBijection(space, tuple(m)))
    rep = Representation(S, space, tuple(assign))
    return Pseudogroup(space, assign), rep


# ----------------------------------------------------------------------------
# table constructors


def semigroup_from_function(elements, op, unit=None, labels=None):
    index = {x: i for i, x in enumerate(elements)}
    mul = [[index[op(a, b)] for b in elements] for a in elements]
    u = None if unit is None else index[unit]
    return from_table(mul, unit=u, labels=labels or [str(x) for x in elements])


def cyclic_group(n):
    return semigroup_from_function(list(range(n)), lambda a, b: (a + b) % n, unit=0)


def chain_semilattice(n):
    """``{0 < 1 < ... < n-1}`` under min; ``n-1`` is the unit."""
    return semigroup_from_function(list(range(n)), min, unit=n - 1 if n else None)


def direct_product(S, T):
    pairs = [(a, b) for a in range(S.size) for b in range(T.size)]
    unit = None
    if S.unit is not None and T.unit is not None:
        unit = (S.unit, T.unit)
    return semigroup_from_function(pairs, lambda x, y: (S.m(x[0], y[0]), T.m(x[1], y[1])), unit=unit)


def symmetric_group(n):
    perms = list(permutations(range(n)))
    # left-to-right: (p q)(i) = q(p(i))
    return semigroup_from_function(perms, lambda p, q: tuple(q[p[i]] for i in range(n)), unit=tuple(range(n)))


def brandt(n):
    """Combinatorial Brandt semigroup: zero plus matrix units ``(i, j)``."""
    elems = ["0"] + [(i, j) for i in range(n) for j in range(n)]

    def op(a, b):
        if a == "0" or b == "0" or a[1] != b[0]:
            return "0"
        return (a[0], b[1])

    return semigroup_from_function(elems, op)


def adjoin_zero(S):
    n = S.size
    mul = np.full((n + 1, n + 1), n, dtype=np.int64)
    mul[:n, :n] = S.mul
    inv = np.append(S.inv, n)
    return InverseSemigroup(mul, inv, S.unit)
