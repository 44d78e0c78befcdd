"""Finite topological groupoids.

Arrows compose left to right: ``(x, y)`` is composable iff ``r(x) == d(y)``,
and then ``d(xy) = d(x)``, ``r(xy) = r(y)``.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .fintop import FiniteSpace, bits, discrete, image, is_continuous, popcount, topological_sum
from .invsemi import InverseSemigroup, PartialBijection
from .report import CharacterizationMismatch, PreconditionError, Report, SizeGuardError

ISO_ARROW_LIMIT = 64


@dataclass(frozen=True)
class FiniteGroupoid:
    objects: FiniteSpace
    arrows: FiniteSpace
    d: tuple
    r: tuple
    u: tuple
    i: tuple
    pairs: tuple  # composable pairs (x, y), sorted
    prod: tuple  # prod[k] = pairs[k][0] * pairs[k][1]
    labels: tuple = field(default=None, compare=False)

    @cached_property
    def table(self):
        return dict(zip(self.pairs, self.prod))

    def m(self, x, y):
        return self.table[(x, y)]

    @property
    def arrow_count(self):
        return self.arrows.point_count

    @property
    def object_count(self):
        return self.objects.point_count

    @cached_property
    def unit_mask(self):
        out = 0
        for x in self.u:
            out |= 1 << x
        return out

    def non_unit_arrows(self):
        return [x for x in range(self.arrow_count) if not self.unit_mask >> x & 1]


def make_groupoid(objects, arrows, d, r, u, i, product):
    """Assemble a groupoid from structure maps and a product callable."""
    pairs = tuple(sorted((x, y) for x in range(arrows.point_count) for y in range(arrows.point_count) if r[x] == d[y]))
    prod = tuple(product(x, y) for x, y in pairs)
    return FiniteGroupoid(objects, arrows, tuple(d), tuple(r), tuple(u), tuple(i), pairs, prod)


def verify_groupoid(G):
    report = Report("groupoid")
    n0, n1 = G.object_count, G.arrow_count
    if not (len(G.d) == len(G.r) == len(G.i) == n1 and len(G.u) == n0 and len(G.prod) == len(G.pairs)):
        report.add("shape")
        return report
    if any(not 0 <= a < n0 for a in G.d + G.r) or any(not 0 <= x < n1 for x in G.u + G.i + G.prod):
        report.add("index-range")
        return report
    expected = {(x, y) for x in range(n1) for y in range(n1) if G.r[x] == G.d[y]}
    given = list(G.pairs)
    if len(set(given)) != len(given) or set(given) != expected:
        extra = sorted(set(given) - expected)
        missing = sorted(expected - set(given))
        report.add("composable-pairs", tuple(extra[:1] + missing[:1]))
        return report
    m = G.table
    for a in range(n0):
        if G.d[G.u[a]] != a or G.r[G.u[a]] != a:
            report.add("unit-ends", (a,))
    for x in range(n1):
        if G.d[G.i[x]] != G.r[x] or G.r[G.i[x]] != G.d[x]:
            report.add("inverse-ends", (x,))
    if not report.valid:
        return report
    for (x, y), z in m.items():
        if G.d[z] != G.d[x] or G.r[z] != G.r[y]:
            report.add("product-ends", (x, y))
    for x in range(n1):
        if m[(G.u[G.d[x]], x)] != x:
            report.add("left-unit", (x,))
        if m[(x, G.u[G.r[x]])] != x:
            report.add("right-unit", (x,))
        if m[(x, G.i[x])] != G.u[G.d[x]]:
            report.add("right-inverse", (x,))
        if m[(G.i[x], x)] != G.u[G.r[x]]:
            report.add("left-inverse", (x,))
    if not report.valid:
        return report
    for (x, y), xy in m.items():
        for z in range(n1):
            if G.d[z] == G.r[y] and m[(xy, z)] != m[(x, m[(y, z)])]:
                report.add("associativity", (x, y, z))
                break
        if not report.valid:
            break
    report.extend(verify_continuity(G))
    return report


def verify_continuity(G):
    report = Report("groupoid-continuity")
    A, O = G.arrows, G.objects
    for name, f, src, tgt in (("d", G.d, A, O), ("r", G.r, A, O), ("i", G.i, A, A), ("u", G.u, O, A)):
        if not is_continuous(f, src, tgt):
            bad = next(p for p in src.points() if image(f, src.nbhd[p]) & ~tgt.nbhd[f[p]])
            report.add(f"continuity-{name}", (bad,))
    m = G.table
    for (x, y), z in m.items():
        nx, ny, nz = A.nbhd[x], A.nbhd[y], A.nbhd[z]
        for x2 in bits(nx):
            for y2 in bits(ny):
                p = m.get((x2, y2))
                if p is not None and not nz >> p & 1:
                    report.add("continuity-m", (x, y))
                    return report
    return report


class EtaleResult(tuple):
    __slots__ = ()

    def __new__(cls, etale, by_open_unit, by_local_homeo):
        return super().__new__(cls, (etale, by_open_unit, by_local_homeo))

    etale = property(lambda self: self[0])
    by_open_unit = property(lambda self: self[1])
    by_local_homeo = property(lambda self: self[2])


def _d_open_and_units_open(G):
    A, O = G.arrows, G.objects
    d_open = all(O.is_open(image(G.d, A.nbhd[x])) for x in A.points())
    return d_open and A.is_open(G.unit_mask)


def _d_local_homeo(G):
    # In a finite space the minimal neighbourhood N(x) is the smallest open
    # containing x, so if any open neighbourhood works then N(x) does.
    A, O = G.arrows, G.objects
    for x in A.points():
        w = A.nbhd[x]
        pts = list(bits(w))
        if len({G.d[p] for p in pts}) != len(pts):
            return False
        if not O.is_open(image(G.d, w)):
            return False
        for p in pts:
            if image(G.d, A.nbhd[p]) != O.nbhd[G.d[p]]:
                return False
    return True


def is_etale(G):
    a = _d_open_and_units_open(G)
    b = _d_local_homeo(G)
    if a != b:
        raise CharacterizationMismatch("the two etale characterizations disagree", G)
    return EtaleResult(a, a, b)


# ----------------------------------------------------------------------------
# bisections


@dataclass(frozen=True, eq=False)
class Bisections:
    groupoid: FiniteGroupoid
    sets: tuple  # bitsets of arrows, element order of the semigroup
    semigroup: InverseSemigroup

    @cached_property
    def index(self):
        return {b: k for k, b in enumerate(self.sets)}


def is_bisection(G, subset):
    pts = list(bits(subset))
    return (
        G.arrows.is_open(subset)
        and len({G.d[x] for x in pts}) == len(pts)
        and len({G.r[x] for x in pts}) == len(pts)
    )


def enumerate_bisections(G):
    A = G.arrows
    cands = [A.nbhd[x] for x in A.points()]
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for c in cands:
            w = v | c
            if w not in seen and is_bisection(G, w):
                seen.add(w)
                stack.append(w)
    return sorted(seen, key=lambda b: (popcount(b), b))


def bisection_product(G, v, w):
    out = 0
    m = G.table
    for x in bits(v):
        for y in bits(w):
            if G.r[x] == G.d[y]:
                out |= 1 << m[(x, y)]
    return out


def bisection_inverse(G, v):
    return image(G.i, v)


def local_bisections(G):
    """The inverse monoid I(G) of open bisections under pointwise product."""
    if not is_etale(G).etale:
        raise PreconditionError("groupoid is not etale")
    sets = enumerate_bisections(G)
    index = {b: k for k, b in enumerate(sets)}
    n = len(sets)
    mul = np.empty((n, n), dtype=np.int64)
    inv = np.empty(n, dtype=np.int64)
    for a, v in enumerate(sets):
        inv[a] = index[bisection_inverse(G, v)]
        for b, w in enumerate(sets):
            p = bisection_product(G, v, w)
            if p not in index:
                raise PreconditionError("product of bisections is not a bisection", (v, w))
            mul[a, b] = index[p]
    unit = index[G.unit_mask]
    labels = tuple(str(sorted(bits(v))) for v in sets)
    return Bisections(G, tuple(sets), InverseSemigroup(mul, inv, unit, labels))


def canonical_representation(G, bis=None):
    """``rho_G(V): d(V) -> r(V)``, ``d(x) -> r(x)``."""
    from .representation import Representation

    bis = bis or local_bisections(G)
    O = G.objects
    assign = []
    for v in bis.sets:
        m = [-1] * O.point_count
        for x in bits(v):
            m[G.d[x]] = G.r[x]
        assign.append(PartialBijection(O, tuple(m)))
    return Representation(bis.semigroup, O, tuple(assign))


# ----------------------------------------------------------------------------
# standard groupoids


def pair_groupoid(space):
    if isinstance(space, int):
        space = discrete(space)
    if not space.is_discrete():
        raise PreconditionError("pair groupoid needs a discrete space")
    n = space.point_count
    arrows = discrete(n * n)
    d = [x // n for x in range(n * n)]
    r = [x % n for x in range(n * n)]
    u = [a * n + a for a in range(n)]
    i = [(x % n) * n + x // n for x in range(n * n)]
    return make_groupoid(space, arrows, d, r, u, i, lambda x, y: (x // n) * n + y % n)


def unit_groupoid(space):
    n = space.point_count
    ident = list(range(n))
    return make_groupoid(space, space, ident, ident, ident, ident, lambda x, y: x)


def group_groupoid(S, arrow_space=None):
    """A group as a one-object groupoid (discrete arrows unless given)."""
    n = S.size
    arrows = arrow_space or discrete(n)
    z = [0] * n
    return make_groupoid(
        discrete(1), arrows, z, z, [S.unit], [int(S.inv[x]) for x in range(n)], lambda x, y: int(S.mul[x, y])
    )


def disjoint_union(G, H):
    a0, a1 = G.object_count, G.arrow_count
    O = topological_sum(G.objects, H.objects)
    A = topological_sum(G.arrows, H.arrows)
    d = G.d + tuple(a + a0 for a in H.d)
    r = G.r + tuple(a + a0 for a in H.r)
    u = G.u + tuple(x + a1 for x in H.u)
    i = G.i + tuple(x + a1 for x in H.i)
    pairs = G.pairs + tuple((x + a1, y + a1) for x, y in H.pairs)
    prod = G.prod + tuple(z + a1 for z in H.prod)
    order = sorted(range(len(pairs)), key=lambda k: pairs[k])
    return FiniteGroupoid(O, A, d, r, u, i, tuple(pairs[k] for k in order), tuple(prod[k] for k in order))


def relabel(G, obj_perm, arrow_perm):
    """Transport ``G`` along bijections old -> new."""
    n0, n1 = G.object_count, G.arrow_count
    oinv = [0] * n0
    for a, b in enumerate(obj_perm):
        oinv[b] = a
    ainv = [0] * n1
    for x, y in enumerate(arrow_perm):
        ainv[y] = x
    O = FiniteSpace(n0, tuple(image(obj_perm, G.objects.nbhd[oinv[b]]) for b in range(n0)))
    A = FiniteSpace(n1, tuple(image(arrow_perm, G.arrows.nbhd[ainv[y]]) for y in range(n1)))
    d = [obj_perm[G.d[ainv[y]]] for y in range(n1)]
    r = [obj_perm[G.r[ainv[y]]] for y in range(n1)]
    u = [arrow_perm[G.u[oinv[b]]] for b in range(n0)]
    i = [arrow_perm[G.i[ainv[y]]] for y in range(n1)]
    return make_groupoid(O, A, d, r, u, i, lambda x, y: arrow_perm[G.m(ainv[x], ainv[y])])


# ----------------------------------------------------------------------------
# isomorphisms


def check_groupoid_iso(G, H, obj_map, arrow_map):
    report = Report("groupoid-iso")
    n0, n1 = G.object_count, G.arrow_count
    if (
        H.object_count != n0
        or H.arrow_count != n1
        or sorted(obj_map) != list(range(n0))
        or sorted(arrow_map) != list(range(n1))
    ):
        report.add("bijection")
        return report
    f0, f1 = obj_map, arrow_map
    for x in range(n1):
        if f0[G.d[x]] != H.d[f1[x]]:
            report.add("d", (x,))
        if f0[G.r[x]] != H.r[f1[x]]:
            report.add("r", (x,))
        if f1[G.i[x]] != H.i[f1[x]]:
            report.add("i", (x,))
    for a in range(n0):
        if f1[G.u[a]] != H.u[f0[a]]:
            report.add("u", (a,))
    for (x, y), z in G.table.items():
        if H.table.get((f1[x], f1[y])) != f1[z]:
            report.add("m", (x, y))
            break
    for p in range(n0):
        if image(f0, G.objects.nbhd[p]) != H.objects.nbhd[f0[p]]:
            report.add("homeomorphism-objects", (p,))
            break
    for p in range(n1):
        if image(f1, G.arrows.nbhd[p]) != H.arrows.nbhd[f1[p]]:
            report.add("homeomorphism-arrows", (p,))
            break
    return report


def _object_profile(G, a):
    return (
        popcount(G.objects.nbhd[a]),
        sum(1 for p in G.objects.points() if G.objects.nbhd[p] >> a & 1),
        sum(1 for x in range(G.arrow_count) if G.d[x] == a),
        sum(1 for x in range(G.arrow_count) if G.d[x] == a and G.r[x] == a),
    )


def _arrow_profile(G, x):
    return (
        popcount(G.arrows.nbhd[x]),
        sum(1 for p in G.arrows.points() if G.arrows.nbhd[p] >> x & 1),
        bool(G.unit_mask >> x & 1),
        G.i[x] == x,
        _object_profile(G, G.d[x]),
        _object_profile(G, G.r[x]),
    )


def groupoid_isomorphic(G, H, max_arrows=ISO_ARROW_LIMIT):
    """Lexicographically least isomorphism ``(obj_map, arrow_map)`` or ``None``."""
    if max(G.arrow_count, H.arrow_count) > max_arrows:
        raise SizeGuardError(f"isomorphism search capped at {max_arrows} arrows", G.arrow_count)
    if G.object_count != H.object_count or G.arrow_count != H.arrow_count:
        return None
    n0, n1 = G.object_count, G.arrow_count
    gp0 = [_object_profile(G, a) for a in range(n0)]
    hp0 = [_object_profile(H, a) for a in range(n0)]
    gp1 = [_arrow_profile(G, x) for x in range(n1)]
    hp1 = [_arrow_profile(H, x) for x in range(n1)]
    if sorted(gp0) != sorted(hp0) or sorted(gp1) != sorted(hp1):
        return None

    f0 = [-1] * n0
    used0 = [False] * n0
    GO, HO = G.objects, H.objects

    def objects_ok(a):
        b = f0[a]
        for c in range(n0):
            if f0[c] < 0:
                continue
            if bool(GO.nbhd[a] >> c & 1) != bool(HO.nbhd[b] >> f0[c] & 1):
                return False
            if bool(GO.nbhd[c] >> a & 1) != bool(HO.nbhd[f0[c]] >> b & 1):
                return False
        return True

    result = []

    def assign_objects(a):
        if a == n0:
            arrows = assign_arrows()
            if arrows is not None:
                result.append((tuple(f0), arrows))
                return True
            return False
        for b in range(n0):
            if used0[b] or hp0[b] != gp0[a]:
                continue
            f0[a] = b
            used0[b] = True
            if objects_ok(a) and assign_objects(a + 1):
                return True
            f0[a] = -1
            used0[b] = False
        return False

    def assign_arrows():
        f1 = [-1] * n1
        used1 = [False] * n1
        for a in range(n0):
            f1[G.u[a]] = H.u[f0[a]]
            used1[H.u[f0[a]]] = True
        GA, HA = G.arrows, H.arrows
        gm, hm = G.table, H.table

        def ok(x):
            y = f1[x]
            if f1[G.i[x]] >= 0 and f1[G.i[x]] != H.i[y]:
                return False
            for z in range(n1):
                w = f1[z]
                if w < 0:
                    continue
                if bool(GA.nbhd[x] >> z & 1) != bool(HA.nbhd[y] >> w & 1):
                    return False
                if bool(GA.nbhd[z] >> x & 1) != bool(HA.nbhd[w] >> y & 1):
                    return False
                for p, q in ((x, z), (z, x)):
                    pq = gm.get((p, q))
                    if pq is not None and f1[pq] >= 0 and hm.get((f1[p], f1[q])) != f1[pq]:
                        return False
            return True

        order = [x for x in range(n1) if f1[x] < 0]

        def go(k):
            if k == len(order):
                return True
            x = order[k]
            dx, rx = f0[G.d[x]], f0[G.r[x]]
            for y in range(n1):
                if used1[y] or H.d[y] != dx or H.r[y] != rx or hp1[y] != gp1[x]:
                    continue
                f1[x] = y
                used1[y] = True
                if ok(x) and go(k + 1):
                    return True
                f1[x] = -1
                used1[y] = False
            return False

        if not all(ok(G.u[a]) for a in range(n0)):
            return None
        return tuple(f1) if go(0) else None

    assign_objects(0)
    if not result:
        return None
    iso = result[0]
    if not check_groupoid_iso(G, H, *iso).valid:
        raise CharacterizationMismatch("isomorphism search returned an invalid map", iso)
    return iso
