"""Finite topological spaces.

Subsets of the point set ``{0, ..., n-1}`` are Python ints used as bitsets.
A finite space is an Alexandrov space, so its topology is pinned down by the
minimal open neighbourhood of each point; that is what :class:`FiniteSpace`
stores.  The full family of opens is available as :attr:`FiniteSpace.opens`,
enumerated on first access.
"""

from dataclasses import dataclass
from functools import cached_property

from .report import InvalidStructure, Report


def bits(mask):
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def mask_of(points):
    m = 0
    for p in points:
        m |= 1 << int(p)
    return m


def popcount(mask):
    return bin(mask).count("1")


@dataclass(frozen=True)
class FiniteSpace:
    point_count: int
    nbhd: tuple

    @property
    def full(self):
        return (1 << self.point_count) - 1

    def points(self):
        return range(self.point_count)

    def is_open(self, subset):
        if subset & ~self.full:
            return False
        return all(self.nbhd[p] & ~subset == 0 for p in bits(subset))

    def interior(self, subset):
        out = 0
        for p in bits(subset & self.full):
            if self.nbhd[p] & ~subset == 0:
                out |= 1 << p
        return out

    def saturate(self, subset):
        """Smallest open set containing ``subset``."""
        out = 0
        for p in bits(subset):
            out |= self.nbhd[p]
        return out

    @cached_property
    def opens(self):
        """All open sets, ascending by bitset value."""
        return tuple(sorted(_grow_opens(self.nbhd, self.point_count)))

    def opens_within(self, subset):
        """All open subsets of the open set ``subset``, ascending."""
        return tuple(sorted(_grow_opens(self.nbhd, self.point_count, within=subset)))

    def is_discrete(self):
        return all(self.nbhd[p] == 1 << p for p in self.points())

    def subspace_nbhd(self, subset, p):
        return self.nbhd[p] & subset

    @classmethod
    def from_opens(cls, point_count, opens):
        report = verify_topology(point_count, sorted(set(opens)))
        if not report.valid:
            raise InvalidStructure(report)
        return _from_valid_opens(point_count, opens)

    def __repr__(self):
        return f"FiniteSpace(point_count={self.point_count}, nbhd={self.nbhd})"


def _from_valid_opens(point_count, opens):
    full = (1 << point_count) - 1
    nb = []
    for p in range(point_count):
        m = full
        for u in opens:
            if u >> p & 1:
                m &= u
        nb.append(m)
    return FiniteSpace(point_count, tuple(nb))


def _grow_opens(nbhd, n, within=None):
    # Every open is a union of minimal neighbourhoods; grow from the empty set
    # one neighbourhood at a time.
    cap = (1 << n) - 1 if within is None else within
    cands = [nbhd[p] for p in range(n) if nbhd[p] & ~cap == 0]
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for c in cands:
            w = u | c
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def discrete(n):
    return FiniteSpace(n, tuple(1 << p for p in range(n)))


def indiscrete(n):
    full = (1 << n) - 1
    return FiniteSpace(n, tuple(full for _ in range(n)))


def sierpinski():
    """Points a=0 (open) and b=1; opens are {}, {a}, {a, b}."""
    return FiniteSpace(2, (0b01, 0b11))


def topological_sum(x, y):
    shift = x.point_count
    nb = x.nbhd + tuple(m << shift for m in y.nbhd)
    return FiniteSpace(x.point_count + y.point_count, nb)


def verify_topology(point_count, opens):
    """Check a candidate open family; every violated axiom gets a witness."""
    report = Report("space")
    if point_count < 0:
        report.add("point-count", (point_count,))
        return report
    full = (1 << point_count) - 1
    fam = list(opens)
    for u in fam:
        if u < 0 or u & ~full:
            report.add("bitset-range", (u,), "subset mentions points outside the space")
    if 0 not in fam:
        report.add("empty-set", (0,))
    if full not in fam:
        report.add("full-set", (full,))
    seen = set()
    for u in fam:
        if u in seen:
            report.add("duplicate", (u,))
        seen.add(u)
    if any(a > b for a, b in zip(fam, fam[1:])):
        report.add("canonical-order", tuple(fam))
    members = sorted(seen)
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            if a | b not in seen:
                report.add("union", (a, b), f"missing {a | b}")
            if a & b not in seen:
                report.add("intersection", (a, b), f"missing {a & b}")
    return report


def verify_neighbourhoods(point_count, nbhd):
    """Check that ``nbhd`` lists the minimal open neighbourhoods of some topology."""
    report = Report("space")
    full = (1 << point_count) - 1
    if len(nbhd) != point_count:
        report.add("point-count", (len(nbhd), point_count))
        return report
    for p, m in enumerate(nbhd):
        if m < 0 or m & ~full:
            report.add("bitset-range", (p,))
        elif not m >> p & 1:
            report.add("nbhd-contains-point", (p,))
    if not report.valid:
        return report
    for p, m in enumerate(nbhd):
        for q in bits(m):
            if nbhd[q] & ~m:
                report.add("nbhd-transitive", (p, q), "a neighbour's neighbourhood is not inside")
                break
    return report


def generate_topology(point_count, generators):
    """Smallest topology on ``point_count`` points containing ``generators``."""
    full = (1 << point_count) - 1
    gens = list(generators)
    for g in gens:
        if g < 0 or g & ~full:
            raise ValueError(f"generator {g} is not a subset of the point set")
    nb = []
    for p in range(point_count):
        m = full
        for g in gens:
            if g >> p & 1:
                m &= g
        nb.append(m)
    return FiniteSpace(point_count, tuple(nb))


def is_t0(space):
    # Two points share all their open neighbourhoods iff their minimal
    # neighbourhoods coincide.
    return len(set(space.nbhd)) == space.point_count


def image(f, subset):
    out = 0
    for p in bits(subset):
        out |= 1 << f[p]
    return out


def preimage(f, subset):
    out = 0
    for p, q in enumerate(f):
        if q >= 0 and subset >> q & 1:
            out |= 1 << p
    return out


def is_continuous(f, source, target):
    """``f`` (a sequence of target points) is continuous iff it maps every
    minimal neighbourhood into the minimal neighbourhood of the image."""
    return all(image(f, source.nbhd[p]) & ~target.nbhd[f[p]] == 0 for p in source.points())


def is_open_map(f, source, target):
    return all(target.is_open(image(f, source.nbhd[p])) for p in source.points())


def all_topologies(n):
    """Every topology on ``n`` labelled points (brute force; n <= 4)."""
    if n > 4:
        raise ValueError("all_topologies is exhaustive; n must be <= 4")
    full = (1 << n) - 1
    middle = [u for u in range(1, full)]
    out = []
    for choice in range(1 << len(middle)):
        fam = {0, full}
        for i, u in enumerate(middle):
            if choice >> i & 1:
                fam.add(u)
        if all(a | b in fam and a & b in fam for a in fam for b in fam):
            out.append(_from_valid_opens(n, fam))
    return out
