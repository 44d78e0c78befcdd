"""Germ groupoids of representations, and the round trips and equivalences that tie them to I(G)."""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .fintop import bits, generate_topology, popcount
from .groupoid import (
    FiniteGroupoid,
    check_groupoid_iso,
    is_etale,
    local_bisections,
    canonical_representation,
    make_groupoid,
    verify_groupoid,
)
from .invsemi import (
    MAX_ORDER_SEARCH,
    check_complete,
    check_infinitely_distributive,
    check_semigroup_iso,
    is_compatible,
    is_compatibly_prime,
    join,
)
from .report import (
    CharacterizationMismatch,
    InvalidStructure,
    NotWideError,
    PreconditionError,
    Report,
    SizeGuardError,
)
from .representation import classify, extend_to_unit, mx_quotient, uncovered_points

FILTER_BRUTE_FORCE_LIMIT = 16


@dataclass(frozen=True)
class Germ:
    base: int
    members: frozenset


def germ_at(rep, s, x):
    """Germ of ``s`` at ``x`` by direct search over pairs ``(t, f)``."""
    if not rep.dom(s) >> x & 1:
        raise PreconditionError(f"point {x} is outside the domain of element {s}", (s, x))
    S = rep.semigroup
    wit = [int(f) for f in S.idempotents if rep.dom(int(f)) >> x & 1]
    members = frozenset(
        t
        for t in range(S.size)
        if rep.dom(t) >> x & 1 and any(S.mul[f, t] == S.mul[f, s] for f in wit)
    )
    return Germ(x, members)


def germ_classes(rep, elements=None):
    """Map ``(x, s) -> class id`` and list the classes as ``(x, frozenset)``.

    ``elements`` restricts which elements are considered (default: all).
    """
    S = rep.semigroup
    idem = [int(f) for f in S.idempotents]
    elements = range(S.size) if elements is None else elements
    lookup = {}
    classes = []
    for x in rep.space.points():
        wit = np.array([f for f in idem if rep.dom(f) >> x & 1], dtype=np.int64)
        elems = np.array([s for s in elements if rep.dom(s) >> x & 1], dtype=np.int64)
        if not len(elems):
            continue
        labels = K.witness_labels(S.mul, wit, elems)
        groups = {}
        for s, lab in zip(elems.tolist(), labels.tolist()):
            groups.setdefault(lab, []).append(s)
        for lab in sorted(groups):
            cid = len(classes)
            classes.append((x, frozenset(groups[lab])))
            for s in groups[lab]:
                lookup[(x, s)] = cid
    return lookup, classes


@dataclass(frozen=True, eq=False)
class GermGroupoid:
    groupoid: FiniteGroupoid
    arrows: tuple  # arrows[k] = (x, frozenset of S-elements)
    provenance: str
    representation: object
    lookup: dict = field(repr=False)  # (x, s) -> arrow index
    topologies_agree: object = None  # full provenance only

    def arrow_of(self, x, s):
        return self.lookup[(x, s)]

    def basic_open(self, s, u):
        """``V_{s,U}`` as a bitset of arrows."""
        out = 0
        for x in bits(u):
            out |= 1 << self.lookup[(x, s)]
        return out


def _directed_build(rep, unit_of, keep):
    """Assemble the germ groupoid of ``rep`` over the elements ``keep``.

    ``unit_of(x)`` names an element whose germ at ``x`` is the unit there.
    """
    S, X = rep.semigroup, rep.space
    lookup, classes = germ_classes(rep, keep)
    order = sorted(range(len(classes)), key=lambda c: (classes[c][0], min(classes[c][1])))
    rank = {c: k for k, c in enumerate(order)}
    arrows = tuple(classes[c] for c in order)
    lookup = {key: rank[c] for key, c in lookup.items()}
    rep_of = [min(cls) for _, cls in arrows]

    d = [x for x, _ in arrows]
    r = [rep.assign[s](x) for (x, _), s in zip(arrows, rep_of)]
    i = [lookup[(r[k], int(S.inv[s]))] for k, s in enumerate(rep_of)]
    u = [lookup[(x, unit_of(x))] for x in X.points()]

    def product(a, b):
        return lookup[(d[a], int(S.mul[rep_of[a], rep_of[b]]))]

    gens = []
    for s in keep:
        for x in bits(rep.dom(s)):
            gens.append(_basic(lookup, s, X.nbhd[x]))
    arrow_space = generate_topology(len(arrows), sorted(set(gens)))
    G = make_groupoid(X, arrow_space, d, r, u, i, product)
    return G, arrows, lookup


def _basic(lookup, s, u):
    out = 0
    for x in bits(u):
        out |= 1 << lookup[(x, s)]
    return out


def _topologies_agree(G, lookup, rep, keep):
    u_sets = [_basic(lookup, s, rep.dom(s)) for s in keep]
    other = generate_topology(G.arrow_count, sorted(set(u_sets)))
    return other == G.arrows


def germ_groupoid(rep, check=True):
    """Germ groupoid of a wide representation.

    Unital representations use their own unit.  Otherwise a unit is adjoined
    first and each arrow is labelled by the part of its class lying in the
    original semigroup.
    """
    bad = uncovered_points(rep)
    if bad:
        raise NotWideError("representation is not wide", next(bits(bad)))
    cls = classify(rep)
    provenance = "full" if cls.is_full else "unital" if cls.is_unital else "wide"
    S = rep.semigroup
    keep = list(range(S.size))
    if cls.is_unital:
        G, arrows, lookup = _directed_build(rep, lambda x: S.unit, keep)
    else:
        ext = extend_to_unit(rep)
        e = ext.semigroup.unit
        G, arrows_e, lookup_e = _directed_build(ext, lambda x: e, list(range(ext.semigroup.size)))
        arrows = tuple((x, members - {e}) for x, members in arrows_e)
        if any(not m for _, m in arrows):
            raise CharacterizationMismatch("an extended germ has no original member", arrows_e)
        lookup = {(x, s): k for (x, s), k in lookup_e.items() if s != e}
        _check_direct_units(rep, G, arrows, lookup)
    agree = _topologies_agree(G, lookup, rep, keep) if cls.is_full else None
    if check:
        report = verify_groupoid(G)
        if not report.valid:
            raise InvalidStructure(report)
        if not is_etale(G).etale:
            raise CharacterizationMismatch("germ groupoid is not etale", G)
    return GermGroupoid(G, arrows, provenance, rep, lookup, agree)


def _check_direct_units(rep, G, arrows, lookup):
    # Oracle: the unit at x is the germ of any idempotent defined at x.
    S = rep.semigroup
    for x in rep.space.points():
        for f in S.idempotents:
            f = int(f)
            if rep.dom(f) >> x & 1 and lookup[(x, f)] != G.u[x]:
                raise CharacterizationMismatch("unit germ differs from an idempotent germ", (x, f))


# ----------------------------------------------------------------------------
# isomorphism witnesses


@dataclass
class GroupoidIso:
    source: object
    target: object
    obj_map: tuple
    arrow_map: tuple
    report: Report

    @property
    def valid(self):
        return self.report.valid

    def to_dict(self):
        return {"objects": list(self.obj_map), "arrows": list(self.arrow_map), **self.report.to_dict()}


def _groupoid_of(g):
    return g.groupoid if isinstance(g, GermGroupoid) else g


def _iso(source, target, obj_map, arrow_map, report=None):
    if report is None:
        report = Report("groupoid-iso")
    G, H = _groupoid_of(source), _groupoid_of(target)
    if -1 in arrow_map:
        report.add("bijection", (arrow_map.index(-1),), "arrow without an image")
    else:
        report.extend(check_groupoid_iso(G, H, obj_map, arrow_map))
    return GroupoidIso(source, target, tuple(obj_map), tuple(arrow_map), report)


def equiv_wide_unital(rep):
    """Germs of ``(S, rho)`` against germs of ``(S_e, rho_e)``."""
    left = germ_groupoid(rep)
    ext = extend_to_unit(rep)
    right = germ_groupoid(ext)
    e = ext.semigroup.unit
    report = Report("wide-unital")
    amap = [-1] * left.groupoid.arrow_count
    for k, (x, members) in enumerate(left.arrows):
        target = right.lookup[(x, min(members))]
        if right.arrows[target][1] - {e} != members:
            report.add("germ-enrichment", (x, min(members)), "extended class does not restrict to the original")
        amap[k] = target
    if len(set(amap)) != len(amap):
        report.add("injective")
    return _iso(left, right, tuple(rep.space.points()), amap, report)


def equiv_unital_mx(rep):
    """Germs of ``(M, rho)`` against germs of ``(M_X, rho_X)`` via ``germ_x [U,s] -> germ_x s``."""
    if not classify(rep).is_unital:
        raise PreconditionError("representation is not unital", rep.semigroup.unit)
    left = germ_groupoid(rep)
    mx = mx_quotient(rep)
    right = germ_groupoid(mx.representation)
    report = Report("unital-mx")
    # [U, s] with x in U has germ equal to germ_x s
    back = {}
    for (x, c), k in right.lookup.items():
        u, s = mx.classes[c].representative
        back.setdefault(k, set()).add(left.lookup[(x, s)])
    amap = [-1] * left.groupoid.arrow_count
    for k, images in back.items():
        if len(images) != 1:
            report.add("well-defined", (k,), "one M_X germ maps to several M germs")
            continue
        (src,) = images
        if amap[src] != -1 and amap[src] != k:
            report.add("injective", (src, amap[src], k))
        amap[src] = k
    for s in range(rep.semigroup.size):
        for x in bits(rep.dom(s)):
            if amap[left.lookup[(x, s)]] != right.lookup[(x, mx.class_index(rep.dom(s), s))]:
                report.add("embedding", (x, s))
    for s in range(rep.semigroup.size):
        for u in rep.space.opens_within(rep.dom(s)):
            if _image_set(amap, left.basic_open(s, u)) != right.basic_open(mx.class_index(u, s), u):
                report.add("basic-open", (s, u))
    return _iso(left, right, tuple(rep.space.points()), amap, report)


def _image_set(f, subset):
    out = 0
    for p in bits(subset):
        out |= 1 << f[p]
    return out


def roundtrip_groupoid(G):
    """``G`` against the germs of ``(I(G), rho_G)``."""
    if not is_etale(G).etale:
        raise PreconditionError("groupoid is not etale")
    bis = local_bisections(G)
    rep = canonical_representation(G, bis)
    germs = germ_groupoid(rep)
    report = Report("roundtrip-groupoid")
    amap = [-1] * G.arrow_count
    for v_idx, v in enumerate(bis.sets):
        for x in bits(v):
            k = germs.lookup[(G.d[x], v_idx)]
            if amap[x] == -1:
                amap[x] = k
            elif amap[x] != k:
                report.add("well-defined", (x, v_idx), "germ depends on the chosen bisection")
    if len(set(amap)) != len(amap) or -1 in amap:
        report.add("bijection", tuple(amap))
    return _iso(G, germs, tuple(G.objects.points()), amap, report)


@dataclass
class SemigroupIso:
    phi: tuple  # element of S -> index of the bisection U_s
    bisections: object
    germs: GermGroupoid
    joins: dict  # bisection index -> compatible set Z with U_{join Z} = V
    report: Report

    @property
    def valid(self):
        return self.report.valid

    def to_dict(self):
        return {
            "phi": list(self.phi),
            "joins": {str(k): list(v) for k, v in sorted(self.joins.items())},
            **self.report.to_dict(),
        }


def roundtrip_semigroup(rep):
    """``S`` against ``I(Germs(S, rho))`` via ``s -> U_s``."""
    S = rep.semigroup
    cls = classify(rep)
    if not cls.is_full:
        raise PreconditionError("representation is not full", uncovered_points(rep) or None)
    comp = check_complete(S)
    if not comp.valid:
        raise PreconditionError("semigroup is not complete", comp.violations[0].witness)
    dist = check_infinitely_distributive(S)
    if not dist.valid:
        raise PreconditionError("semigroup is not infinitely distributive", dist.violations[0].witness)
    germs = germ_groupoid(rep)
    bis = local_bisections(germs.groupoid)
    report = Report("roundtrip-semigroup")
    phi = []
    for s in range(S.size):
        us = germs.basic_open(s, rep.dom(s))
        if us not in bis.index:
            report.add("U_s-bisection", (s,))
            return SemigroupIso(tuple(phi), bis, germs, {}, report)
        phi.append(bis.index[us])
    report.extend(check_semigroup_iso(S, bis.semigroup, phi))
    rho_g = canonical_representation(germs.groupoid, bis)
    for s in range(S.size):
        if rho_g.assign[phi[s]] != rep.assign[s]:
            report.add("representations-commute", (s,))
    # every bisection is the join of the U_s it contains
    joins = {}
    inv_phi = {b: s for s, b in enumerate(phi)}
    for b, v in enumerate(bis.sets):
        Z = tuple(s for s in range(S.size) if bis.sets[phi[s]] & ~v == 0)
        if any(not is_compatible(S, a, c) for a in Z for c in Z):
            report.add("join-compatible", (b, Z))
            continue
        j = join(S, Z)
        if j is None or phi[j] != b:
            report.add("surjective", (b,), "bisection is not the join of the U_s inside it")
        elif inv_phi.get(b) != j:
            report.add("injective", (b,))
        joins[b] = Z
    return SemigroupIso(tuple(phi), bis, germs, joins, report)


# ----------------------------------------------------------------------------
# compatibly prime filters


def principal_upsets(S):
    return sorted({S.up[a] for a in range(S.size)})


def _all_meets_exist(S):
    return all(
        _meet(S, a, b) is not None or not (S.leq[:, a] & S.leq[:, b]).any()
        for a in range(S.size)
        for b in range(a + 1, S.size)
    )


def directed_filters(S):
    """Nonempty upsets in which every pair has a lower bound in the set.

    On a finite semigroup these are exactly the principal upsets: a finite
    downward directed set has a least element.
    """
    return principal_upsets(S)


def meet_filters(S):
    """Nonempty upsets closed under those binary meets that exist."""
    if _all_meets_exist(S):
        # every such set contains the meet of all its members
        return principal_upsets(S)
    if S.size > FILTER_BRUTE_FORCE_LIMIT:
        raise SizeGuardError("meet-closed filter search needs all binary meets or a small semigroup", S.size)
    return [F for F in range(1, 1 << S.size) if _is_meet_filter(S, F)]


def _meet(S, a, b):
    lower = S.leq[:, a] & S.leq[:, b]
    cands = np.flatnonzero(lower)
    for c in cands:
        if all(S.leq[x, c] for x in cands):
            return int(c)
    return None


def _is_meet_filter(S, F):
    for a in bits(F):
        if S.up[a] & ~F:
            return False
        for b in bits(F):
            m = _meet(S, a, b)
            if m is not None and not F >> m & 1:
                return False
    return True


def _prime(S, fam):
    return [F for F in fam if is_compatibly_prime(S, F)[0]]


def _to_mask(members):
    out = 0
    for s in members:
        out |= 1 << s
    return out


@dataclass
class FilterMatch:
    germ_classes: list  # distinct germ classes as bitsets of elements
    prime_filters: list  # compatibly prime directed filters
    alternative: object  # compatibly prime meet-closed filters, or a note
    divergence: tuple  # filters on which the two variants disagree
    report: Report

    @property
    def matches(self):
        return self.report.valid

    def to_dict(self):
        return {
            "germ_classes": [sorted(bits(c)) for c in self.germ_classes],
            "prime_filters": [sorted(bits(c)) for c in self.prime_filters],
            "alternative": self.alternative
            if isinstance(self.alternative, str)
            else [sorted(bits(c)) for c in self.alternative],
            "divergence": [sorted(bits(c)) for c in self.divergence],
            **self.report.to_dict(),
        }


def compatibly_prime_filters(rep):
    """Compare germ classes of a full representation with compatibly prime filters."""
    S = rep.semigroup
    if S.size > MAX_ORDER_SEARCH:
        raise SizeGuardError("filter search capped", S.size)
    comp = check_complete(S)
    if not comp.valid:
        raise PreconditionError("semigroup is not complete", comp.violations[0].witness)
    if not classify(rep).is_full:
        raise PreconditionError("representation is not full")
    germs = germ_groupoid(rep)
    classes = sorted({_to_mask(m) for _, m in germs.arrows}, key=lambda c: (popcount(c), c))
    primes = sorted(_prime(S, directed_filters(S)), key=lambda c: (popcount(c), c))
    report = Report("compatibly-prime-filters")
    for c in sorted(set(classes) - set(primes)):
        report.add("germ-not-filter", tuple(bits(c)))
    for c in sorted(set(primes) - set(classes)):
        report.add("filter-not-germ", tuple(bits(c)))
    try:
        alt = sorted(_prime(S, meet_filters(S)), key=lambda c: (popcount(c), c))
    except SizeGuardError as err:
        alt = f"not computed: {err}"
    divergence = () if isinstance(alt, str) else tuple(sorted(set(alt) ^ set(primes)))
    return FilterMatch(classes, primes, alt, divergence, report)
