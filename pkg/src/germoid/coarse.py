"""Filters, ultrafilters and coarse structures on finite sets.

On a finite set every ultrafilter is principal, so the Stone-Cech
compactification is the set itself.  The maps below are still built literally
(restriction, enlargement, extension of partial bijections) and checked.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .fintop import bits, discrete, generate_topology, mask_of, popcount
from .groupoid import (
    canonical_representation,
    check_groupoid_iso,
    groupoid_isomorphic,
    is_etale,
    local_bisections,
    pair_groupoid,
)
from .invsemi import (
    PartialBijection,
    Pseudogroup,
    abstract_from_pseudogroup,
    all_partial_homeomorphisms,
    compose,
    invert,
)
from .report import NotUnitalError, PreconditionError, Report, SizeGuardError
from .representation import Representation, classify

FILTER_ENUM_LIMIT = 4


def subsets_of(mask):
    """Every subset of ``mask`` (as bitsets), ascending."""
    out = []
    sub = mask
    while True:
        out.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & mask
    return sorted(out)


@dataclass(frozen=True)
class Filter:
    """A filter on ``{0..n-1}``, or on the subset ``carrier`` of it."""

    base_size: int
    members: frozenset
    carrier: int = -1

    @property
    def universe(self):
        return (1 << self.base_size) - 1 if self.carrier < 0 else self.carrier

    @cached_property
    def core(self):
        out = self.universe
        for m in self.members:
            out &= m
        return out

    def __contains__(self, subset):
        return subset in self.members

    def is_principal(self):
        return popcount(self.core) == 1

    def point(self):
        return next(bits(self.core)) if self.is_principal() else None


def upset_filter(base_size, core, carrier=-1):
    universe = (1 << base_size) - 1 if carrier < 0 else carrier
    outside = universe & ~core
    return Filter(base_size, frozenset(core | a for a in subsets_of(outside)), carrier)


def principal_at(base_size, x):
    return upset_filter(base_size, 1 << x)


def verify_filter(F):
    report = Report("filter")
    U = F.universe
    if not F.members:
        report.add("nonempty")
        return report
    for m in sorted(F.members):
        if m & ~U:
            report.add("range", (m,))
    if 0 in F.members:
        report.add("empty-set", (0,))
    for m in sorted(F.members):
        for v in subsets_of(U):
            if m & ~v == 0 and v not in F.members:
                report.add("upward-closed", (m, v))
                break
    ms = sorted(F.members)
    for i, a in enumerate(ms):
        for b in ms[i:]:
            if a & b not in F.members:
                report.add("intersection", (a, b))
    return report


def enumerate_filters(base_size):
    """Every filter on ``base_size`` points, by checking every family of subsets."""
    if base_size > FILTER_ENUM_LIMIT:
        raise SizeGuardError(f"exhaustive filter search capped at {FILTER_ENUM_LIMIT} points", base_size)
    k = 1 << base_size  # number of subsets
    fam = np.arange(1 << k, dtype=np.int64)
    has = [(fam >> u & 1).astype(bool) for u in range(k)]
    ok = fam != 0
    ok &= ~has[0]
    for u in range(k):
        for v in range(k):
            if u & ~v == 0:
                ok &= ~has[u] | has[v]
            ok &= ~(has[u] & has[v]) | has[u & v]
    out = []
    for f in fam[ok].tolist():
        out.append(Filter(base_size, frozenset(u for u in range(k) if f >> u & 1)))
    return sorted(out, key=lambda F: sorted(F.members))


@dataclass(frozen=True, eq=False)
class UltrafilterSpace:
    base_size: int
    ultrafilters: tuple  # sorted by point
    space: object

    @cached_property
    def index(self):
        return {F: k for k, F in enumerate(self.ultrafilters)}

    def tilde(self, subset):
        """Ultrafilters containing ``subset``, as a bitset of indices."""
        return mask_of(k for k, F in enumerate(self.ultrafilters) if subset in F)

    def embedding(self):
        """``x -> F_x`` as a list of ultrafilter indices."""
        return [self.index[principal_at(self.base_size, x)] for x in range(self.base_size)]


def ultrafilters(base_size, exhaustive=None):
    """Maximal filters with the topology generated by the sets ``U~``.

    Small bases are searched exhaustively; larger ones fall back to the
    principal filters, which are the only ultrafilters on a finite set.
    """
    if exhaustive is None:
        exhaustive = base_size <= FILTER_ENUM_LIMIT
    if exhaustive:
        filters = enumerate_filters(base_size)
        maximal = [F for F in filters if not any(F.members < G.members for G in filters)]
    else:
        maximal = [principal_at(base_size, x) for x in range(base_size)]
    maximal.sort(key=lambda F: F.core)
    full = (1 << base_size) - 1
    gens = [mask_of(k for k, F in enumerate(maximal) if u in F) for u in subsets_of(full)]
    space = generate_topology(len(maximal), sorted(set(gens)))
    return UltrafilterSpace(base_size, tuple(maximal), space)


def restrict_filter(F, U):
    """``F_U = {A & U : A in F}`` for ``U`` in ``F``."""
    if U not in F:
        raise PreconditionError("the subset is not a member of the filter", U)
    return Filter(F.base_size, frozenset(a & U for a in F.members), U)


def extend_filter(G, base_size=None):
    """``G_X = {A | B : A in G, B any subset}``."""
    n = G.base_size if base_size is None else base_size
    full = (1 << n) - 1
    return Filter(n, frozenset(a | b for a in G.members for b in subsets_of(full & ~G.universe)))


def check_restrict_extend(base_size):
    """Exhaustive check of the restriction/enlargement maps on every ultrafilter."""
    report = Report("restrict-extend")
    beta = ultrafilters(base_size)
    full = (1 << base_size) - 1
    for U in subsets_of(full):
        members = [F for F in beta.ultrafilters if U in F]
        on_u = [restrict_filter(F, U) for F in members]
        for F, G in zip(members, on_u):
            if extend_filter(G) != F:
                report.add("extend-restrict", (F.core, U))
            if not verify_filter(G).valid:
                report.add("restricted-filter", (F.core, U))
        # ultrafilters of U, built intrinsically, match the restricted ones
        intrinsic = sorted((upset_filter(base_size, 1 << x, U) for x in bits(U)), key=lambda F: F.core)
        if sorted(on_u, key=lambda F: F.core) != intrinsic:
            report.add("bijection", (U,))
        for G in intrinsic:
            back = extend_filter(G)
            if U not in back or restrict_filter(back, U) != G:
                report.add("restrict-extend", (G.core, U))
        for V in subsets_of(U):
            lhs = {F.core for F in members if V in F}
            rhs = {G.core for G in on_u if V in G}
            if lhs != rhs:
                report.add("basis", (U, V))
    return report


# ----------------------------------------------------------------------------
# extension of partial bijections to ultrafilters


def extend_bijection(h, beta):
    """The partial bijection ``h~: dom(h)~ -> cod(h)~`` of the ultrafilter space."""
    n = beta.base_size
    U, V = h.domain, h.codomain
    m = [-1] * len(beta.ultrafilters)
    for k in bits(beta.tilde(U)):
        F = beta.ultrafilters[k]
        restricted = restrict_filter(F, U)
        pushed = Filter(n, frozenset(h.image(a) for a in restricted.members), V)
        m[k] = beta.index[extend_filter(pushed)]
    return PartialBijection(beta.space, tuple(m))


def extend_representation(rep, beta=None):
    """Extend a representation on a discrete space to its ultrafilters."""
    X = rep.space
    if not X.is_discrete():
        raise PreconditionError("ultrafilter extension needs a discrete space")
    beta = beta or ultrafilters(X.point_count)
    assign = tuple(extend_bijection(h, beta) for h in rep.assign)
    return Representation(rep.semigroup, beta.space, assign), beta


def check_extension_laws(rep, beta):
    report = Report("extension-laws")
    tilde = {}

    def ext(h):
        if h not in tilde:
            tilde[h] = extend_bijection(h, beta)
        return tilde[h]

    hs = sorted(set(rep.assign), key=PartialBijection.sort_key)
    for h in hs:
        if invert(ext(h)) != ext(invert(h)):
            report.add("inverse", (h.mapping,))
        for k in hs:
            if compose(ext(h), ext(k)) != ext(compose(h, k)):
                report.add("product", (h.mapping, k.mapping))
    return report


@dataclass
class ExtensionResult:
    germs: object
    beta: UltrafilterSpace
    embedding: object  # GroupoidIso of the discrete groupoid into the extension
    report: Report

    @property
    def valid(self):
        return self.report.valid


def beta0_extension(G):
    from .germs import _iso, germ_groupoid

    if not (G.objects.is_discrete() and G.arrows.is_discrete()):
        raise PreconditionError("beta0 extension needs a discrete groupoid")
    if not is_etale(G).etale:
        raise PreconditionError("groupoid is not etale")
    bis = local_bisections(G)
    rho = canonical_representation(G, bis)
    ext, beta = extend_representation(rho)
    report = Report("beta0")
    report.extend(check_extension_laws(rho, beta))
    if not classify(ext).is_wide:
        report.add("wide")
        return ExtensionResult(None, beta, None, report)
    germs = germ_groupoid(ext)
    emb = beta.embedding()
    amap = [-1] * G.arrow_count
    for v_idx, v in enumerate(bis.sets):
        for x in bits(v):
            amap[x] = germs.lookup[(emb[G.d[x]], v_idx)]
    iso = _iso(G, germs, tuple(emb), amap)
    report.extend(iso.report, prefix="embedding:")
    return ExtensionResult(germs, beta, iso, report)


# ----------------------------------------------------------------------------
# coarse structures


def pair_index(n, x, y):
    return x * n + y


def diagonal(n):
    return mask_of(pair_index(n, x, x) for x in range(n))


def relation_inverse(n, E):
    return mask_of(pair_index(n, p % n, p // n) for p in bits(E))


def relation_product(n, E, F):
    """``{(x, z) : (x, y) in E, (y, z) in F}``."""
    out = 0
    for p in bits(E):
        x, y = divmod(p, n)
        for q in bits(F):
            y2, z = divmod(q, n)
            if y == y2:
                out |= 1 << pair_index(n, x, z)
    return out


@dataclass(frozen=True)
class CoarseStructure:
    """Stored by its largest controlled set; every nonempty subset of it is controlled."""

    base_size: int
    maximal: int

    @property
    def unital(self):
        return diagonal(self.base_size) & ~self.maximal == 0

    def is_controlled(self, E):
        return E != 0 and E & ~self.maximal == 0

    def family(self, limit=1 << 16):
        if popcount(self.maximal) > 16 or (1 << popcount(self.maximal)) > limit:
            raise SizeGuardError("controlled family too large to list", popcount(self.maximal))
        return [E for E in subsets_of(self.maximal) if E]


def generate_coarse_structure(base_size, generators=()):
    n = base_size
    full = (1 << (n * n)) - 1
    top = 0
    for g in generators:
        if g <= 0 or g & ~full:
            raise ValueError(f"generator {g} is not a nonempty subset of X x X")
        top |= g
    for p in range(n * n):
        top |= 1 << p  # singletons
    while True:
        nxt = top | relation_inverse(n, top) | relation_product(n, top, top)
        if nxt == top:
            return CoarseStructure(n, top)
        top = nxt


def verify_coarse_structure(base_size, family):
    """Check an explicit family of controlled sets clause by clause."""
    n = base_size
    report = Report("coarse")
    fam = set(family)
    full = (1 << (n * n)) - 1
    for E in sorted(fam):
        if E <= 0 or E & ~full:
            report.add("range", (E,))
    for p in range(n * n):
        if 1 << p not in fam:
            report.add("singletons", (divmod(p, n),))
    for E in sorted(fam):
        for sub in subsets_of(E):
            if sub and sub not in fam:
                report.add("subsets", (E, sub))
                break
        if relation_inverse(n, E) not in fam:
            report.add("inverses", (E,))
    ms = sorted(fam)
    for i, a in enumerate(ms):
        for b in ms[i:]:
            if a | b not in fam:
                report.add("unions", (a, b))
    for a in ms:
        for b in ms:
            p = relation_product(n, a, b)
            if p and p not in fam:
                report.add("products", (a, b))
    return report


def graph_of(h):
    n = h.space.point_count
    return mask_of(pair_index(n, x, y) for x, y in h.pairs())


def controlled_pseudogroup(E):
    """Partial bijections of the discrete set whose graphs are controlled.

    The empty map is kept so that products stay inside the pseudogroup.
    """
    X = discrete(E.base_size)
    elems = [h for h in all_partial_homeomorphisms(X) if graph_of(h) == 0 or E.is_controlled(graph_of(h))]
    P = Pseudogroup(X, elems)
    S, els = abstract_from_pseudogroup(P)
    return P, Representation(S, X, tuple(els))


@dataclass
class TranslationResult:
    germs: object
    direct: object  # germ groupoid on X itself
    pair_iso: tuple
    direct_iso: tuple
    report: Report

    @property
    def valid(self):
        return self.report.valid


def translation_groupoid(E):
    from .germs import germ_groupoid

    if not E.unital:
        raise NotUnitalError(
            "coarse structure is not unital; the extended representation need not be wide",
            diagonal(E.base_size) & ~E.maximal,
        )
    _, rep = controlled_pseudogroup(E)
    ext, beta = extend_representation(rep)
    report = Report("translation")
    report.extend(check_extension_laws(rep, beta))
    germs = germ_groupoid(ext)
    direct = germ_groupoid(rep)
    pair = pair_groupoid(E.base_size)
    to_pair = groupoid_isomorphic(germs.groupoid, pair)
    if to_pair is None:
        report.add("pair-groupoid")
    to_direct = groupoid_isomorphic(germs.groupoid, direct.groupoid)
    if to_direct is None:
        report.add("direct-germs")
    else:
        report.extend(check_groupoid_iso(germs.groupoid, direct.groupoid, *to_direct), prefix="direct:")
    return TranslationResult(germs, direct, to_pair, to_direct, report)
