"""Named example structures shared by the tests, the acceptance suite and the CLI goldens."""

from functools import lru_cache
from itertools import permutations, product

import numpy as np

from . import _kernels as K
from .fintop import all_topologies, discrete, indiscrete, sierpinski
from .groupoid import disjoint_union, group_groupoid, is_etale, pair_groupoid, unit_groupoid
from .invsemi import (
    abstract_from_pseudogroup,
    adjoin_zero,
    brandt,
    chain_semilattice,
    cyclic_group,
    direct_product,
    symmetric_group,
    symmetric_inverse_monoid,
    verify_inverse_semigroup,
    wagner_preston,
)
from .representation import identity_representation


def spaces(max_points=3):
    out = {}
    for n in range(1, max_points + 1):
        for k, X in enumerate(all_topologies(n)):
            out[f"top{n}-{k}"] = X
    return out


def full_monoid(space):
    """``(I(X), identity representation)``."""
    S, els = abstract_from_pseudogroup(symmetric_inverse_monoid(space))
    return identity_representation(S, els, space)


@lru_cache(maxsize=None)
def small_inverse_semigroups(n):
    """Every inverse semigroup on ``n`` elements up to isomorphism (n <= 3)."""
    if n > 3:
        raise ValueError("brute force table search is limited to 3 elements")
    found = []
    seen = set()
    perms = list(permutations(range(n)))
    for flat in product(range(n), repeat=n * n):
        mul = np.array(flat, dtype=np.int64).reshape(n, n)
        if K.assoc_violation(mul)[0] >= 0:
            continue
        counts = K.inverse_counts(mul)
        if not (counts == 1).all():
            continue
        key = min(_relabel_key(mul, p) for p in perms)
        if key in seen:
            continue
        seen.add(key)
        canon = np.array(key, dtype=np.int64).reshape(n, n)
        found.append(_with_inverse(canon))
    found = [S for S in found if verify_inverse_semigroup(S).valid]
    return tuple(found)


def _relabel_key(mul, p):
    n = len(p)
    out = [0] * (n * n)
    for a in range(n):
        for b in range(n):
            out[p[a] * n + p[b]] = p[mul[a, b]]
    return tuple(out)


def _with_inverse(mul):
    from .invsemi import from_table

    return from_table(mul)


def semigroups():
    """Named semigroups with at most 7 elements."""
    out = {
        "Z1": cyclic_group(1),
        "Z2": cyclic_group(2),
        "Z3": cyclic_group(3),
        "Z4": cyclic_group(4),
        "Z5": cyclic_group(5),
        "Z6": cyclic_group(6),
        "Z7": cyclic_group(7),
        "Z2xZ2": direct_product(cyclic_group(2), cyclic_group(2)),
        "S3": symmetric_group(3),
        "chain2": chain_semilattice(2),
        "chain3": chain_semilattice(3),
        "chain2xchain2": direct_product(chain_semilattice(2), chain_semilattice(2)),
        "Z2xchain2": direct_product(cyclic_group(2), chain_semilattice(2)),
        "Z2+0": adjoin_zero(cyclic_group(2)),
        "Z3+0": adjoin_zero(cyclic_group(3)),
        "B1": brandt(1),
        "B2": brandt(2),
        "I1": full_monoid(discrete(1)).semigroup,
        "I2": full_monoid(discrete(2)).semigroup,
        "I(sierpinski)": full_monoid(sierpinski()).semigroup,
    }
    for n in (1, 2, 3):
        for k, S in enumerate(small_inverse_semigroups(n)):
            out[f"order{n}-{k}"] = S
    return out


def wagner_preston_representations(max_size=7):
    return {name: wagner_preston(S)[1] for name, S in semigroups().items() if S.size <= max_size}


def full_representations():
    """Full representations of complete semigroups: ``I(X)`` on small spaces."""
    out = {}
    for name, X in spaces(2).items():
        out[f"I({name})"] = full_monoid(X)
    out["I(disc3)"] = full_monoid(discrete(3))
    out["I(indisc3)"] = full_monoid(indiscrete(3))
    return out


def basic_groupoids():
    """Étale groupoids built directly: unit, pair, disjoint unions, groups."""
    out = {}
    for name, X in spaces(3).items():
        out[f"unit({name})"] = unit_groupoid(X)
    for n in (1, 2, 3):
        out[f"pair{n}"] = pair_groupoid(n)
    out["pair2+unit1"] = disjoint_union(pair_groupoid(2), unit_groupoid(discrete(1)))
    out["pair2+pair2"] = disjoint_union(pair_groupoid(2), pair_groupoid(2))
    out["unit(sierpinski)+pair1"] = disjoint_union(unit_groupoid(sierpinski()), pair_groupoid(1))
    out["Z2"] = group_groupoid(cyclic_group(2))
    out["Z3"] = group_groupoid(cyclic_group(3))
    out["Z2+pair2"] = disjoint_union(group_groupoid(cyclic_group(2)), pair_groupoid(2))
    return out


def non_etale_groupoid():
    """Z/2 over one object with the indiscrete topology on its two arrows."""
    return group_groupoid(cyclic_group(2), indiscrete(2))


def discrete_groupoids():
    return {
        name: G
        for name, G in basic_groupoids().items()
        if G.objects.is_discrete() and G.arrows.is_discrete() and is_etale(G).etale
    }
