"""The universal groupoid: germs of the action of S on the characters of E(S)."""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .fintop import bits, generate_topology, mask_of
from .invsemi import PartialBijection
from .report import SizeGuardError
from .representation import Representation

BRUTE_FORCE_IDEMPOTENTS = 20


@dataclass(frozen=True, eq=False)
class CharacterSpace:
    semigroup: object
    characters: tuple  # each a bitmask over element indices: the idempotents sent to 1
    space: object

    @property
    def index(self):
        return {c: k for k, c in enumerate(self.characters)}

    def value(self, k, f):
        return self.characters[k] >> f & 1

    def D(self, s):
        """Characters that are 1 on ``s s*``."""
        S = self.semigroup
        f = int(S.mul[s, S.inv[s]])
        return mask_of(k for k, c in enumerate(self.characters) if c >> f & 1)


def enumerate_characters(S):
    """All nonzero multiplicative maps ``E(S) -> {0,1}`` by filtering every candidate."""
    E = [int(f) for f in S.idempotents]
    m = len(E)
    if m > BRUTE_FORCE_IDEMPOTENTS:
        raise SizeGuardError(f"character enumeration is exhaustive over 2^{m} candidates", m)
    cand = np.arange(1, 1 << m, dtype=np.int64)  # zero map excluded
    ok = np.ones(len(cand), dtype=bool)
    pos = {f: k for k, f in enumerate(E)}
    for a in range(m):
        va = cand >> a & 1
        for b in range(a, m):
            c = pos[int(S.mul[E[a], E[b]])]
            ok &= (cand >> c & 1) == (va & (cand >> b & 1))
    out = []
    for v in cand[ok].tolist():
        out.append(mask_of(E[k] for k in bits(v)))
    return sorted(out)


def principal_characters(S):
    """Characters as the upsets of single idempotents (a finite filter of E is principal)."""
    E = [int(f) for f in S.idempotents]
    emask = mask_of(E)
    return sorted({S.up[f] & emask for f in E})


def _least_of(S, char):
    for f in bits(char):
        if char & ~S.up[f] == 0:
            return f
    raise AssertionError("character without a least idempotent")


def character_space(S, method="auto"):
    if method == "auto":
        method = "enumerate" if len(S.idempotents) <= BRUTE_FORCE_IDEMPOTENTS else "principal"
    chars = tuple(enumerate_characters(S) if method == "enumerate" else principal_characters(S))
    E = [int(f) for f in S.idempotents]
    # The smallest basic set around x with top idempotent f excludes every
    # g <= f with x(g) = 0; any other basic set with top f containing x is larger.
    gens = set()
    for c in chars:
        for f in bits(c):
            below = [g for g in E if S.leq[g, f] and not c >> g & 1]
            gens.add(_basic_set(chars, f, below))
    space = generate_topology(len(chars), sorted(gens))
    return CharacterSpace(S, chars, space)


def _basic_set(chars, f, excluded):
    return mask_of(
        k for k, c in enumerate(chars) if c >> f & 1 and not any(c >> g & 1 for g in excluded)
    )


def literal_basis_topology(cs):
    """Topology from every tuple ``(f; f_1..f_n)`` with ``f f_i = f_i`` (small E only)."""
    S, chars = cs.semigroup, cs.characters
    E = [int(f) for f in S.idempotents]
    gens = set()
    for f in E:
        below = [g for g in E if S.mul[f, g] == g]
        for n in range(len(below) + 1):
            for sub in combinations(below, n):
                gens.add(_basic_set(chars, f, sub))
    return generate_topology(len(chars), sorted(gens))


def universal_representation(S, cs=None):
    """``rho_u(s): D_s -> D_{s*}``, ``x -> y`` with ``y(f) = x(s f s*)``."""
    cs = cs or character_space(S)
    E = [int(f) for f in S.idempotents]
    index = cs.index
    assign = []
    for s in range(S.size):
        t = int(S.inv[s])
        m = [-1] * len(cs.characters)
        for k in bits(cs.D(s)):
            x = cs.characters[k]
            y = mask_of(f for f in E if x >> int(S.mul[S.mul[s, f], t]) & 1)
            m[k] = index[y]
        assign.append(PartialBijection(cs.space, tuple(m)))
    return Representation(S, cs.space, tuple(assign))


def universal_groupoid(S):
    from .germs import germ_groupoid

    return germ_groupoid(universal_representation(S))
