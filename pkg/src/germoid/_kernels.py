"""Integer-table kernels shared by the semigroup and germ code.

Every kernel has a pure-numpy implementation (``py_*``) and, when numba is
importable, an ``@njit`` twin (``nb_*``).  The public names bind to the numba
versions unless ``GERMOID_NO_JIT`` is set to a non-empty value other than
``0``.  Tables are ``int64`` arrays; ``-1`` marks "no witness found".
"""

import os
import warnings

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

_flag = os.environ.get("GERMOID_NO_JIT", "")
USE_JIT = HAVE_NUMBA and _flag in ("", "0")
BACKEND = "numba" if USE_JIT else "numpy"

if not HAVE_NUMBA and _flag in ("", "0"):  # pragma: no cover
    warnings.warn("numba is not available; using numpy kernels", RuntimeWarning)


# ----------------------------------------------------------------------------
# numpy implementations


def py_assoc_violation(mul):
    n = mul.shape[0]
    for a in range(n):
        left = mul[mul[a]]  # [b, c] -> (ab)c
        right = mul[a][mul]  # [b, c] -> a(bc)
        bad = np.argwhere(left != right)
        if bad.size:
            return a, int(bad[0, 0]), int(bad[0, 1])
    return -1, -1, -1


def py_inverse_violation(mul, inv):
    n = mul.shape[0]
    s = np.arange(n)
    sts = mul[mul[s, inv], s]
    bad = np.flatnonzero(sts != s)
    first = -1 if not bad.size else int(bad[0])
    tst = mul[mul[inv, s], inv]
    bad2 = np.flatnonzero(tst != inv)
    second = -1 if not bad2.size else int(bad2[0])
    if first == -1 and second == -1:
        return -1, 0
    if second == -1 or (first != -1 and first <= second):
        return first, 1
    return second, 2


def py_inverse_counts(mul):
    n = mul.shape[0]
    idx = np.arange(n)
    sts = mul[mul, idx[:, None]]  # [s, t] -> (st)s
    tst = mul[mul.T, idx[None, :]]  # [s, t] -> (ts)t
    ok = (sts == idx[:, None]) & (tst == idx[None, :])
    return ok.sum(axis=1).astype(np.int64)


def py_idempotent_commute_violation(mul, idem):
    if idem.size == 0:
        return -1, -1
    sub = mul[np.ix_(idem, idem)]
    bad = np.argwhere(sub != sub.T)
    if bad.size:
        return int(idem[bad[0, 0]]), int(idem[bad[0, 1]])
    return -1, -1


def py_natural_order(mul, idem):
    n = mul.shape[0]
    leq = np.zeros((n, n), dtype=np.bool_)
    if idem.size:
        rows = mul[idem]
        leq[rows.ravel(), np.tile(np.arange(n), idem.size)] = True
    return leq


def py_witness_labels(mul, witnesses, elems):
    m = elems.size
    labels = np.arange(m, dtype=np.int64)
    if witnesses.size == 0 or m == 0:
        return labels
    w = mul[np.ix_(witnesses, elems)]
    eq = (w[:, :, None] == w[:, None, :]).any(axis=0)
    return np.argmax(eq, axis=1).astype(np.int64)


def py_hom_violation(mul_a, mul_b, phi):
    lhs = phi[mul_a]
    rhs = mul_b[phi[:, None], phi[None, :]]
    bad = np.argwhere(lhs != rhs)
    if bad.size:
        return int(bad[0, 0]), int(bad[0, 1])
    return -1, -1


# ----------------------------------------------------------------------------
# numba implementations

if HAVE_NUMBA:

    @njit(cache=True)
    def nb_assoc_violation(mul):
        n = mul.shape[0]
        for a in range(n):
            for b in range(n):
                ab = mul[a, b]
                for c in range(n):
                    if mul[ab, c] != mul[a, mul[b, c]]:
                        return a, b, c
        return -1, -1, -1

    @njit(cache=True)
    def nb_inverse_violation(mul, inv):
        n = mul.shape[0]
        for s in range(n):
            t = inv[s]
            if mul[mul[s, t], s] != s:
                return s, 1
            if mul[mul[t, s], t] != t:
                return s, 2
        return -1, 0

    @njit(cache=True)
    def nb_inverse_counts(mul):
        n = mul.shape[0]
        out = np.zeros(n, dtype=np.int64)
        for s in range(n):
            for t in range(n):
                if mul[mul[s, t], s] == s and mul[mul[t, s], t] == t:
                    out[s] += 1
        return out

    @njit(cache=True)
    def nb_idempotent_commute_violation(mul, idem):
        k = idem.shape[0]
        for i in range(k):
            for j in range(k):
                if mul[idem[i], idem[j]] != mul[idem[j], idem[i]]:
                    return idem[i], idem[j]
        return -1, -1

    @njit(cache=True)
    def nb_natural_order(mul, idem):
        n = mul.shape[0]
        leq = np.zeros((n, n), dtype=np.bool_)
        for i in range(idem.shape[0]):
            f = idem[i]
            for t in range(n):
                leq[mul[f, t], t] = True
        return leq

    @njit(cache=True)
    def nb_witness_labels(mul, witnesses, elems):
        m = elems.shape[0]
        labels = np.arange(m)
        k = witnesses.shape[0]
        if k == 0:
            return labels
        for i in range(m):
            found = False
            for j in range(m):
                for w in range(k):
                    f = witnesses[w]
                    if mul[f, elems[i]] == mul[f, elems[j]]:
                        labels[i] = j
                        found = True
                        break
                if found:
                    break
        return labels

    @njit(cache=True)
    def nb_hom_violation(mul_a, mul_b, phi):
        n = mul_a.shape[0]
        for a in range(n):
            for b in range(n):
                if phi[mul_a[a, b]] != mul_b[phi[a], phi[b]]:
                    return a, b
        return -1, -1


NAMES = (
    "assoc_violation",
    "inverse_violation",
    "inverse_counts",
    "idempotent_commute_violation",
    "natural_order",
    "witness_labels",
    "hom_violation",
)


def implementation(backend):
    """Return a dict name -> kernel for ``backend`` ("numpy" or "numba")."""
    prefix = {"numpy": "py_", "numba": "nb_"}[backend]
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    g = globals()
    return {name: g[prefix + name] for name in NAMES}


_active = implementation(BACKEND)
assoc_violation = _active["assoc_violation"]
inverse_violation = _active["inverse_violation"]
inverse_counts = _active["inverse_counts"]
idempotent_commute_violation = _active["idempotent_commute_violation"]
natural_order = _active["natural_order"]
witness_labels = _active["witness_labels"]
hom_violation = _active["hom_violation"]


def as_table(a):
    """Coerce to a contiguous int64 array (the dtype every kernel expects)."""
    return np.ascontiguousarray(a, dtype=np.int64)
