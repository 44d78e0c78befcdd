"""Time the numpy and numba kernels on symmetric inverse monoids.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends see identical inputs and their results are compared before any
timing is reported.  The first numba call is timed separately as compile cost.
"""

import argparse
import time

import numpy as np

from germoid import _kernels as K
from germoid.fintop import discrete, sierpinski
from germoid.invsemi import abstract_from_pseudogroup, symmetric_inverse_monoid


def cases():
    for name, X in (("I(disc 3)", discrete(3)), ("I(sierpinski)", sierpinski()), ("I(disc 4)", discrete(4))):
        S, _ = abstract_from_pseudogroup(symmetric_inverse_monoid(X))
        mul = K.as_table(S.mul)
        inv = K.as_table(S.inv)
        idem = K.as_table(np.flatnonzero(np.diag(mul) == np.arange(S.size)))
        elems = K.as_table(np.arange(S.size))
        ident = K.as_table(np.arange(S.size))
        calls = {
            "assoc_violation": (mul,),
            "inverse_violation": (mul, inv),
            "inverse_counts": (mul,),
            "idempotent_commute_violation": (mul, idem),
            "natural_order": (mul, idem),
            "witness_labels": (mul, idem, elems),
            "hom_violation": (mul, mul, ident),
        }
        yield name, S.size, calls


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t)
    return min(times)


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    repeat = ap.parse_args().repeat

    py = K.implementation("numpy")
    if not K.HAVE_NUMBA:
        print("numba not installed; only the numpy backend is available")
        return
    nb = K.implementation("numba")

    print(f"{'case':15} {'|S|':>4} {'kernel':30} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    compile_cost = {}
    for name, size, calls in cases():
        for kernel, args in calls.items():
            if kernel not in compile_cost:
                t = time.perf_counter()
                nb[kernel](*args)
                compile_cost[kernel] = time.perf_counter() - t
            if not same(py[kernel](*args), nb[kernel](*args)):
                raise SystemExit(f"backends disagree on {kernel} for {name}")
            tp = best_of(py[kernel], args, repeat)
            tn = best_of(nb[kernel], args, repeat)
            print(f"{name:15} {size:4d} {kernel:30} {tp * 1e3:10.3f} {tn * 1e3:10.3f} {tp / max(tn, 1e-9):8.1f}")
    print(f"\nnumba first-call cost, total over kernels: {sum(compile_cost.values()):.2f} s")


if __name__ == "__main__":
    main()
