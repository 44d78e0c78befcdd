import pytest

from germoid import _kernels as K


def pytest_addoption(parser):
    parser.addoption(
        "--regen-golden",
        action="store_true",
        default=False,
        help="rewrite tests/golden from the current code instead of comparing",
    )


@pytest.fixture(scope="session")
def regen_golden(request):
    return request.config.getoption("--regen-golden")


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the numba kernels once so timing-sensitive tests measure work, not JIT
    import numpy as np

    mul = np.zeros((1, 1), dtype=np.int64)
    inv = np.zeros(1, dtype=np.int64)
    K.assoc_violation(mul)
    K.inverse_violation(mul, inv)
    K.inverse_counts(mul)
    K.idempotent_commute_violation(mul, np.zeros(1, dtype=np.int64))
    K.natural_order(mul, np.zeros(1, dtype=np.int64))
    K.witness_labels(mul, np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64))
    K.hom_violation(mul, mul, np.zeros(1, dtype=np.int64))
