import itertools
import math
from pathlib import Path

import numpy as np
import pytest

from qndsim import _kernels_py

FIXTURES = Path(__file__).parent / "fixtures" / "models"

try:
    from qndsim import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = [pytest.param(_kernels_py, id="python")]
if _compiled is not None:
    BACKENDS.append(pytest.param(_compiled, id="compiled"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


# Loop-based oracles. They index the read-out tensor explicitly and share no
# code with the package, so they can check it independently.

def oracle_amplitudes(u, a, b):
    d_s, d_p = len(a), len(b)
    c = [[0j] * d_p for _ in range(d_s)]
    for i, j, k, l in itertools.product(range(d_s), range(d_p), range(d_s), range(d_p)):
        c[i][j] += a[k] * b[l] * u[i * d_p + j][k * d_p + l]
    return c


def oracle_weak(u, a, b):
    c = oracle_amplitudes(u, a, b)
    return max(abs(sum(abs(x) ** 2 for x in c[i]) - abs(a[i]) ** 2) for i in range(len(a)))


def oracle_moderate(u, b, d_s):
    d_p = len(b)
    worst = 0.0
    for k, k2, i in itertools.product(range(d_s), repeat=3):
        total = 0j
        for j in range(d_p):
            left = sum(u[i * d_p + j][k * d_p + l] * b[l] for l in range(d_p))
            right = sum(u[i * d_p + j][k2 * d_p + l] * b[l] for l in range(d_p))
            total += left.conjugate() * right
        worst = max(worst, abs(total - (1.0 if k == i == k2 else 0.0)))
    return worst


def oracle_mutual_information(p):
    rows = [sum(r) for r in p]
    cols = [sum(r[j] for r in p) for j in range(len(p[0]))]
    return sum(p[i][j] * math.log(p[i][j] / (rows[i] * cols[j]))
               for i in range(len(p)) for j in range(len(p[0])) if p[i][j] > 1e-15)


def block_unitary(d_s, d_p, rng):
    """Joint unitary that never changes the system index."""
    from qndsim.linalg import haar_unitary

    u = np.zeros((d_s * d_p, d_s * d_p), dtype=complex)
    for i in range(d_s):
        u[i * d_p:(i + 1) * d_p, i * d_p:(i + 1) * d_p] = haar_unitary(d_p, rng)
    return u


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(RESULTS):
        entries = RESULTS[criterion]
        mark = "PASS" if all(ok for ok, _ in entries) else "FAIL"
        details = "; ".join(d for _, d in entries)
        terminalreporter.write_line(f"criterion {criterion:>2}: {mark}  {details}")
