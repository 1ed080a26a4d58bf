import math

import pytest

from gausslab.discrepancy import prefix_counts
from gausslab.rk import build_rk_table


@pytest.fixture(scope="session")
def series3_big():
    """k = 3 series to 4e6: covers the full X range of the experiments."""
    return prefix_counts(build_rk_table(3, 4_000_000))


@pytest.fixture(scope="session")
def series4_1m():
    """k = 4 series to 1e6 (NTT build)."""
    return prefix_counts(build_rk_table(4, 1_000_000))


@pytest.fixture(scope="session")
def tables_small():
    """k = 1..6 tables to n = 512 for cheap cross-checks."""
    return {k: build_rk_table(k, 512) for k in range(1, 7)}


def zeta_eta_oracle(s: float, nterms: int = 100, passes: int = 60) -> float:
    """Independent zeta evaluation: the alternating eta series accelerated by
    repeated averaging of partial sums (Richardson-style), then divided by
    (1 - 2^{1-s})."""
    acc = 0.0
    partial = []
    for n in range(1, nterms + 1):
        acc += (-1.0) ** (n - 1) * float(n) ** -s
        partial.append(acc)
    row = partial
    for _ in range(passes):
        if len(row) == 1:
            break
        row = [(a + b) / 2.0 for a, b in zip(row, row[1:])]
    return row[len(row) // 2] / (1.0 - 2.0 ** (1.0 - s))


def gamma_recurrence_oracle(x: float) -> float:
    """Gamma(x) for x = m + 1/2 or integer x, by the recurrence from
    Gamma(1/2) = sqrt(pi) or Gamma(1) = 1."""
    if x == int(x):
        val = 1.0
        for j in range(1, int(x)):
            val *= j
        return val
    assert (x - 0.5) == int(x - 0.5), "oracle handles half-integers only"
    val = math.sqrt(math.pi)
    t = 0.5
    while t < x:
        val *= t
        t += 1.0
    return val


def assert_close(got, want, rel=0.0, abs_=0.0, label=""):
    err = abs(got - want)
    limit = abs_ + rel * abs(want)
    assert err <= limit, f"{label}: |{got!r} - {want!r}| = {err:.3e} > {limit:.3e}"
