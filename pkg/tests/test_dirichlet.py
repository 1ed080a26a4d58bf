import math

import numpy as np
import pytest

from gausslab import specfun
from gausslab.dirichlet import (
    Cusp,
    l_theta,
    phi_closed,
    phi_di_sum,
    phi_di_sum_batch,
    phi_series_identity_check,
    r4_euler_rhs,
    r4_identity_check,
    ramanujan_sum,
)
from gausslab.rk import build_rk_table

from conftest import assert_close, zeta_eta_oracle


@pytest.fixture(scope="module")
def r1_table():
    return build_rk_table(1, 10**4)


@pytest.fixture(scope="module")
def r4_table():
    return build_rk_table(4, 2 * 10**5)


class TestLTheta:
    def test_k1_reduces_to_zeta(self, r1_table):
        # r_1 lives on squares: sum 2 (m^2)^{-(s - 1/2)} = 2 zeta(2s - 1)
        got = l_theta(r1_table, 2.0, 10**4)
        want = 2.0 * zeta_eta_oracle(3.0)
        assert abs(got.value - want) <= got.tail_bound
        assert got.tail_bound < 2e-4

    def test_single_term(self, r1_table, r4_table):
        for table in (r1_table, r4_table):
            got = l_theta(table, 3.0, 1)
            assert got.value == 2.0 * table.k

    def test_stabilizes_under_doubling(self, r4_table):
        a = l_theta(r4_table, 2.0, 10**5)
        b = l_theta(r4_table, 2.0, 2 * 10**5)
        assert abs(a.value - b.value) <= a.tail_bound

    def test_divergent_rejected(self, r1_table):
        with pytest.raises(ValueError):
            l_theta(r1_table, 1.0, 100)

    def test_tail_infinite_below_five_fourths(self, r4_table):
        got = l_theta(r4_table, 1.2, 1000)
        assert math.isinf(got.tail_bound)


class TestR4Euler:
    def test_rhs_at_four(self):
        got = r4_euler_rhs(4.0)
        assert_close(got, 2.2124, abs_=1e-3)
        # and from an independent zeta route
        want = (
            (2.0**-6 - 5.0 * 2.0**-5 + 2.0**-3 + 1.0)
            * zeta_eta_oracle(2.0)
            * zeta_eta_oracle(3.0) ** 2
            * zeta_eta_oracle(4.0)
            / ((1.0 + 2.0**-3) * zeta_eta_oracle(6.0))
        )
        assert_close(got, want, rel=1e-11)

    def test_limit_is_one(self):
        assert_close(r4_euler_rhs(30.0), 1.0, abs_=1e-6)

    def test_s5_bracket(self):
        assert 1.0 < r4_euler_rhs(5.0) < 1.5

    def test_domain(self):
        with pytest.raises(ValueError):
            r4_euler_rhs(3.0)

    @pytest.mark.parametrize("s", [4.0, 5.0, 6.0])
    def test_identity_within_tail(self, r4_table, s):
        res = r4_identity_check(r4_table, s, 10**5)
        assert res.passed, f"s={s}: diff {res.discrepancy:.3e} > tail {res.tail_bound:.3e}"

    def test_fast_convergence_at_s6(self, r4_table):
        res = r4_identity_check(r4_table, 6.0, 10**4)
        assert res.discrepancy <= 1e-6 * res.rhs

    def test_single_term_lhs(self, r4_table):
        res = r4_identity_check(r4_table, 4.0, 1)
        assert res.lhs == 1.0  # (r_4(1)/8)^2 = 1

    def test_needs_k4(self, r1_table):
        with pytest.raises(ValueError):
            r4_identity_check(r1_table, 4.0, 100)


class TestPhiClosed:
    def test_infinity_vanishes_on_odd_h(self):
        for s in (0.75, 2.0, 3.0):
            assert phi_closed(Cusp.INFINITY, 1, s) == 0.0
            assert phi_closed(Cusp.INFINITY, 3, s) == 0.0

    def test_cusp0_h1_s2(self):
        # 4^{-2} / zeta^(2)(4) = 6 / pi^4 = 0.0615959...
        assert_close(phi_closed(Cusp.ZERO, 1, 2.0), 6.0 / math.pi**4, rel=1e-12)
        assert_close(phi_closed(Cusp.ZERO, 1, 2.0), 0.0616, abs_=1e-4)

    def test_half_even_h_matches_cusp0(self):
        for s in (1.5, 2.0):
            assert phi_closed(Cusp.HALF, 2, s) == phi_closed(Cusp.ZERO, 2, s)

    def test_half_odd_h_flips_sign(self):
        assert phi_closed(Cusp.HALF, 3, 2.0) == -phi_closed(Cusp.ZERO, 3, 2.0)

    def test_domain(self):
        with pytest.raises(ValueError):
            phi_closed(Cusp.ZERO, 1, 0.5)
        with pytest.raises(ValueError):
            phi_closed(Cusp.ZERO, 0, 2.0)


class TestPhiDiSum:
    def test_cusp0_matches_closed(self):
        got = phi_di_sum(Cusp.ZERO, 1, 2.0, 400)
        assert abs(got.value - phi_closed(Cusp.ZERO, 1, 2.0)) <= got.tail_bound

    def test_infinity_h1_vanishes(self):
        got = phi_di_sum(Cusp.INFINITY, 1, 2.0, 400)
        assert abs(got.value) <= got.tail_bound

    def test_half_h3_sign_rule(self):
        got = phi_di_sum(Cusp.HALF, 3, 2.0, 400)
        assert abs(got.value - (-phi_closed(Cusp.ZERO, 3, 2.0))) <= got.tail_bound

    @pytest.mark.parametrize("cusp", list(Cusp))
    def test_all_cusps_small_h(self, cusp):
        hs = list(range(1, 13))
        values, tail = phi_di_sum_batch(cusp, hs, 2.0, 300)
        assert float(np.max(np.abs(values.imag))) < 1e-9
        for h, val in zip(hs, values.real):
            diff = abs(val - phi_closed(cusp, h, 2.0))
            assert diff <= tail, f"cusp {cusp.label} h={h}: {diff:.2e} > {tail:.2e}"

    def test_erratum_discrimination_at_half(self):
        # with the missing-v congruence the delta sum at cusp 1/2 is empty,
        # so every coefficient collapses to zero and misses the closed form
        hs = list(range(1, 13))
        values, tail = phi_di_sum_batch(Cusp.HALF, hs, 2.0, 300, corrected=False)
        hits = sum(
            1
            for h, val in zip(hs, values.real)
            if abs(val - phi_closed(Cusp.HALF, h, 2.0)) > 10.0 * tail
        )
        assert hits > 0

    def test_gamma_max_floor(self):
        with pytest.raises(ValueError):
            phi_di_sum(Cusp.ZERO, 1, 2.0, 2)

    def test_divergent_rejected(self):
        with pytest.raises(ValueError):
            phi_di_sum(Cusp.ZERO, 1, 1.0, 100)


class TestRamanujan:
    def test_mobius_at_h1(self):
        # c_q(1) = mu(q)
        mu = {1: 1, 2: -1, 3: -1, 4: 0, 5: -1, 6: 1, 7: -1, 8: 0, 9: 0, 10: 1, 12: 0, 30: -1}
        for q, want in mu.items():
            assert ramanujan_sum(q, 1) == want

    def test_totient_when_q_divides_n(self):
        assert ramanujan_sum(6, 12) == 2  # phi(6)
        assert ramanujan_sum(5, 10) == 4  # phi(5)

    def test_matches_exponential_sum(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            q = int(rng.integers(1, 80))
            n = int(rng.integers(0, 200))
            deltas = np.array([d for d in range(1, q + 1) if math.gcd(d, q) == 1])
            num = complex(np.sum(np.exp(2j * math.pi * n * deltas / q)))
            assert abs(num - ramanujan_sum(q, n)) < 1e-8, (q, n)


class TestSeriesIdentities:
    @pytest.mark.parametrize("cusp", list(Cusp))
    def test_identity_within_double_tail(self, cusp):
        res = phi_series_identity_check(cusp, 2.0, 3.0, 10**4)
        assert res.discrepancy <= 2.0 * res.tail_bound, (
            f"cusp {cusp.label}: {res.discrepancy:.3e} vs {res.tail_bound:.3e}"
        )

    def test_half_carries_alternating_factor(self):
        rhs0 = phi_series_identity_check(Cusp.ZERO, 2.0, 3.0, 100).rhs
        rhs_half = phi_series_identity_check(Cusp.HALF, 2.0, 3.0, 100).rhs
        assert_close(rhs_half, (2.0 ** (1 - 3) - 1.0) * rhs0, rel=1e-13)
        assert_close(rhs_half / rhs0, -0.75, rel=1e-13)

    def test_infinity_two_power_structure(self):
        s, w = 2.0, 3.0
        res = phi_series_identity_check(Cusp.INFINITY, s, w, 100)
        want = (
            specfun.zeta(w)
            * specfun.zeta(w - 1.0 + 2.0 * s)
            * (4.0 ** (1.0 - w) - 2.0 ** (1.0 - w))
            / (2.0 ** (4.0 * s) * specfun.zeta_two_removed(2.0 * s))
        )
        assert_close(res.rhs, want, rel=1e-13)

    def test_domain(self):
        with pytest.raises(ValueError):
            phi_series_identity_check(Cusp.ZERO, 2.0, 1.0, 100)
