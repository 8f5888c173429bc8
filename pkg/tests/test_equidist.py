import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sintegrate

from benford_lab import benford_stats as bs
from benford_lab import equidist as eq
from benford_lab.core_numeric import DomainError


def series_log(n: int, dps: int = 60) -> Fraction:
    """ln(n) for n in {2, 5, 10} from integer-only atanh series.

    atanh(x) = sum x^(2k+1)/(2k+1); ln 2 = 2 atanh(1/3), ln 5 = 2 atanh(2/3).
    Independent of mpmath: exact Fraction partial sums with a tail bound.
    """
    def atanh_frac(x: Fraction) -> Fraction:
        total = Fraction(0)
        k = 0
        term = x
        eps = Fraction(1, 10 ** (dps + 5))
        while term / (2 * k + 1) > eps:
            total += term / (2 * k + 1)
            k += 1
            term *= x * x
        return total

    ln2 = 2 * atanh_frac(Fraction(1, 3))
    if n == 2:
        return ln2
    ln5 = 2 * atanh_frac(Fraction(2, 3))
    if n == 5:
        return ln5
    if n == 10:
        return ln2 + ln5
    raise ValueError(n)


def test_high_precision_log_against_series_oracle():
    got = eq.log_ratio(2, 10, dps=200)
    ref = series_log(2) / series_log(10)
    with mpmath.workdps(220):
        assert abs(got - mpmath.mpf(ref.numerator) / ref.denominator) \
            < mpmath.mpf(10) ** -55


class TestKAlpha:
    def test_half(self):
        assert np.allclose(eq.kalpha_points(0.5, 4), [0.5, 0.0, 0.5, 0.0])

    def test_log10_2_first_points(self):
        pts = eq.kalpha_points(math.log10(2), 3)
        assert np.allclose(pts, [0.30103, 0.60206, 0.90309], atol=1e-5)

    def test_high_precision_tail(self):
        alpha = eq.log_ratio(2, 10)
        pts = eq.kalpha_points(alpha, 100_000)
        with mpmath.workdps(40):
            c = mpmath.log(2) / mpmath.log(10)
            for k in (1, 777, 54321, 99999):
                ref = float(mpmath.frac(k * c))
                assert abs(pts[k - 1] - ref) < 1e-13

    def test_equidistribution_at_1e5(self):
        pts = eq.kalpha_points(eq.log_ratio(2, 10), 10 ** 5)
        assert bs.star_discrepancy(pts) < 0.01

    @given(st.integers(1, 97), st.integers(2, 97))
    @settings(max_examples=40)
    def test_rational_orbit_size(self, p, q):
        alpha = Fraction(p, q)
        pts = eq.kalpha_points(alpha, 3 * alpha.denominator)
        assert len(set(pts.tolist())) == alpha.denominator

    def test_interval_count(self):
        alpha = eq.log_ratio(2, 10)
        cnt, expect = eq.interval_count(alpha, 10 ** 4, 5, 0.25, 0.75)
        assert abs(cnt - expect) < (10 ** 4) ** 0.9


class TestContinuedFraction:
    def test_log10_2_convergents(self):
        convs = eq.continued_fraction(eq.log_ratio(2, 10), 12)
        for pair in [(1, 3), (3, 10), (28, 93), (59, 196)]:
            assert pair in convs

    def test_two_precisions_agree(self):
        a = eq.continued_fraction(eq.log_ratio(2, 10, dps=500), 40, dps=500)
        b = eq.continued_fraction(eq.log_ratio(2, 10, dps=750), 40, dps=750)
        assert a == b

    def test_golden_ratio_fibonacci(self):
        with mpmath.workdps(80):
            golden = (mpmath.sqrt(5) + 1) / 2
            convs = eq.continued_fraction(golden, 10, dps=60)
        fib = [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]
        assert all(p == fib[i + 1] and q == fib[i]
                   for i, (p, q) in enumerate(convs))

    def test_convergent_quality(self):
        convs = eq.continued_fraction(eq.log_ratio(2, 10), 20)
        with mpmath.workdps(520):
            a = mpmath.log(2) / mpmath.log(10)
            for p, q in convs:
                assert abs(a - mpmath.mpf(p) / q) < mpmath.mpf(1) / (q * q)

    def test_rational_rejected(self):
        with pytest.raises(DomainError):
            eq.continued_fraction(Fraction(3, 7), 5)

    def test_depth_beyond_certification_errors(self):
        with pytest.raises(eq.PrecisionError):
            eq.continued_fraction(0.5 + 1e-9, 40)


class TestTypeProbe:
    def test_sqrt2_is_type_one(self):
        with mpmath.workdps(220):
            probe = eq.type_probe(mpmath.sqrt(2), 25,
                                  (0.5, 0.8, 0.9, 0.95, 1.0, 1.25), dps=200)
        assert probe.empirical_type is not None
        assert 0.85 <= probe.empirical_type <= 1.0
        assert probe.slopes[1.25] > eq._SLOPE_TREND  # diverges above type

    def test_log10_2_gamma_half_tends_to_zero(self):
        probe = eq.type_probe(eq.log_ratio(2, 10), 20, (0.5,))
        vals = probe.quality[0.5]
        assert vals[-1] < 0.05 * vals[0]

    def test_rational_rejected(self):
        with pytest.raises(DomainError):
            eq.type_probe(Fraction(1, 3), 5, (0.5,))

    def test_csv_rows(self):
        probe = eq.type_probe(eq.log_ratio(2, 10), 6, (0.5, 1.0))
        rows = list(probe.to_csv_rows())
        assert rows[0][:2] == ["p", "q"]
        assert len(rows) == 7


class TestThetaIdentity:
    @pytest.mark.parametrize("sigma", [0.1, 0.5, 1.0, 2.0, 10.0, 50.0])
    def test_residual_below_1e12(self, sigma):
        assert eq.theta_identity_residual(sigma) < 1e-12

    def test_user_cutoff_is_enlarged(self):
        assert eq.theta_identity_residual(0.1, cutoff=2) < 1e-12

    def test_sigma_positive(self):
        with pytest.raises(DomainError):
            eq.theta_identity_residual(0.0)

    @given(st.floats(0.05, 60.0))
    @settings(max_examples=30, deadline=None)
    def test_residual_small_everywhere(self, sigma):
        assert eq.theta_identity_residual(sigma) < 1e-11


class TestGaussianSpread:
    def test_density_normalized(self):
        val, _ = sintegrate.quad(eq.GaussianSpread.density, -12, 12)
        assert abs(val - 1.0) < 1e-12

    def test_total_mass(self):
        assert abs(eq.gaussian_mod1_mass(5.0, 0.0, 1.0) - 1.0) < 1e-6

    def test_spread_matches_closed_form(self):
        # Poisson-summation closed form is 0.5 to far more digits
        assert abs(eq.gaussian_mod1_mass(20.0, 0.2, 0.7) - 0.5) < 1e-8

    def test_large_scale_equidistributes(self):
        for a, b in ((0.0, 0.3), (0.3, 0.7), (0.2, 0.9)):
            assert abs(eq.gaussian_mod1_mass(10.0, a, b) - (b - a)) < 1e-8

    def test_small_scale_does_not_equidistribute(self):
        # mass concentrates at 0; an asymmetric interval exposes it
        assert abs(eq.gaussian_mod1_mass(0.1, 0.0, 0.3) - 0.3) > 0.15

    def test_interval_validation(self):
        with pytest.raises(DomainError):
            eq.gaussian_mod1_mass(1.0, 0.7, 0.2)


class TestConditions:
    def test_char_decay_at_one(self):
        s1 = eq.condition_char_decay(1.0)
        lead = 2.0 * math.exp(-2.0 * math.pi ** 2)
        assert abs(s1 - lead) < 0.01 * lead
        assert s1 < 1e-8

    def test_char_decay_huge_scale_underflows_to_zero(self):
        assert eq.condition_char_decay(10.0) == 0.0

    def test_char_decay_monotone(self):
        # below ~1.4 the sum is above the 1e-18 truncation floor
        for t in (0.2, 0.35, 0.5):
            assert eq.condition_char_decay(2 * t) < eq.condition_char_decay(t)

    def test_tail_mass(self):
        assert abs(eq.condition_tail_mass(3.0, 0.0) - 1.0) < 1e-15
        assert abs(eq.condition_tail_mass(3.0, 5.0) - 5.733e-7) < 1e-9

    def test_tail_mass_scale_free(self):
        assert eq.condition_tail_mass(1.0, 2.5) == \
            eq.condition_tail_mass(1000.0, 2.5)
