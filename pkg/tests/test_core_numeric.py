import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from benford_lab import core_numeric as cn

from conftest import make_rng


class TestMantissa:
    def test_decimal_shift(self):
        m = cn.mantissa(1230, 10)
        assert m.exponent == 3
        assert abs(m.significand - 1.23) < 1e-12

    def test_zero(self):
        assert cn.mantissa(0, 10).significand == 0.0
        assert cn.mantissa(0.0, 7).significand == 0.0

    def test_base2_fraction(self):
        m = cn.mantissa(0.04, 2)
        assert m.exponent == -5
        assert abs(m.significand - 1.28) < 1e-12
        assert abs(m.significand * 2.0 ** -5 - 0.04) < 1e-14

    def test_negative_uses_magnitude(self):
        assert cn.mantissa(-1230, 10) == cn.mantissa(1230, 10)

    def test_rejects_bad_inputs(self):
        with pytest.raises(cn.DomainError):
            cn.mantissa(float("inf"), 10)
        with pytest.raises(cn.DomainError):
            cn.mantissa(1.0, 1.0)
        with pytest.raises(cn.DomainError):
            cn.mantissa(1.0, 0.5)

    @given(st.floats(min_value=1e-300, max_value=1e300),
           st.sampled_from([2, 3, 10, 16, 2.5, math.e]))
    def test_round_trip(self, x, base):
        m = cn.mantissa(x, base)
        assert 1.0 <= m.significand < float(base)
        assert abs(m.value() - x) <= 1e-12 * x

    @given(st.integers(min_value=1, max_value=10 ** 40),
           st.sampled_from([2, 3, 10, 16]))
    def test_int_round_trip(self, x, base):
        m = cn.mantissa(x, base)
        assert 1.0 <= m.significand < base
        assert abs(m.value() - x) <= 1e-11 * x

    def test_exact_power_exponent(self):
        m = cn.mantissa(10 ** 50, 10)
        assert m.exponent == 50 and abs(m.significand - 1.0) < 1e-12
        m = cn.mantissa(10 ** 50 - 1, 10)
        assert m.exponent == 49


class TestLeadingDigit:
    def test_examples(self):
        assert cn.leading_digit(1230, 10) == 1
        assert cn.leading_digit(7, 4) == 1
        assert cn.leading_digit(2 ** 100, 10) == 1  # 1.2676e30

    def test_exact_decimal_expansion_oracle(self):
        assert str(2 ** 100)[0] == "1"
        rng = make_rng(8)
        for _ in range(300):
            nd = int(rng.integers(1, 80))
            v = cn.random_bignat(nd, 10, rng)
            assert cn.leading_digit(v, 10) == int(str(v)[0])

    def test_power_boundaries(self):
        assert cn.leading_digit(10 ** 500, 10) == 1
        assert cn.leading_digit(10 ** 500 - 1, 10) == 9
        assert cn.leading_digit(2 ** 3000, 2) == 1

    def test_zero_rejected(self):
        with pytest.raises(cn.DomainError):
            cn.leading_digit(0, 10)

    def test_float_inputs(self):
        assert cn.leading_digit(0.0456, 10) == 4
        assert cn.leading_digit(-7.2, 8) == 7

    @given(st.integers(min_value=1, max_value=10 ** 60),
           st.sampled_from([2, 3, 8, 10, 16]))
    def test_digit_log_window(self, x, base):
        d = cn.leading_digit(x, base)
        f = cn.log_mantissa(x, base)
        lb = math.log(base)
        in_window = math.log(d) / lb - 1e-9 <= f < math.log(d + 1) / lb + 1e-9
        # fractions within one ulp of the 0/1 seam may sit on either side
        wrapped = (d == base - 1 and f < 1e-9) or (d == 1 and f > 1.0 - 1e-9)
        assert in_window or wrapped


class TestLogMantissa:
    def test_examples(self):
        assert cn.log_mantissa(10, 10) == 0.0
        assert abs(cn.log_mantissa(2, 10) - 0.30102999566398) < 1e-12

    def test_scale_invariance(self):
        for x in (7, 123456, 3.75):
            a = cn.log_mantissa(x, 10)
            b = cn.log_mantissa(x * 10, 10)
            assert abs(a - b) < 1e-12

    def test_big_integer_against_high_precision(self):
        rng = make_rng(3)
        for nd in (500, 5000):
            x = cn.random_bignat(nd, 10, rng)
            got = cn.log_mantissa(x, 10)
            with mpmath.workdps(nd + 60):
                ref = float(mpmath.frac(mpmath.log(mpmath.mpf(x), 10)))
            assert abs(got - ref) < 1e-12

    def test_zero_rejected(self):
        with pytest.raises(cn.DomainError):
            cn.log_mantissa(0, 10)


class TestExactArithmetic:
    def test_mul_add_small(self):
        assert cn.mul_add_small(7, 3, 1) == 22
        assert cn.mul_add_small(1, 5, 1) == 6
        with pytest.raises(cn.DomainError):
            cn.mul_add_small(0, 3, -1)

    def test_mul_add_casting_out_nines(self):
        x = cn.random_bignat(100_000, 10, make_rng(17))
        y = cn.mul_add_small(x, 3, 1)
        assert y % 9 == (3 * (x % 9) + 1) % 9
        assert y == 3 * x + 1

    def test_shift_out_factor(self):
        assert cn.shift_out_factor(22, 2) == (11, 1)
        assert cn.shift_out_factor(48, 2) == (3, 4)
        assert cn.shift_out_factor(52, 2) == (13, 2)  # 3*17+1
        assert cn.shift_out_factor(45, 3) == (5, 2)
        with pytest.raises(cn.DomainError):
            cn.shift_out_factor(0, 2)

    @given(st.integers(min_value=1, max_value=10 ** 30),
           st.sampled_from([2, 3, 5, 7, 10]))
    def test_shift_out_factor_reconstructs(self, x, d):
        y, k = cn.shift_out_factor(x, d)
        assert y * d ** k == x
        assert y % d != 0


class TestRandomBignat:
    def test_length_contract(self):
        assert 1 <= cn.random_bignat(1, 10, make_rng(1)) <= 9
        x = cn.random_bignat(100_000, 10, make_rng(2))
        assert len(str(x)) == 100_000

    def test_determinism(self):
        a = cn.random_bignat(512, 10, make_rng(7))
        b = cn.random_bignat(512, 10, make_rng(7))
        assert a == b

    @given(st.integers(min_value=1, max_value=200),
           st.sampled_from([2, 5, 10, 16]))
    @settings(max_examples=30)
    def test_general_base_digit_count(self, nd, base):
        x = cn.random_bignat(nd, base, make_rng(nd))
        digits = []
        v = x
        while v:
            digits.append(v % base)
            v //= base
        assert len(digits) == nd
        assert 1 <= digits[-1] < base

    def test_digits_to_int_matches_str(self):
        rng = make_rng(5)
        digits = rng.integers(0, 10, size=2000)
        digits[0] = 3
        assert cn.digits_to_int(digits, 10) == int("".join(map(str, digits)))
