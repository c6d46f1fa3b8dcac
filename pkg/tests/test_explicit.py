import math

import numpy as np
import pytest

from app.core.errors import BoundsError, ParityError, WiringError
from app.models.character import DirichletCharacter
from app.models.formula import Truncation
from app.models.zeros import ZeroList
from app.services.explicit import (
    EULER_MASCHERONI,
    dirichlet_residual,
    dirichlet_sample,
    elliptic_sample,
    lhs_dirichlet,
    lhs_elliptic,
    near_prime_mask,
    prime_power_mask,
    prime_power_sum,
    r_chi,
    rhs_elliptic,
    signed_ordinates,
    zero_pair_term,
    zero_sum_truncated,
)
from app.services.lfunc import find_zeros
from app.utils.arith import sieve_primes


class TestTruncation:
    def test_parse(self):
        assert Truncation.parse("count:50") == Truncation(mode="count", value=50)
        assert Truncation.parse("height:12.5").value == 12.5

    @pytest.mark.parametrize(
        "text", ["count:2.5", "height:0", "height:-1", "depth:3", "count", "count:x"]
    )
    def test_rejects(self, text):
        with pytest.raises(BoundsError):
            Truncation.parse(text)

    def test_str(self):
        assert str(Truncation.parse("count:7")) == "count:7"
        assert str(Truncation.parse("height:30")) == "height:30"


class TestPrimeSides:
    def test_lhs_dirichlet_at_ten(self, chi5, primes_2001):
        expected = -math.log(42) / math.sqrt(10)
        assert lhs_dirichlet(chi5, 10, primes_2001) == pytest.approx(expected, abs=1e-12)

    def test_prime_at_x_is_excluded(self, chi5, primes_2001):
        """x = 7 counts only 2, 3, 5; a hair off 7 snaps back to it"""
        expected = -math.log(6) / math.sqrt(7)
        assert lhs_dirichlet(chi5, 7.0, primes_2001) == pytest.approx(expected)
        assert lhs_dirichlet(chi5, 7.0 + 1e-12, primes_2001) == pytest.approx(expected)
        above = -math.log(42) / math.sqrt(7.5)
        assert lhs_dirichlet(chi5, 7.5, primes_2001) == pytest.approx(above)

    def test_lhs_elliptic_at_four(self, curve_11a1, primes_2001):
        expected = math.log(4) / 2 * (-2 / math.sqrt(2) - 1 / math.sqrt(3))
        value = lhs_elliptic(curve_11a1, 4.0, primes_2001)
        assert value == pytest.approx(expected, abs=1e-12)
        assert value == pytest.approx(-1.38045, abs=1e-5)

    def test_array_in_array_out(self, curve_11a1, primes_2001):
        x = np.array([[3.0, 4.0], [10.0, 100.0]])
        values = lhs_elliptic(curve_11a1, x, primes_2001)
        assert values.shape == (2, 2)
        assert values[0, 1] == lhs_elliptic(curve_11a1, 4.0, primes_2001)

    @pytest.mark.parametrize("x", [1.0, 0.5, -3.0])
    def test_domain(self, chi5, primes_2001, x):
        with pytest.raises(BoundsError):
            lhs_dirichlet(chi5, x, primes_2001)

    def test_table_must_cover_x(self, chi5):
        with pytest.raises(BoundsError):
            lhs_dirichlet(chi5, 500.0, sieve_primes(100))

    def test_prime_power_sum_at_ten(self, chi5):
        # 4 -> log 2, 8 -> -log 2, 9 -> log 3
        assert prime_power_sum(chi5, 10) == pytest.approx(math.log(3))
        assert prime_power_sum(chi5, 3.5) == 0


class TestZeroSums:
    def test_pair_term_value(self):
        assert zero_pair_term(1.0, math.exp(math.pi)) == pytest.approx(-0.8)

    def test_pair_term_matches_complex_form(self):
        g, x = 14.134725, 37.0
        direct = x ** (1j * g) / (0.5 + 1j * g) + x ** (-1j * g) / (0.5 - 1j * g)
        assert zero_pair_term(g, x) == pytest.approx(direct.real, abs=1e-12)
        assert abs(direct.imag) < 1e-12

    def test_count_truncation(self):
        zl = ZeroList(object_id="t", gammas=np.array([1.0, 3.0, 5.0]), height_bound=6)
        x = 17.0
        one = zero_sum_truncated(zl, x, Truncation.parse("count:1"))
        assert one.real == pytest.approx(zero_pair_term(1.0, x))
        below_four = zero_sum_truncated(zl, x, Truncation.parse("height:4"))
        expected = zero_pair_term(1.0, x) + zero_pair_term(3.0, x)
        assert below_four.real == pytest.approx(expected)

    def test_signed_list_counts_each_side(self):
        signed = np.array([-2.0, -1.0, 1.0, 3.0])
        x = 11.0
        value = zero_sum_truncated(signed, x, Truncation.parse("count:1"))
        assert value == pytest.approx(complex(zero_pair_term(1.0, x)), abs=1e-12)

    def test_paired_and_signed_forms_agree(self):
        zl = ZeroList(
            object_id="t", gammas=np.array([2.5, 7.1, 9.9]), height_bound=10.0
        )
        x = np.geomspace(2, 500, 40)
        paired = zero_sum_truncated(zl, x)
        signed = zero_sum_truncated(signed_ordinates(zl), x)
        np.testing.assert_allclose(paired, signed, atol=1e-12)

    def test_signed_ordinates_with_conjugate(self):
        own = ZeroList(object_id="a", gammas=np.array([1.0, 4.0]), height_bound=5)
        conj = ZeroList(object_id="b", gammas=np.array([2.0]), height_bound=5)
        assert signed_ordinates(own, conj).tolist() == [-2.0, 1.0, 4.0]

    def test_empty_zero_list(self):
        zl = ZeroList(object_id="t", gammas=np.empty(0), height_bound=1.0)
        assert zero_sum_truncated(zl, 5.0) == 0


class TestEllipticSides:
    def test_wiring(self, curve_11a1, synthetic_zeros, primes_2001):
        wrong = synthetic_zeros(["37a1"])["37a1"]
        with pytest.raises(WiringError):
            rhs_elliptic(curve_11a1, wrong, 10.0)
        with pytest.raises(WiringError):
            elliptic_sample(curve_11a1, wrong, 10.0, primes_2001)

    def test_sample_residual(self, curve_11a1, synthetic_zeros, primes_2001):
        zl = synthetic_zeros(["11a1"])["11a1"]
        x = np.geomspace(2, 2000, 50)
        sample = elliptic_sample(curve_11a1, zl, x, primes_2001)
        np.testing.assert_allclose(
            sample.residual, sample.lhs - rhs_elliptic(curve_11a1, zl, x), atol=1e-12
        )
        assert sample.corrections == 1.0

    def test_rank_enters_corrections(self, curves_by_label, synthetic_zeros, primes_2001):
        E = curves_by_label["37a1"]
        zl = synthetic_zeros(["37a1"])["37a1"]
        assert elliptic_sample(E, zl, 50.0, primes_2001).corrections == -1.0


class TestRemainder:
    def test_odd_character_refused(self, primes_2001):
        chi = DirichletCharacter.kronecker(-4)
        with pytest.raises(ParityError):
            r_chi(chi, 10.0, log_deriv=0.0)
        with pytest.raises(ParityError):
            dirichlet_sample(chi, np.array([6.02]), 10.0, primes_2001)

    def test_components(self, chi5):
        breakdown = r_chi(chi5, 2.0, log_deriv=0.25)
        assert breakdown.trivial_zero_term == pytest.approx(0.5 * math.log(4 / 3))
        assert breakdown.trivial_zero_term == pytest.approx(0.14384, abs=1e-5)
        assert breakdown.conductor_term == pytest.approx(math.log(5 / (2 * math.pi)))
        expected = (
            0.25
            + math.log(5 / (2 * math.pi))
            - EULER_MASCHERONI
            + 0.5 * math.log(4 / 3)
            - 0.0
        ) / math.sqrt(2)
        assert breakdown.total == pytest.approx(expected)

    def test_sample_bookkeeping(self, chi5, primes_2001):
        x = np.array([10.0, 25.0, 120.0])
        signed = np.array([-9.0, -4.0, 4.0, 9.0])
        sample = dirichlet_sample(chi5, signed, x, primes_2001, log_deriv=0.3)
        rebuilt = sample.lhs - (sample.corrections - sample.zero_sum)
        np.testing.assert_allclose(sample.residual, rebuilt, atol=1e-12)

    @pytest.mark.slow
    def test_residual_shrinks_with_height(self, chi5, acc, primes_2001):
        x = np.geomspace(20, 400, 300)
        x = x[~prime_power_mask(x, 0.5)]
        zeros = find_zeros(chi5, 80.0, acc)
        signed = signed_ordinates(zeros)

        def rms(T):
            r = dirichlet_residual(
                chi5, signed, x, primes_2001, acc, Truncation(mode="height", value=T)
            )
            return float(np.sqrt(np.mean(np.abs(r) ** 2)))

        assert rms(80.0) < rms(20.0) < rms(5.0)


class TestMasks:
    def test_near_prime(self):
        table = sieve_primes(100)
        mask = near_prime_mask(np.array([7.05, 8.5, 96.0, 2.0]), table, 0.1)
        assert mask.tolist() == [True, False, False, True]

    def test_prime_power(self):
        mask = prime_power_mask(np.array([8.2, 6.0, 10.5, 24.9, 2.3]), 0.3)
        assert mask.tolist() == [True, False, False, True, True]
