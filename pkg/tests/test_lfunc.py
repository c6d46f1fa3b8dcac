import math

import mpmath
import numpy as np
import pytest

from app.core.errors import AccuracyError, BoundsError, PoleError
from app.models.character import DirichletCharacter
from app.models.zeros import EvalAccuracy
from app.services.dirichlet import conjugate, value_table
from app.services.lfunc import (
    dirichlet_l,
    find_zeros,
    find_zeros_many,
    hardy_rotation,
    hardy_z,
    hurwitz_zeta,
    log_derivative_at_1,
    zero_count_estimate,
    zero_count_slack,
)

CATALAN = 0.91596559417721901505


def _mp_dirichlet(s, chi):
    return complex(mpmath.dirichlet(s, [complex(v) for v in value_table(chi)]))


class TestHurwitz:
    def test_half_shift_at_two(self, acc):
        assert abs(hurwitz_zeta(2.0, 0.5, acc) - math.pi**2 / 2) <= 1e-10

    def test_riemann_zeta_at_two(self, acc):
        assert abs(hurwitz_zeta(2.0, 1.0, acc) - math.pi**2 / 6) <= 1e-10

    @pytest.mark.parametrize(
        "s, a", [(0.5 + 10j, 0.3), (0.5 + 60j, 0.9), (-1.5 + 2j, 0.25), (3.0, 0.1)]
    )
    def test_against_mpmath(self, acc, s, a):
        expected = complex(mpmath.zeta(s, a))
        assert abs(hurwitz_zeta(s, a, acc) - expected) <= 1e-9 * max(1, abs(expected))

    def test_pole(self, acc):
        with pytest.raises(PoleError):
            hurwitz_zeta(1.0, 0.5, acc)

    @pytest.mark.parametrize("a", [0.0, -0.2, 1.5])
    def test_shift_range(self, acc, a):
        with pytest.raises(BoundsError):
            hurwitz_zeta(2.0, a, acc)

    def test_insufficient_accuracy_reported(self):
        crude = EvalAccuracy(abs_tol=1e-15, em_terms=2, shift_terms=1)
        with pytest.raises(AccuracyError):
            hurwitz_zeta(0.5 + 0.1j, 0.5, crude)


class TestDirichletL:
    def test_leibniz(self, acc):
        chi = DirichletCharacter.kronecker(-4)
        assert abs(dirichlet_l(1.0, chi, acc) - math.pi / 4) <= 1e-8

    def test_catalan(self, acc):
        chi = DirichletCharacter.kronecker(-4)
        assert abs(dirichlet_l(2.0, chi, acc) - CATALAN) <= 1e-9

    def test_class_number_formula_for_five(self, acc):
        golden = (1 + math.sqrt(5)) / 2
        expected = 2 * math.log(golden) / math.sqrt(5)
        chi = DirichletCharacter.kronecker(5)
        assert abs(dirichlet_l(1.0, chi, acc) - expected) <= 1e-8

    @pytest.mark.parametrize("s", [0.5 + 14j, 0.5 + 3j, 2.0 - 5j, 0.2])
    def test_complex_character_against_mpmath(self, acc, s):
        chi = DirichletCharacter.mod_prime(7, 1)
        assert abs(dirichlet_l(s, chi, acc) - _mp_dirichlet(s, chi)) <= 1e-9

    def test_vectorised_matches_scalar(self, acc):
        chi = DirichletCharacter.mod_prime(11, 3)
        s = 0.5 + 1j * np.linspace(0, 40, 9)
        values = dirichlet_l(s, chi, acc)
        for si, v in zip(s, values):
            assert abs(v - dirichlet_l(complex(si), chi, acc)) <= 1e-10

    def test_conjugate_character_gives_conjugate_values(self, acc):
        chi = DirichletCharacter.mod_prime(13, 2)
        s = 0.5 + 7j
        left = dirichlet_l(s, conjugate(chi), acc)
        right = dirichlet_l(s.conjugate(), chi, acc).conjugate()
        assert abs(left - right) <= 1e-10


class TestHardyZ:
    @pytest.mark.parametrize(
        "chi",
        [
            DirichletCharacter.kronecker(5),
            DirichletCharacter.kronecker(-4),
            DirichletCharacter.mod_prime(7, 1),
            DirichletCharacter.mod_prime(13, 4),
        ],
    )
    def test_modulus_matches_l_value(self, acc, chi):
        t = np.linspace(0.5, 30, 25)
        z = hardy_z(t, chi, acc)
        l_values = dirichlet_l(0.5 + 1j * t, chi, acc)
        np.testing.assert_allclose(np.abs(z), np.abs(l_values), atol=1e-9)

    def test_rotation_is_unit_and_cached(self, acc):
        chi = DirichletCharacter.mod_prime(11, 1)
        unit = hardy_rotation(chi, acc)
        assert abs(abs(unit) - 1) < 1e-12
        assert hardy_rotation(chi, acc) == unit

    def test_scalar_returns_float(self, acc, chi5):
        assert isinstance(hardy_z(3.0, chi5, acc), float)

    @pytest.mark.parametrize("D", [5, 8, 13, -4])
    def test_even_in_t_for_real_characters(self, acc, D):
        chi = DirichletCharacter.kronecker(D)
        t = np.linspace(0.5, 25, 15)
        np.testing.assert_allclose(
            hardy_z(-t, chi, acc), hardy_z(t, chi, acc), atol=1e-8
        )

    def test_rotation_served_from_cache(self, acc):
        chi = DirichletCharacter.mod_prime(23, 3)
        first = hardy_rotation(chi, acc)
        hits = hardy_rotation.cache_info().hits
        assert hardy_rotation(chi, acc) == first
        assert hardy_rotation.cache_info().hits == hits + 1


class TestZeros:
    def test_first_zero_of_chi_minus_4(self, acc):
        zl = find_zeros(DirichletCharacter.kronecker(-4), 10.0, acc)
        assert abs(zl.gammas[0] - 6.020948904697597) <= 1e-5

    def test_first_zero_of_chi_5(self, acc, chi5):
        zl = find_zeros(chi5, 10.0, acc)
        assert 6 < zl.gammas[0] < 7

    def test_real_character_shares_zeros_with_conjugate(self, acc):
        chi = DirichletCharacter.kronecker(8)
        own = find_zeros(chi, 20.0, acc)
        conj = find_zeros(conjugate(chi), 20.0, acc)
        np.testing.assert_allclose(own.gammas, conj.gammas, atol=1e-6)

    @pytest.mark.parametrize(
        "chi",
        [
            DirichletCharacter.kronecker(5),
            DirichletCharacter.kronecker(8),
            DirichletCharacter.mod_prime(11, 3),
        ],
    )
    def test_zeros_are_zeros(self, acc, chi):
        T = 30.0
        zl = find_zeros(chi, T, acc)
        assert len(zl) > 0
        assert abs(len(zl) - zero_count_estimate(chi.modulus, T)) <= zero_count_slack(
            chi.modulus, T
        )
        values = np.abs(dirichlet_l(0.5 + 1j * zl.gammas, chi, acc))
        assert np.all(values < 1e-4)
        assert np.all(np.diff(zl.gammas) > 0)
        assert zl.gammas[-1] <= T

    def test_bracket_width(self, acc, chi5):
        zl = find_zeros(chi5, 25.0, acc)
        tol = 1e-6
        left = hardy_z(zl.gammas - tol / 2, chi5, acc)
        right = hardy_z(zl.gammas + tol / 2, chi5, acc)
        assert np.all(np.sign(left) != np.sign(right))

    def test_tiny_height_gives_no_zeros(self, acc, chi5):
        assert len(find_zeros(chi5, 1e-9, acc)) == 0

    def test_height_must_be_positive(self, acc, chi5):
        with pytest.raises(BoundsError):
            find_zeros(chi5, 0.0, acc)

    def test_many_keyed_by_id(self, acc):
        chars = [DirichletCharacter.kronecker(D) for D in (5, 8, 12)]
        zeros = find_zeros_many(chars, 15.0, acc)
        assert sorted(zeros) == ["kron:12", "kron:5", "kron:8"]
        assert zeros["kron:5"].source == "computed"

    def test_counting_function(self):
        assert zero_count_estimate(5, 0.0) == 0.0
        expected = (100 / (2 * math.pi)) * math.log(500 / (2 * math.pi * math.e))
        assert zero_count_estimate(5, 100.0) == pytest.approx(expected)


class TestLogDerivative:
    @pytest.mark.parametrize(
        "chi", [DirichletCharacter.kronecker(5), DirichletCharacter.mod_prime(13, 2)]
    )
    def test_against_stieltjes_oracle(self, acc, chi):
        """Test L'/L at 1 against the Laurent data of the Hurwitz zeta at s = 1"""
        q = chi.modulus
        chibar = value_table(conjugate(chi))

        def laurent(n):
            return sum(
                complex(chibar[k]) * mpmath.stieltjes(n, mpmath.mpf(k) / q)
                for k in range(1, q)
            )

        a, b = laurent(0), laurent(1)
        expected = -math.log(q) - complex(b / a)
        assert abs(log_derivative_at_1(chi, acc) - expected) <= 1e-6

    def test_step_halving_is_stable(self, acc, chi5):
        a = log_derivative_at_1(chi5, acc, h0=0.125)
        b = log_derivative_at_1(chi5, acc, h0=0.0625)
        assert abs(a - b) <= 1e-6
