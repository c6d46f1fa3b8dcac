import math

import pytest
from pydantic import ValidationError

from app.core.errors import BoundsError, PreconditionError
from app.models.curve import CurveRecord, EllipticCurve
from app.services.elliptic import (
    ap,
    ap_array,
    ap_vector,
    count_nonsingular_naive,
    count_points,
    count_points_naive,
    discriminant,
    hasse_interval,
    reduction_type,
)
from app.utils.arith import sieve_primes


def test_discriminant_of_11a1(curve_11a1):
    assert discriminant(curve_11a1) == -161051
    assert curve_11a1.b_invariants == (-4, -20, -79, -21)


def test_36a1_discriminant(curves_by_label):
    assert discriminant(curves_by_label["36a1"]) == -432


def test_singular_model_rejected():
    with pytest.raises(ValidationError, match="cusp"):
        EllipticCurve(label="cusp", a1=0, a2=0, a3=0, a4=0, a6=0, conductor=1, rank=0)


def test_record_round_trip(curve_11a1):
    record = CurveRecord.from_curve(curve_11a1)
    assert record.to_curve() == curve_11a1


class TestTraces:
    def test_11a1_oracle(self, curve_11a1):
        """Test a_p of (0,-1,1,-10,-20) against brute-force values"""
        assert ap_vector(curve_11a1, 12) == [(2, -2), (3, -1), (5, 1), (7, -2), (11, 1)]

    def test_37a1_small_primes(self, curves_by_label):
        E = curves_by_label["37a1"]
        assert ap_vector(E, 8) == [(2, -2), (3, -3), (5, -2), (7, -1)]

    def test_fast_count_matches_enumeration(self, toy_curves):
        for E in toy_curves[:10]:
            for p in sieve_primes(200).tolist():
                if E.discriminant % p == 0:
                    continue
                assert count_points(E, p) == count_points_naive(E, p), (E.label, p)

    def test_hasse_bound(self, toy_curves):
        for E in toy_curves:
            for p, a in ap_vector(E, 500):
                assert abs(a) <= 2 * math.sqrt(p)

    def test_ap_array_matches_scalar(self, curve_11a1):
        primes = sieve_primes(100)
        values = ap_array(curve_11a1, primes)
        assert values.tolist() == [ap(curve_11a1, p) for p in primes.tolist()]

    def test_ap_vector_limit(self, curve_11a1):
        with pytest.raises(BoundsError):
            ap_vector(curve_11a1, 1)

    def test_hasse_interval_contains_counts(self, curve_11a1):
        for p in (13, 101, 997):
            lo, hi = hasse_interval(p)
            assert lo <= count_points(curve_11a1, p) <= hi


class TestBadReduction:
    def test_count_points_refuses_bad_prime(self, curve_11a1):
        with pytest.raises(PreconditionError):
            count_points(curve_11a1, 11)

    @pytest.mark.parametrize(
        "label, p, value, kind",
        [
            ("11a1", 11, 1, "split"),
            ("37a1", 37, -1, "nonsplit"),
            ("27a1", 3, 0, "additive"),
            ("36a1", 2, 0, "additive"),
            ("36a1", 3, 0, "additive"),
            ("32a1", 2, 0, "additive"),
        ],
    )
    def test_bad_prime_traces(self, curves_by_label, label, p, value, kind):
        E = curves_by_label[label]
        assert ap(E, p) == value
        assert reduction_type(E, p) == kind

    def test_fast_nonsingular_count_matches_enumeration(self, toy_curves):
        for E in toy_curves:
            for p in sieve_primes(400).tolist():
                if p > 3 and E.discriminant % p == 0:
                    assert p - ap(E, p) == count_nonsingular_naive(E, p), (E.label, p)

    def test_good_reduction_type(self, curve_11a1):
        assert reduction_type(curve_11a1, 13) == "good"
