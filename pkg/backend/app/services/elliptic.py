"""
Elliptic curve reduction, point counting and Frobenius traces a_p.

Good primes p > 3 are counted in O(p) after completing the square: with
Y = 2y + a1 x + a3 the model becomes Y^2 = 4x^3 + b2 x^2 + 2 b4 x + b6 and
the number of affine points is the number of square roots of f(x) summed
over x. Primes 2 and 3 are enumerated directly. At bad primes a_p is
p - #E_ns(F_p), the nonsingular points of the reduced model including the
point at infinity, which gives 1, -1 or 0 for split, nonsplit or additive
reduction without classifying the singularity symbolically.
"""

import logging
import math
from typing import List, Tuple

import numpy as np

from ..core.errors import BoundsError, InvariantViolation, PreconditionError
from ..models.curve import EllipticCurve
from ..models.primes import PrimeTable
from ..utils.arith import sieve_primes

logger = logging.getLogger(__name__)


def discriminant(E: EllipticCurve) -> int:
    """Weierstrass discriminant from the b2, b4, b6, b8 covariants."""
    return E.discriminant


def _reduced(E: EllipticCurve, p: int) -> Tuple[int, ...]:
    return tuple(a % p for a in E.ainvs)


def _affine_mask(E: EllipticCurve, p: int):
    """Boolean (x, y) grid of affine solutions mod p, plus the grids."""
    a1, a2, a3, a4, a6 = _reduced(E, p)
    X, Y = np.meshgrid(np.arange(p, dtype=np.int64), np.arange(p, dtype=np.int64))
    lhs = (Y * Y + a1 * X * Y + a3 * Y) % p
    rhs = (((X + a2) * X % p + a4) * X + a6) % p
    return lhs == rhs, X, Y


def count_points_naive(E: EllipticCurve, p: int) -> int:
    """Projective points of the reduced model by enumerating all (x, y)."""
    mask, _, _ = _affine_mask(E, p)
    return int(mask.sum()) + 1


def count_nonsingular_naive(E: EllipticCurve, p: int) -> int:
    """Nonsingular projective points of the reduced model, by enumeration."""
    a1, a2, a3, a4, _ = _reduced(E, p)
    mask, X, Y = _affine_mask(E, p)
    fx = (a1 * Y - 3 * X * X - 2 * a2 * X - a4) % p
    fy = (2 * Y + a1 * X + a3) % p
    singular = mask & (fx == 0) & (fy == 0)
    # the point at infinity is always smooth on a Weierstrass cubic
    return int(mask.sum() - singular.sum()) + 1


def _completed_square(E: EllipticCurve, p: int) -> np.ndarray:
    """f(x) = 4x^3 + b2 x^2 + 2 b4 x + b6 mod p for every x in F_p."""
    b2, b4, b6, _ = (b % p for b in E.b_invariants)
    x = np.arange(p, dtype=np.int64)
    f = (4 * x + b2) % p
    f = (f * x + 2 * b4) % p
    return (f * x + b6) % p


def _square_root_counts(p: int) -> np.ndarray:
    y = np.arange(p, dtype=np.int64)
    return np.bincount(y * y % p, minlength=p)


def _affine_count_fast(E: EllipticCurve, p: int) -> int:
    return int(_square_root_counts(p)[_completed_square(E, p)].sum())


def count_points(E: EllipticCurve, p: int) -> int:
    """#E(F_p) including the point at infinity, for a prime of good reduction."""
    if E.discriminant % p == 0:
        raise PreconditionError(
            f"{E.label} has bad reduction at p={p}; use ap() for bad primes"
        )
    if p <= 3:
        return count_points_naive(E, p)
    return _affine_count_fast(E, p) + 1


def _nonsingular_count(E: EllipticCurve, p: int) -> int:
    if p <= 3:
        return count_nonsingular_naive(E, p)
    b2, b4, _, _ = (b % p for b in E.b_invariants)
    f = _completed_square(E, p)
    x = np.arange(p, dtype=np.int64)
    df = ((12 * x + 2 * b2) % p * x + 2 * b4) % p
    singular = int(np.count_nonzero((f == 0) & (df == 0)))
    return _affine_count_fast(E, p) - singular + 1


def ap(E: EllipticCurve, p: int) -> int:
    """Trace of Frobenius a_p(E) at any prime p."""
    if E.discriminant % p != 0:
        value = p + 1 - count_points(E, p)
        if value * value > 4 * p:
            raise InvariantViolation(
                f"Hasse bound violated for {E.label} at p={p}: a_p={value}"
            )
        return value
    value = p - _nonsingular_count(E, p)
    if value not in (-1, 0, 1):
        raise InvariantViolation(
            f"bad-prime a_p={value} for {E.label} at p={p}; model is not minimal?"
        )
    return value


def reduction_type(E: EllipticCurve, p: int) -> str:
    """'good', 'split', 'nonsplit' or 'additive' reduction at p."""
    if E.discriminant % p != 0:
        return "good"
    return {1: "split", -1: "nonsplit", 0: "additive"}[ap(E, p)]


def ap_array(E: EllipticCurve, primes: PrimeTable) -> np.ndarray:
    """a_p for every prime of the table, in table order."""
    return np.fromiter(
        (ap(E, int(p)) for p in primes.primes), dtype=np.int64, count=len(primes)
    )


def ap_vector(E: EllipticCurve, limit: int) -> List[Tuple[int, int]]:
    """[(p, a_p)] for all primes p < limit, ascending in p."""
    if limit < 2:
        raise BoundsError(f"ap_vector limit {limit} must be >= 2")
    primes = sieve_primes(limit)
    values = ap_array(E, primes)
    return list(zip(primes.tolist(), values.tolist()))


def hasse_interval(p: int) -> Tuple[float, float]:
    r = 2 * math.sqrt(p)
    return p + 1 - r, p + 1 + r
