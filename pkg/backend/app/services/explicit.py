"""
Both sides of the two explicit formulas, evaluated for a single object.

Elliptic curves:
    (log x / sqrt x) sum_{p<x} a_p / sqrt p
        = 1 - 2 r(E) - sum_{n != 0} x^{i gamma_n} / (1/2 + i gamma_n) + Err_E(x)

Even primitive characters:
    (1 / sqrt x) sum_{p<x} chi(p) log p
        = -log x / sqrt x - sum_gamma x^{i gamma} / (1/2 + i gamma) + R_chi(x)

Every function accepts a scalar x or an array of x and answers in kind. The
prime sums use the strict inequality p < x; an x within INTEGER_SNAP of an
integer is snapped to that integer first, so x = p never counts p. The
jump of the prime side at prime x is left in place.
"""

import logging
import math
from typing import Optional, Union

import numpy as np

from ..core.config import settings
from ..core.errors import BoundsError, ParityError, WiringError
from ..models.character import DirichletCharacter
from ..models.curve import EllipticCurve
from ..models.formula import FormulaSideSample, RChiBreakdown, Truncation
from ..models.primes import PrimeTable
from ..models.zeros import EvalAccuracy, ZeroList
from ..utils.arith import prime_powers, sieve_primes
from .dirichlet import char_values
from .elliptic import ap_array
from .lfunc import log_derivative_at_1

logger = logging.getLogger(__name__)

EULER_MASCHERONI = 0.57721566490153286061

_ZERO_BLOCK = 1 << 20


def _as_x(x) -> np.ndarray:
    xv = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(xv <= 1):
        raise BoundsError("explicit formulas need x > 1")
    nearest = np.rint(xv)
    return np.where(np.abs(xv - nearest) < settings.INTEGER_SNAP, nearest, xv)


def _out(x, values):
    return values[0] if np.ndim(x) == 0 else values.reshape(np.shape(x))


def _require_table(primes: PrimeTable, xv: np.ndarray):
    if primes.limit < float(np.max(xv)):
        raise BoundsError(
            f"prime table limit {primes.limit} below x={float(np.max(xv)):g}"
        )


def _prime_cumsum(primes: PrimeTable, weights: np.ndarray, xv: np.ndarray):
    """sum_{p < x} w_p for every x, using a prepended zero."""
    csum = np.concatenate([[0], np.cumsum(weights)])
    return csum[primes.count_below(xv)]


def lhs_elliptic(
    E: EllipticCurve, x, primes: PrimeTable, ap_values: Optional[np.ndarray] = None
):
    """(log x / sqrt x) sum_{p<x} a_p(E) / sqrt p."""
    xv = _as_x(x)
    _require_table(primes, xv)
    if ap_values is None:
        ap_values = ap_array(E, primes)
    weights = ap_values / np.sqrt(primes.primes.astype(np.float64))
    values = np.log(xv) / np.sqrt(xv) * _prime_cumsum(primes, weights, xv)
    return _out(x, values)


def zero_pair_term(gamma, x):
    """x^{i g}/(1/2+i g) + x^{-i g}/(1/2-i g) = [cos(g L) + 2 g sin(g L)]/(1/4+g^2)."""
    gamma = np.asarray(gamma, dtype=np.float64)
    theta = gamma * np.log(np.asarray(x, dtype=np.float64))
    values = (np.cos(theta) + 2 * gamma * np.sin(theta)) / (0.25 + gamma * gamma)
    return values if np.ndim(values) else float(values)


def signed_ordinates(own: ZeroList, conj: Optional[ZeroList] = None) -> np.ndarray:
    """Signed ordinates of one L-function: its own positive zeros together
    with the negated positive zeros of the conjugate (itself when real)."""
    conj = own if conj is None else conj
    return np.sort(np.concatenate([-conj.gammas[::-1], own.gammas]))


def _truncate_positive(gammas: np.ndarray, trunc: Optional[Truncation]) -> np.ndarray:
    if trunc is None:
        return gammas
    if trunc.mode == "count":
        return gammas[: int(trunc.value)]
    return gammas[gammas <= trunc.value]


def _select(zeros, trunc: Optional[Truncation]):
    """(positive ordinates for pairing, remaining signed ordinates)."""
    if isinstance(zeros, ZeroList):
        return _truncate_positive(zeros.gammas, trunc), np.empty(0)
    signed = np.asarray(zeros, dtype=np.float64)
    pos = np.sort(signed[signed > 0])
    neg = np.sort(-signed[signed < 0])
    if np.any(signed == 0):
        logger.warning("zero ordinate in signed list ignored; handle central zeros apart")
    return np.empty(0), np.concatenate(
        [_truncate_positive(pos, trunc), -_truncate_positive(neg, trunc)]
    )


def zero_sum_truncated(
    zeros: Union[ZeroList, np.ndarray], x, trunc: Optional[Truncation] = None
):
    """sum over selected ordinates of x^{i gamma} / (1/2 + i gamma).

    A ZeroList stands for a self-conjugate object (elliptic curve or real
    character): its ordinates come in +/- pairs and the sum is evaluated with
    the real pair formula. A plain array is taken as signed ordinates.
    """
    xv = np.atleast_1d(np.asarray(x, dtype=np.float64))
    logx = np.log(xv)
    paired, signed = _select(zeros, trunc)
    total = np.zeros(xv.size, dtype=np.complex128)

    rows = max(1, _ZERO_BLOCK // max(1, xv.size))
    for start in range(0, paired.size, rows):
        g = paired[start : start + rows, None]
        theta = g * logx[None, :]
        total += np.sum((np.cos(theta) + 2 * g * np.sin(theta)) / (0.25 + g * g), axis=0)
    for start in range(0, signed.size, rows):
        g = signed[start : start + rows, None]
        total += np.sum(np.exp(1j * g * logx[None, :]) / (0.5 + 1j * g), axis=0)
    return _out(x, total)


def rhs_elliptic(
    E: EllipticCurve, zeros: ZeroList, x, trunc: Optional[Truncation] = None
):
    """1 - 2 r(E) - (truncated zero sum); Err_E(x) is not included."""
    if zeros.object_id != E.label:
        raise WiringError(f"zeros of {zeros.object_id} passed for curve {E.label}")
    _as_x(x)
    return 1 - 2 * E.rank - np.real(zero_sum_truncated(zeros, x, trunc))


def elliptic_sample(
    E: EllipticCurve,
    zeros: ZeroList,
    x,
    primes: PrimeTable,
    trunc: Optional[Truncation] = None,
    ap_values: Optional[np.ndarray] = None,
) -> FormulaSideSample:
    """Both sides at x; the residual estimates Err_E(x) plus truncation error."""
    if zeros.object_id != E.label:
        raise WiringError(f"zeros of {zeros.object_id} passed for curve {E.label}")
    lhs = lhs_elliptic(E, x, primes, ap_values)
    zsum = np.real(zero_sum_truncated(zeros, x, trunc))
    corrections = 1.0 - 2 * E.rank
    return FormulaSideSample(
        x=x,
        lhs=lhs,
        zero_sum=zsum,
        corrections=corrections,
        residual=lhs - (corrections - zsum),
    )


def lhs_dirichlet(chi: DirichletCharacter, x, primes: PrimeTable):
    """(1 / sqrt x) sum_{p<x} chi(p) log p."""
    xv = _as_x(x)
    _require_table(primes, xv)
    p = primes.primes
    weights = char_values(chi, p) * np.log(p.astype(np.float64))
    values = _prime_cumsum(primes, weights, xv) / np.sqrt(xv)
    return _out(x, values)


def prime_power_sum(chi: DirichletCharacter, x):
    """sum_{k>=2} sum_{p^k < x} chi(p^k) log p."""
    xv = _as_x(x)
    powers = prime_powers(int(math.floor(float(np.max(xv)))) + 1)
    if not powers:
        return _out(x, np.zeros(xv.size, dtype=np.complex128))
    values = np.array([pp.value for pp in powers], dtype=np.int64)
    logs = np.log(np.array([pp.p for pp in powers], dtype=np.float64))
    csum = np.concatenate([[0], np.cumsum(char_values(chi, values) * logs)])
    return _out(x, csum[np.searchsorted(values, xv, side="left")])


def _require_even(chi: DirichletCharacter):
    if chi.parity != 0:
        raise ParityError(
            f"{chi.id} is odd; the remainder R_chi is stated for even characters only"
        )


def r_chi(
    chi: DirichletCharacter,
    x,
    acc: Optional[EvalAccuracy] = None,
    log_deriv: Optional[complex] = None,
) -> RChiBreakdown:
    """R_chi(x) and its five components for an even primitive character."""
    _require_even(chi)
    xv = _as_x(x)
    if log_deriv is None:
        log_deriv = log_derivative_at_1(chi, acc)
    conductor_term = math.log(chi.modulus / (2 * math.pi))
    trivial = -0.5 * np.log1p(-(xv**-2.0))
    pp_sum = np.atleast_1d(prime_power_sum(chi, xv))
    total = (
        log_deriv + conductor_term - EULER_MASCHERONI + trivial - pp_sum
    ) / np.sqrt(xv)
    return RChiBreakdown(
        x=x,
        log_deriv=complex(log_deriv),
        conductor_term=conductor_term,
        euler_mascheroni=EULER_MASCHERONI,
        trivial_zero_term=_out(x, trivial),
        prime_power_sum=_out(x, pp_sum),
        total=_out(x, total),
    )


def dirichlet_sample(
    chi: DirichletCharacter,
    signed_zeros: np.ndarray,
    x,
    primes: PrimeTable,
    acc: Optional[EvalAccuracy] = None,
    trunc: Optional[Truncation] = None,
    log_deriv: Optional[complex] = None,
) -> FormulaSideSample:
    _require_even(chi)
    xv = _as_x(x)
    lhs = np.atleast_1d(lhs_dirichlet(chi, xv, primes))
    zsum = np.atleast_1d(zero_sum_truncated(np.asarray(signed_zeros), xv, trunc))
    R = np.atleast_1d(r_chi(chi, xv, acc, log_deriv).total)
    corrections = -np.log(xv) / np.sqrt(xv) + R
    return FormulaSideSample(
        x=x,
        lhs=_out(x, lhs),
        zero_sum=_out(x, zsum),
        corrections=_out(x, corrections),
        residual=_out(x, lhs - (corrections - zsum)),
    )


def dirichlet_residual(
    chi: DirichletCharacter,
    signed_zeros: np.ndarray,
    x,
    primes: PrimeTable,
    acc: Optional[EvalAccuracy] = None,
    trunc: Optional[Truncation] = None,
    log_deriv: Optional[complex] = None,
):
    """lhs - [-log x / sqrt x - zero sum + R_chi(x)]: the zero-truncation error."""
    return dirichlet_sample(
        chi, signed_zeros, x, primes, acc, trunc, log_deriv
    ).residual


def near_prime_mask(x, primes: PrimeTable, tol: float) -> np.ndarray:
    """True where x lies within tol of a prime of the table."""
    xv = np.atleast_1d(np.asarray(x, dtype=np.float64))
    p = primes.primes.astype(np.float64)
    if p.size == 0:
        return np.zeros(xv.size, dtype=bool)
    idx = np.clip(np.searchsorted(p, xv), 1, p.size - 1) if p.size > 1 else np.zeros(
        xv.size, dtype=np.int64
    )
    nearest = np.minimum(np.abs(xv - p[idx]), np.abs(xv - p[np.maximum(idx - 1, 0)]))
    return nearest <= tol


def prime_power_mask(x, width: float) -> np.ndarray:
    """True where x lies within width of some prime power p^k, k >= 1."""
    xv = np.atleast_1d(np.asarray(x, dtype=np.float64))
    limit = int(math.ceil(float(np.max(xv)) + width)) + 2
    points = np.sort(
        np.concatenate(
            [
                sieve_primes(limit).primes.astype(np.float64),
                np.array([pp.value for pp in prime_powers(limit)], dtype=np.float64),
            ]
        )
    )
    idx = np.clip(np.searchsorted(points, xv), 1, points.size - 1)
    nearest = np.minimum(np.abs(xv - points[idx]), np.abs(xv - points[idx - 1]))
    return nearest <= width
