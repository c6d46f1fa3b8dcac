"""
Numerical Dirichlet L-functions.

L(s, chi) is continued to the whole plane through Hurwitz zeta values,

    L(s, chi) = q^{-s} sum_{a=1}^{q} chi(a) zeta(s, a/q),

with each zeta(s, a/q) split into N direct terms and an Euler-Maclaurin tail
at w = N + a/q. The direct parts of all residues recombine into the plain
Dirichlet sum over n <= Nq, which is evaluated as one matrix product per
block of s values. For a nontrivial character the 1/(s-1) pieces of the tails
cancel (sum chi(a) = 0), so the tail uses (w^{1-s} - 1)/(s - 1), which stays
finite at s = 1.

Zeros on the critical line are isolated as sign changes of the Hardy Z
function, the completed L-function rotated by a unit phase so that it is real.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Dict, Iterable, Optional

import numpy as np
from scipy.special import bernoulli, gammaln, loggamma

from ..core.config import settings
from ..core.errors import (
    AccuracyError,
    BoundsError,
    DegenerateError,
    MissedZerosError,
    PhaseConventionError,
    PoleError,
)
from ..models.character import DirichletCharacter
from ..models.zeros import EvalAccuracy, ZeroList
from .dirichlet import char_values, conjugate, root_number

logger = logging.getLogger(__name__)

MAX_IMAG = 500.0
_BLOCK_ELEMENTS = 1 << 21
_REALITY_TS = (1.7320508, 9.4247780)


def _em_coefficients(m: int) -> np.ndarray:
    """B_{2j} / (2j)! for j = 1..m+1 (the last one feeds the error estimate)."""
    b = bernoulli(2 * m + 2)
    j = np.arange(1, m + 2)
    return b[2 * j] / np.exp(gammaln(2 * j + 1))


def _rising(s: np.ndarray, m: int) -> np.ndarray:
    """Rising products (s)_{2j-1} = s (s+1) ... (s+2j-2) for j = 1..m+1.

    Returns shape (m+1, len(s)).
    """
    out = np.empty((m + 1, s.size), dtype=np.complex128)
    acc = s.astype(np.complex128)
    out[0] = acc
    for j in range(1, m + 1):
        acc = acc * (s + 2 * j - 1) * (s + 2 * j)
        out[j] = acc
    return out


def _expm1_over(z: np.ndarray) -> np.ndarray:
    """(e^z - 1) / z, accurate near z = 0."""
    small = np.abs(z) < 1e-3
    safe = np.where(small, 1.0, z)
    series = 1 + z / 2 + z * z / 6 + z**3 / 24 + z**4 / 120
    return np.where(small, series, (np.exp(safe) - 1) / safe)


def _tail_error_estimate(s: np.ndarray, w_min: float, m: int) -> float:
    """Size of the first omitted Euler-Maclaurin term at the smallest w."""
    coef = abs(_em_coefficients(m)[m])
    poch = np.abs(_rising(s, m)[m])
    return float(np.max(coef * poch * w_min ** (-(s.real + 2 * m + 1))))


def _em_tail(s: np.ndarray, logw: np.ndarray, m: int, with_pole: bool) -> np.ndarray:
    """Euler-Maclaurin tail sum_{n>=0} (w+n)^{-s}, shape (len(s), len(w)).

    With ``with_pole`` False the term w^{1-s}/(s-1) is replaced by
    (w^{1-s} - 1)/(s-1); callers must cancel the constant themselves.
    """
    s_col = s[:, None]
    W = np.exp(-s_col * logw[None, :])  # w^{-s}
    z = (1 - s_col) * logw[None, :]
    if with_pole:
        head = W * np.exp(logw)[None, :] / (s_col - 1)
    else:
        head = -logw[None, :] * _expm1_over(z)
    total = head + 0.5 * W
    coef = _em_coefficients(m)
    poch = _rising(s, m)
    inv_w = np.exp(-logw)
    w_pow = inv_w.copy()  # w^{-(2j-1)}
    for j in range(m):
        total = total + coef[j] * poch[j][:, None] * W * w_pow[None, :]
        w_pow = w_pow * inv_w * inv_w
    return total


def _check_imag(s: np.ndarray):
    if np.any(np.abs(s.imag) > MAX_IMAG):
        raise BoundsError(f"|Im s| above the supported envelope {MAX_IMAG}")


def hurwitz_zeta(s: complex, a: float, acc: Optional[EvalAccuracy] = None) -> complex:
    """zeta(s, a) = sum_{n>=0} (n+a)^{-s}, continued by Euler-Maclaurin."""
    acc = acc or EvalAccuracy.default()
    s = complex(s)
    if s == 1:
        raise PoleError("hurwitz_zeta has a pole at s = 1")
    if not 0 < a <= 1:
        raise BoundsError(f"Hurwitz parameter a={a} outside (0, 1]")
    sv = np.array([s])
    _check_imag(sv)

    N = acc.shift_for(s.imag)
    m = acc.em_terms
    estimate = _tail_error_estimate(sv, N + a, m)
    if estimate > acc.abs_tol:
        raise AccuracyError(
            f"Euler-Maclaurin tail estimate {estimate:.2e} exceeds {acc.abs_tol:.1e}"
            f" at s={s}; raise shift_terms or em_terms"
        )
    k = np.arange(N, dtype=np.float64) + a
    direct = np.sum(np.exp(-s * np.log(k)))
    tail = _em_tail(sv, np.array([math.log(N + a)]), m, with_pole=True)[0, 0]
    return complex(direct + tail)


def _dirichlet_block(s: np.ndarray, chi: DirichletCharacter, acc: EvalAccuracy):
    q = chi.modulus
    m = acc.em_terms
    N = acc.shift_for(float(np.max(np.abs(s.imag))))

    estimate = _tail_error_estimate(s, N + 1.0 / q, m) * math.sqrt(q)
    if estimate > acc.abs_tol:
        raise AccuracyError(
            f"Euler-Maclaurin tail estimate {estimate:.2e} exceeds {acc.abs_tol:.1e}"
            f" for {chi.id}; raise shift_terms or em_terms"
        )

    n = np.arange(1, N * q + 1, dtype=np.int64)
    c = char_values(chi, n)
    keep = c != 0
    logn = np.log(n[keep].astype(np.float64))
    c = c[keep]

    out = np.empty(s.size, dtype=np.complex128)
    rows = max(1, _BLOCK_ELEMENTS // max(1, logn.size))
    a = np.arange(1, q + 1, dtype=np.int64)
    ca = char_values(chi, a)
    nz = ca != 0
    logw = np.log(N + a[nz] / q)
    ca = ca[nz]
    for start in range(0, s.size, rows):
        blk = s[start : start + rows]
        direct = np.exp(-np.outer(blk, logn)) @ c
        tail = _em_tail(blk, logw, m, with_pole=False) @ ca
        out[start : start + rows] = direct + np.exp(-blk * math.log(q)) * tail
    return out


def dirichlet_l(s, chi: DirichletCharacter, acc: Optional[EvalAccuracy] = None):
    """L(s, chi) for a nontrivial character; scalar or array s."""
    acc = acc or EvalAccuracy.default()
    scalar = np.ndim(s) == 0
    sv = np.atleast_1d(np.asarray(s, dtype=np.complex128)).ravel()
    _check_imag(sv)

    # block by height so low t values do not pay for the largest shift
    order = np.argsort(np.abs(sv.imag), kind="stable")
    out = np.empty_like(sv)
    step = 64
    for start in range(0, sv.size, step):
        idx = order[start : start + step]
        out[idx] = _dirichlet_block(sv[idx], chi, acc)
    if scalar:
        return complex(out[0])
    return out.reshape(np.shape(s))


def _theta(t: np.ndarray, chi: DirichletCharacter) -> np.ndarray:
    a = chi.parity
    return (t / 2) * math.log(chi.modulus / math.pi) + loggamma(
        (0.5 + a + 1j * t) / 2
    ).imag


def _rotated(t: np.ndarray, chi: DirichletCharacter, unit: complex, acc) -> np.ndarray:
    L = dirichlet_l(0.5 + 1j * t, chi, acc)
    return unit * np.exp(1j * _theta(t, chi)) * L


def _is_real(values: np.ndarray) -> bool:
    bound = settings.REALITY_TOL * (1 + np.abs(values.real))
    return bool(np.all(np.abs(values.imag) <= bound))


@lru_cache(maxsize=4096)
def hardy_rotation(chi: DirichletCharacter, acc: Optional[EvalAccuracy] = None) -> complex:
    """Unit phase eps^{-1/2} making Z real. Both square roots of 1/eps give a
    real Z, so the principal one is used."""
    eps = root_number(chi)
    unit = complex(1 / np.sqrt(eps / abs(eps)))
    if not _is_real(_rotated(np.array(_REALITY_TS), chi, unit, acc)):
        raise PhaseConventionError(f"eps^(-1/2) does not make Z real for {chi.id}")
    return unit


def hardy_z(t, chi: DirichletCharacter, acc: Optional[EvalAccuracy] = None):
    """Hardy Z function of L(s, chi): real, same zeros as L(1/2 + it, chi)."""
    acc = acc or EvalAccuracy.default()
    scalar = np.ndim(t) == 0
    tv = np.atleast_1d(np.asarray(t, dtype=np.float64))
    values = _rotated(tv, chi, hardy_rotation(chi, acc), acc)
    if not _is_real(values):
        worst = float(np.max(np.abs(values.imag)))
        raise PhaseConventionError(f"Z for {chi.id} has imaginary residue {worst:.2e}")
    return float(values.real[0]) if scalar else values.real


def zero_count_estimate(q: int, T: float) -> float:
    """Main term of N(T, chi), zeros with 0 < gamma <= T."""
    if T <= 0:
        return 0.0
    return (T / (2 * math.pi)) * math.log(q * T / (2 * math.pi * math.e))


def zero_count_slack(q: int, T: float) -> float:
    return settings.ZERO_COUNT_SLACK_LOG * math.log(max(q * T, 2.0)) + (
        settings.ZERO_COUNT_SLACK_CONST
    )


def default_grid_step(q: int) -> float:
    return 0.25 / math.log(q + 3)


def _bisect_brackets(lo, hi, z_lo, chi, acc, tol):
    """Simultaneous bisection of every bracket down to width <= tol."""
    lo, hi = lo.copy(), hi.copy()
    neg_lo = z_lo < 0
    while lo.size and np.max(hi - lo) > tol:
        mid = (lo + hi) / 2
        z_mid = hardy_z(mid, chi, acc)
        same = (z_mid < 0) == neg_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return lo, hi


def find_zeros(
    chi: DirichletCharacter,
    T: float,
    acc: Optional[EvalAccuracy] = None,
    grid_step: Optional[float] = None,
) -> ZeroList:
    """Ordinates of zeros of L(s, chi) on (0, T] from sign changes of Z."""
    acc = acc or EvalAccuracy.default()
    if T <= 0:
        raise BoundsError(f"height T={T} must be positive")
    step = grid_step or default_grid_step(chi.modulus)
    if step <= 0:
        raise BoundsError(f"grid step {step} must be positive")
    tol = settings.ZERO_TOLERANCE
    expected = zero_count_estimate(chi.modulus, T)
    slack = zero_count_slack(chi.modulus, T)

    for attempt in range(settings.GRID_REFINEMENTS + 1):
        n = max(1, int(math.ceil(T / step)))
        grid = np.linspace(0.0, T, n + 1)
        z = hardy_z(grid, chi, acc)
        neg = z < 0
        where = np.flatnonzero(neg[:-1] != neg[1:])
        lo, hi = _bisect_brackets(grid[where], grid[where + 1], z[where], chi, acc, tol)

        central = lo < settings.CENTRAL_ZERO_FLOOR
        if np.any(central):
            logger.warning(f"{chi.id}: sign change below the central floor; flagged")
        gammas = ((lo + hi) / 2)[~central]

        if abs(gammas.size - expected) <= slack:
            logger.info(
                f"{chi.id}: {gammas.size} zeros up to T={T} (expected ~{expected:.1f})"
            )
            return ZeroList(
                object_id=chi.id,
                gammas=gammas,
                height_bound=float(T),
                source="computed",
                central_flagged=bool(np.any(central)),
            )
        logger.warning(
            f"{chi.id}: {gammas.size} zeros vs ~{expected:.1f} expected at step "
            f"{step:.4g}; refining grid (attempt {attempt + 1})"
        )
        step /= 2

    raise MissedZerosError(
        f"{chi.id}: zero count stays outside {expected:.1f} +/- {slack:.1f} up to "
        f"T={T}; use a finer grid_step"
    )


def find_zeros_many(
    chars: Iterable[DirichletCharacter],
    T: float,
    acc: Optional[EvalAccuracy] = None,
    grid_step: Optional[float] = None,
) -> Dict[str, ZeroList]:
    """Independent zero searches in parallel; result keyed by character id."""
    chars = sorted(set(chars), key=lambda c: c.id)
    with ThreadPoolExecutor(max_workers=max(1, settings.THREADS)) as pool:
        results = list(pool.map(lambda c: find_zeros(c, T, acc, grid_step), chars))
    return {zl.object_id: zl for zl in results}


def log_derivative_at_1(
    chi: DirichletCharacter, acc: Optional[EvalAccuracy] = None, h0: float = 0.125
) -> complex:
    """L'(1, conj chi) / L(1, conj chi) by Richardson-extrapolated differences."""
    acc = acc or EvalAccuracy.default()
    chibar = conjugate(chi)
    levels = 4
    hs = h0 / 2.0 ** np.arange(levels)
    s = np.concatenate([[1.0], 1 + hs, 1 - hs]).astype(np.complex128)
    values = dirichlet_l(s, chibar, acc)
    L1 = values[0]
    if abs(L1) < 1e-12:
        raise DegenerateError(f"L(1, {chibar.id}) vanishes numerically")

    table = [(values[1 + i] - values[1 + levels + i]) / (2 * hs[i]) for i in range(levels)]
    for k in range(1, levels):
        table = [
            table[i] + (table[i] - table[i - 1]) / (4**k - 1)
            for i in range(1, len(table))
        ]
    return complex(table[-1] / L1)
