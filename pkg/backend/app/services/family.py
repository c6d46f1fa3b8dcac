"""
Family construction and family-averaged murmuration series.

Sign conventions of the averaged sides (black = blue + gold throughout):

    elliptic   gold = + mean zero sum                    black ~ 1 - 2 mean(r)
    even chi   gold = log x / sqrt x + zero sum [- R_chi]
    odd chi    gold = zero sum only

so that in every case blue + gold minus the recorded lower-order term is the
family mean of the per-member residuals. Per-member work runs on a thread
pool; the means are always taken over members in id order.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.fft import rfft

from ..core.config import settings
from ..core.errors import (
    BoundsError,
    CoverageError,
    EmptyFamilyError,
    ParityError,
    PreconditionError,
    ResolutionError,
)
from ..models.character import DirichletCharacter
from ..models.curve import EllipticCurve
from ..models.family import Family, MurmurationSeries, ZeroDensityHistogram
from ..models.formula import Truncation
from ..models.primes import PrimeTable
from ..models.zeros import EvalAccuracy, ZeroList
from ..utils.arith import sieve_primes
from .dirichlet import build_kronecker_characters, build_odd_family, conjugate
from .elliptic import ap_array
from .explicit import (
    lhs_dirichlet,
    lhs_elliptic,
    near_prime_mask,
    r_chi,
    signed_ordinates,
    zero_pair_term,
    zero_sum_truncated,
)

logger = logging.getLogger(__name__)


def _map_members(fn, members: Sequence) -> List:
    with ThreadPoolExecutor(max_workers=max(1, settings.THREADS)) as pool:
        return list(pool.map(fn, members))


def _ordered_mean(rows: List[np.ndarray]) -> np.ndarray:
    return np.sum(np.stack(rows), axis=0) / len(rows)


# Families


def build_elliptic_family(
    curves: Iterable[EllipticCurve], conductor_lo: int, conductor_hi: int, rank: int
) -> Family:
    """Curves with conductor in [lo, hi] and the given rank."""
    if conductor_lo > conductor_hi:
        raise BoundsError(f"conductor range [{conductor_lo}, {conductor_hi}] is empty")
    members = [
        E
        for E in curves
        if conductor_lo <= E.conductor <= conductor_hi and E.rank == rank
    ]
    if not members:
        raise EmptyFamilyError(
            f"no rank {rank} curves with conductor in [{conductor_lo}, {conductor_hi}]"
        )
    kind = {0: "EllipticRank0", 1: "EllipticRank1"}.get(rank, "EllipticCustom")
    family = Family(
        id=f"ec-r{rank}-N{conductor_lo}-{conductor_hi}",
        kind=kind,
        members=tuple(members),
        provenance={
            "conductor_lo": conductor_lo,
            "conductor_hi": conductor_hi,
            "rank": rank,
        },
    )
    logger.info(f"Built elliptic family {family.id}: {len(family)} curves")
    return family


def build_kronecker_family(lo: int, hi: int) -> Family:
    """One Kronecker character per fundamental discriminant in [lo, hi]."""
    members = build_kronecker_characters(lo, hi)
    if not members:
        raise EmptyFamilyError(f"no fundamental discriminants in [{lo}, {hi}]")
    family = Family(
        id=f"kron-{lo}-{hi}",
        kind="KroneckerRange",
        members=tuple(members),
        provenance={"lo": lo, "hi": hi},
    )
    logger.info(f"Built Kronecker family {family.id}: {len(family)} characters")
    return family


def build_odd_mod_prime_family(q: int, count: int, seed: int) -> Family:
    """Seeded, conjugation-closed family of odd characters mod q."""
    chars = build_odd_family(q, count, seed)
    return Family(
        id=f"odd-{q}-{count}-s{seed}",
        kind="OddModPrime",
        members=chars.members,
        provenance=dict(chars.metadata),
    )


# Zero coverage


def _member_zeros(zeros: Mapping[str, ZeroList], object_id: str) -> ZeroList:
    try:
        return zeros[object_id]
    except KeyError:
        raise CoverageError(f"no zero data for {object_id}", member=object_id) from None


def _check_truncation(zl: ZeroList, trunc: Optional[Truncation]):
    if trunc is None:
        return
    if trunc.mode == "count" and len(zl) < int(trunc.value):
        raise CoverageError(
            f"{zl.object_id}: {len(zl)} zeros available, {int(trunc.value)} requested",
            member=zl.object_id,
        )
    if trunc.mode == "height" and zl.height_bound < trunc.value:
        raise CoverageError(
            f"{zl.object_id}: zeros known to {zl.height_bound:g} < {trunc.value:g}",
            member=zl.object_id,
        )


def zero_density(
    family: Family,
    zeros: Mapping[str, ZeroList],
    bin_width: float,
    gamma_max: float,
    normalized: bool = False,
) -> ZeroDensityHistogram:
    """Histogram of the positive ordinates 0 < gamma < gamma_max of all members."""
    if bin_width <= 0 or gamma_max <= 0:
        raise BoundsError("bin width and gamma_max must be positive")
    n_bins = max(1, int(math.ceil(gamma_max / bin_width - 1e-9)))
    edges = np.arange(n_bins + 1, dtype=np.float64) * bin_width
    counts = np.zeros(n_bins, dtype=np.float64)
    for object_id in family.member_ids:
        zl = _member_zeros(zeros, object_id)
        if zl.height_bound < gamma_max:
            raise CoverageError(
                f"{object_id}: zeros known to {zl.height_bound:g} < {gamma_max:g}",
                member=object_id,
            )
        g = zl.gammas[zl.gammas < gamma_max]
        counts += np.histogram(g, bins=edges)[0]
    if normalized:
        counts = counts / len(family)
    return ZeroDensityHistogram(
        bin_edges=edges,
        counts=counts,
        family_id=family.id,
        member_count=len(family),
        normalized=normalized,
    )


def histogram_contrast(
    hist: ZeroDensityHistogram, smooth_bins: Optional[int] = None
) -> float:
    """Peak-to-trough ratio of the moving-average smoothed histogram.

    Only bins from the first local maximum onward count, so the depletion of
    zeros near the central point does not register as a trough.
    """
    k = smooth_bins or settings.HISTOGRAM_SMOOTH_BINS
    counts = hist.counts
    if counts.size < k:
        raise ResolutionError(f"{counts.size} bins cannot be smoothed over {k}")
    smooth = np.convolve(counts, np.ones(k) / k, mode="valid")
    falling = np.flatnonzero(np.diff(smooth) < 0)
    tail = smooth[falling[0] :] if falling.size else smooth[-1:]
    peak, trough = float(np.max(tail)), float(np.min(tail))
    if peak <= 0:
        return 0.0
    return math.inf if trough <= 0 else peak / trough


def heuristic_integral_from_histogram(hist: ZeroDensityHistogram, x) -> np.ndarray:
    """Integral of rho_F(gamma) x^{i gamma} / (1/2 + i gamma) over all gamma,
    with rho_F read off the histogram (bin midpoints, mirrored to gamma < 0)."""
    xv = np.atleast_1d(np.asarray(x, dtype=np.float64))
    weights = hist.density_weights()
    keep = weights > 0
    if not keep.any():
        return np.zeros(xv.size)
    terms = zero_pair_term(hist.midpoints[keep][:, None], xv[None, :])
    return terms.T @ weights[keep]


# Series


def default_x_grid(x_max: float, n: Optional[int] = None, x_min: Optional[float] = None):
    """Geometric grid of n points on [x_min, x_max]."""
    n = n or settings.SERIES_GRID_POINTS
    x_min = x_min or settings.SERIES_X_MIN
    if n < 2 or x_max <= x_min or x_min <= 1:
        raise BoundsError(f"cannot build a {n}-point grid on [{x_min}, {x_max}]")
    return np.geomspace(x_min, x_max, n)


def _prime_table_for(x_grid: np.ndarray, primes: Optional[PrimeTable]) -> PrimeTable:
    need = int(math.floor(float(x_grid[-1]))) + 1
    if primes is not None and primes.limit >= x_grid[-1]:
        return primes
    return sieve_primes(max(2, need))


def _near_prime_points(x_grid: np.ndarray, primes: PrimeTable) -> int:
    return int(np.count_nonzero(near_prime_mask(x_grid, primes, settings.INTEGER_SNAP)))


def murmuration_series_elliptic(
    family: Family,
    zeros: Optional[Mapping[str, ZeroList]],
    x_grid,
    trunc: Optional[Truncation] = None,
    primes: Optional[PrimeTable] = None,
    zero_term_mode: str = "atomic",
    hist: Optional[ZeroDensityHistogram] = None,
) -> MurmurationSeries:
    """Family means of the elliptic prime sum and of the zero sums.

    zero_term_mode "atomic" sums over every member's actual zeros; "histogram"
    replaces the zero side by the integral against the given histogram.
    """
    if not family.is_elliptic:
        raise PreconditionError(f"family {family.id} is not an elliptic family")
    x_grid = np.asarray(x_grid, dtype=np.float64)
    primes = _prime_table_for(x_grid, primes)
    members: List[EllipticCurve] = list(family.members)

    if zero_term_mode == "atomic":
        zls = {E.label: _member_zeros(zeros or {}, E.label) for E in members}
        for zl in zls.values():
            _check_truncation(zl, trunc)
    elif zero_term_mode == "histogram":
        if hist is None:
            raise PreconditionError("histogram mode needs a zero-density histogram")
    else:
        raise BoundsError(f"unknown zero_term_mode {zero_term_mode!r}")

    def one(E: EllipticCurve) -> Tuple[np.ndarray, np.ndarray]:
        lhs = lhs_elliptic(E, x_grid, primes, ap_array(E, primes))
        if zero_term_mode == "histogram":
            return lhs, None
        return lhs, np.real(zero_sum_truncated(zls[E.label], x_grid, trunc))

    rows = _map_members(one, members)
    blue = _ordered_mean([r[0] for r in rows])
    if zero_term_mode == "histogram":
        gold = heuristic_integral_from_histogram(hist, x_grid)
    else:
        gold = _ordered_mean([r[1] for r in rows])
    rank_term = 1.0 - 2.0 * sum(E.rank for E in members) / len(members)

    logger.info(
        f"Murmuration series for {family.id}: {len(members)} curves, {x_grid.size} x"
    )
    return MurmurationSeries(
        x_grid=x_grid,
        avg_lhs=blue,
        avg_zero_term=gold,
        black=blue + gold,
        family_id=family.id,
        metadata={
            "truncation": str(trunc) if trunc else "all",
            "rank_term": rank_term,
            "member_count": len(members),
            "zero_term_mode": zero_term_mode,
            "near_prime_points": _near_prime_points(x_grid, primes),
        },
    )


def _signed_zeros_for(
    chi: DirichletCharacter, zeros: Mapping[str, ZeroList], trunc: Optional[Truncation]
) -> np.ndarray:
    own = _member_zeros(zeros, chi.id)
    conj = own if chi.is_real else _member_zeros(zeros, conjugate(chi).id)
    _check_truncation(own, trunc)
    _check_truncation(conj, trunc)
    return signed_ordinates(own, conj)


def murmuration_series_dirichlet(
    family: Family,
    zeros: Mapping[str, ZeroList],
    x_grid,
    trunc: Optional[Truncation] = None,
    include_r: bool = False,
    primes: Optional[PrimeTable] = None,
    acc: Optional[EvalAccuracy] = None,
) -> MurmurationSeries:
    """Family means of the character prime sum and of the negated right side.

    Without include_r the gold curve omits R_chi, which is how the jumps at
    prime powers stay visible in the black curve. Odd members contribute
    their zero sum only.
    """
    if family.is_elliptic:
        raise PreconditionError(f"family {family.id} is not a character family")
    members: List[DirichletCharacter] = list(family.members)
    if include_r and any(chi.parity for chi in members):
        raise ParityError("include_r needs an all-even family")
    ids = set(family.member_ids)
    for chi in members:
        if not chi.is_real and conjugate(chi).id not in ids:
            raise PreconditionError(f"family {family.id} is not closed: {chi.id}")

    x_grid = np.asarray(x_grid, dtype=np.float64)
    primes = _prime_table_for(x_grid, primes)
    signed = {chi.id: _signed_zeros_for(chi, zeros, trunc) for chi in members}
    log_term = np.log(x_grid) / np.sqrt(x_grid)

    def one(chi: DirichletCharacter) -> Tuple[np.ndarray, np.ndarray]:
        lhs = np.atleast_1d(lhs_dirichlet(chi, x_grid, primes))
        gold = np.atleast_1d(zero_sum_truncated(signed[chi.id], x_grid, trunc))
        if chi.parity == 0:
            gold = gold + log_term
            if include_r:
                gold = gold - np.atleast_1d(r_chi(chi, x_grid, acc).total)
        return lhs, gold

    rows = _map_members(one, members)
    blue = _ordered_mean([r[0] for r in rows])
    gold = _ordered_mean([r[1] for r in rows])
    black = blue + gold

    scale = 1 + np.abs(black)
    max_imag = float(np.max(np.abs(black.imag) / scale))
    if max_imag > settings.REALITY_TOL:
        logger.warning(
            f"{family.id}: black curve has relative imaginary part {max_imag:.2e}"
        )

    logger.info(f"Murmuration series for {family.id}: {len(members)} characters")
    return MurmurationSeries(
        x_grid=x_grid,
        avg_lhs=blue,
        avg_zero_term=gold,
        black=black,
        family_id=family.id,
        metadata={
            "truncation": str(trunc) if trunc else "all",
            "include_r": include_r,
            "member_count": len(members),
            "near_prime_points": _near_prime_points(x_grid, primes),
        },
    )


def merge_series(parts: Sequence[MurmurationSeries]) -> MurmurationSeries:
    """Member-count weighted combination of series on one grid, i.e. the
    series of the disjoint union of the underlying families."""
    if not parts:
        raise EmptyFamilyError("nothing to merge")
    grid = parts[0].x_grid
    for s in parts[1:]:
        if s.x_grid.shape != grid.shape or np.any(s.x_grid != grid):
            raise PreconditionError("series to merge must share one x grid")
    weights = np.array([s.metadata["member_count"] for s in parts], dtype=np.float64)
    total = float(weights.sum())

    def combine(name: str) -> np.ndarray:
        stacked = np.stack([w * getattr(s, name) for w, s in zip(weights, parts)])
        return np.sum(stacked, axis=0) / total

    metadata: Dict = {
        "member_count": int(total),
        "merged_from": [s.family_id for s in parts],
    }
    if all("rank_term" in s.metadata for s in parts):
        metadata["rank_term"] = float(
            sum(w * s.metadata["rank_term"] for w, s in zip(weights, parts)) / total
        )
    return MurmurationSeries(
        x_grid=grid,
        avg_lhs=combine("avg_lhs"),
        avg_zero_term=combine("avg_zero_term"),
        black=combine("black"),
        family_id="+".join(s.family_id for s in parts),
        metadata=metadata,
    )


# Diagnostics


def default_jump_candidates(x_max: float) -> List[float]:
    """Squares of primes below x_max, together with 16."""
    root = int(math.isqrt(int(x_max))) + 1
    primes = sieve_primes(max(2, root + 1)).tolist()
    squares = [float(p * p) for p in primes if p * p < x_max]
    return sorted(set(squares) | ({16.0} if x_max > 16 else set()))


def _windows(x, y, c, window):
    left = (x >= c - window) & (x < c)
    right = (x > c) & (x <= c + window)
    return left, right


def detect_jumps(
    series: MurmurationSeries,
    candidates: Optional[Sequence[float]] = None,
    window: Optional[float] = None,
) -> List[Tuple[float, float]]:
    """(candidate, mean of black just after - mean just before), largest first.

    Explicit candidates must each see at least 3 grid points per side;
    default candidates that the grid cannot resolve are skipped.
    """
    window = window or settings.JUMP_WINDOW
    x = series.x_grid
    y = np.real(series.black)
    strict = candidates is not None
    if candidates is None:
        candidates = default_jump_candidates(float(x[-1]))

    jumps = []
    for c in candidates:
        left, right = _windows(x, y, c, window)
        n_left, n_right = int(left.sum()), int(right.sum())
        if n_left < 3 or n_right < 3:
            if strict:
                raise ResolutionError(
                    f"{n_left}/{n_right} grid points around x={c:g} within {window:g}"
                )
            logger.debug(f"skipping unresolved jump candidate {c:g}")
            continue
        jumps.append((float(c), float(y[right].mean() - y[left].mean())))
    return sorted(jumps, key=lambda cj: -abs(cj[1]))


def _log_uniform(series: MurmurationSeries, values: np.ndarray) -> np.ndarray:
    logx = np.log(series.x_grid)
    uniform = np.linspace(logx[0], logx[-1], logx.size)
    if np.allclose(np.diff(logx), np.diff(uniform), rtol=1e-9, atol=1e-12):
        return values
    return np.interp(uniform, logx, values)


def structure_metric(series: MurmurationSeries, detrend: bool = False) -> float:
    """max_{k>=1} |DFT_k(g - mean g)| / (sqrt(N) * RMS(g - mean g)) of the gold
    curve g sampled uniformly in log x. A pure sinusoid scores sqrt(N/2)."""
    gold = series.avg_zero_term
    scale = 1 + np.abs(gold)
    if np.max(np.abs(gold.imag) / scale) > 1e-6:
        raise PreconditionError(f"{series.family_id}: gold curve is not real")
    g = _log_uniform(series, np.real(gold))
    if detrend:
        t = np.arange(g.size)
        g = g - np.polyval(np.polyfit(t, g, 1), t)
    g = g - g.mean()
    rms = float(np.sqrt(np.mean(g * g)))
    if rms < 1e-15:
        return 0.0
    spectrum = np.abs(rfft(g))[1:]
    return float(spectrum.max() / (math.sqrt(g.size) * rms))
