"""
CSV ingestion and emission.

File contracts (headers are matched exactly):

    curves   label,a1,a2,a3,a4,a6,conductor,rank
    zeros    object_id,gamma
    series   x,avg_lhs,avg_zero_term,black
    hist     bin_lo,bin_hi,count
    ap       label,p,ap

An LMFDB zeros export converts with one transform: one row per
(label, positive ordinate). All writers emit "\\n" line endings and
locale-independent '%' formatting, so identical inputs give identical bytes.
"""

import csv
import logging
from collections import OrderedDict
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Tuple, Union

import numpy as np
from pydantic import ValidationError

from ..core.config import settings
from ..core.errors import IngestionError, OutputError
from ..models.curve import CurveRecord, EllipticCurve
from ..models.family import MurmurationSeries, ZeroDensityHistogram
from ..models.primes import PrimeTable
from ..models.zeros import ZeroList, ZeroRecord
from ..utils.arith import prime_factors

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

CURVE_HEADER = ["label", "a1", "a2", "a3", "a4", "a6", "conductor", "rank"]
ZERO_HEADER = ["object_id", "gamma"]
SERIES_HEADER = ["x", "avg_lhs", "avg_zero_term", "black"]
HIST_HEADER = ["bin_lo", "bin_hi", "count"]
AP_HEADER = ["label", "p", "ap"]


def _first_error(e: ValidationError) -> str:
    err = e.errors()[0]
    where = ".".join(str(part) for part in err.get("loc", ()))
    return f"{where}: {err['msg']}" if where else err["msg"]


def conductor_offenders(curves: Iterable[EllipticCurve]) -> List[str]:
    """Labels whose conductor has a prime factor not dividing the discriminant."""
    offenders = []
    for E in curves:
        disc = abs(E.discriminant)
        if any(disc % p for p in prime_factors(E.conductor)):
            offenders.append(E.label)
    return offenders


class CsvStore:
    """Reads the curve and zero corpora and writes every result table."""

    def __init__(self):
        self.encoding = "utf-8"
        self.line_terminator = "\n"
        self.value_format = "%.9g"
        self.zero_format = "%.9f"
        self.reality_tol = settings.REALITY_TOL

    def _read_rows(self, path: PathLike, header: List[str]):
        """Yield (line number, row dict) after checking the header."""
        path = Path(path)
        try:
            f = path.open("r", newline="", encoding=self.encoding)
        except OSError as e:
            raise IngestionError(f"cannot open: {e.strerror}", str(path)) from e
        with f:
            reader = csv.reader(f)
            first = next(reader, None)
            if first is None or [c.strip() for c in first] != header:
                raise IngestionError(f"expected header {','.join(header)}", str(path), 1)
            for row in reader:
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != len(header):
                    raise IngestionError(
                        f"expected {len(header)} fields, got {len(row)}",
                        str(path),
                        reader.line_num,
                    )
                yield reader.line_num, dict(zip(header, (c.strip() for c in row)))

    def _write_rows(
        self, path: PathLike, header: List[str], rows: Iterable[Iterable[str]]
    ):
        path = Path(path)
        try:
            if path.parent and not path.parent.exists():
                path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", newline="", encoding=self.encoding) as f:
                writer = csv.writer(f, lineterminator=self.line_terminator)
                writer.writerow(header)
                writer.writerows(rows)
        except OSError as e:
            raise OutputError(f"{path}: cannot write: {e.strerror}") from e
        logger.info(f"Wrote {path}")

    def _fmt(self, value: float) -> str:
        return self.value_format % value

    def ingest_curves(self, path: PathLike) -> List[EllipticCurve]:
        """Validated curve corpus in file order; duplicate labels are rejected."""
        curves: List[EllipticCurve] = []
        seen: Dict[str, int] = {}
        for line, row in self._read_rows(path, CURVE_HEADER):
            try:
                curve = CurveRecord.model_validate(row).to_curve()
            except ValidationError as e:
                label = row.get("label") or "?"
                raise IngestionError(
                    f"curve {label}: {_first_error(e)}", str(path), line
                ) from e
            if curve.label in seen:
                raise IngestionError(
                    f"duplicate label {curve.label} (first on line {seen[curve.label]})",
                    str(path),
                    line,
                )
            seen[curve.label] = line
            curves.append(curve)

        offenders = conductor_offenders(curves)
        if offenders:
            logger.warning(
                f"{path}: conductor not compatible with discriminant for "
                f"{', '.join(offenders)}"
            )
        logger.info(f"Ingested {len(curves)} curves from {path}")
        return curves

    def ingest_zeros(self, path: PathLike) -> Dict[str, ZeroList]:
        """Per-object ZeroLists; rows of one object must be strictly increasing."""
        grouped: "OrderedDict[str, List[float]]" = OrderedDict()
        for line, row in self._read_rows(path, ZERO_HEADER):
            try:
                record = ZeroRecord.model_validate(row)
            except ValidationError as e:
                raise IngestionError(_first_error(e), str(path), line) from e
            gammas = grouped.setdefault(record.object_id, [])
            if gammas and record.gamma <= gammas[-1]:
                raise IngestionError(
                    f"{record.object_id}: ordinate {record.gamma} not above {gammas[-1]}",
                    str(path),
                    line,
                )
            gammas.append(record.gamma)

        zeros = {
            oid: ZeroList(
                object_id=oid,
                gammas=np.array(g),
                height_bound=g[-1],
                source="ingested",
            )
            for oid, g in grouped.items()
        }
        logger.info(f"Ingested zeros for {len(zeros)} objects from {path}")
        return zeros

    def persist_zeros(self, zeros: Mapping[str, ZeroList], path: PathLike):
        """Sorted by object id then ordinate, nine decimals."""
        rows = (
            (oid, self.zero_format % g)
            for oid in sorted(zeros)
            for g in np.sort(zeros[oid].gammas)
        )
        self._write_rows(path, ZERO_HEADER, rows)

    def emit_series(self, series: MurmurationSeries, path: PathLike):
        """Real parts of the three curves; non-negligible imaginary parts are logged."""
        stacked = np.stack([series.avg_lhs, series.avg_zero_term, series.black])
        rel = np.abs(stacked.imag) / (1 + np.abs(stacked))
        if rel.size and float(rel.max()) > self.reality_tol:
            logger.warning(
                f"{series.family_id}: dropping imaginary parts up to {float(rel.max()):.2e}"
            )
        rows = (
            (self._fmt(x), self._fmt(blue), self._fmt(gold), self._fmt(black))
            for x, blue, gold, black in zip(
                series.x_grid, stacked[0].real, stacked[1].real, stacked[2].real
            )
        )
        self._write_rows(path, SERIES_HEADER, rows)

    def emit_hist(self, hist: ZeroDensityHistogram, path: PathLike):
        edges = hist.bin_edges
        rows = (
            (self._fmt(lo), self._fmt(hi), self._fmt(c))
            for lo, hi, c in zip(edges[:-1], edges[1:], hist.counts)
        )
        self._write_rows(path, HIST_HEADER, rows)

    def emit_ap(self, rows: Iterable[Tuple[str, int, int]], path: PathLike):
        self._write_rows(
            path, AP_HEADER, ((label, str(p), str(a)) for label, p, a in rows)
        )

    def emit_primes(self, table: PrimeTable, path: PathLike):
        self._write_rows(path, ["p"], ((str(p),) for p in table.tolist()))


# Global store instance
csv_store = CsvStore()

ingest_curves = csv_store.ingest_curves
ingest_zeros = csv_store.ingest_zeros
persist_zeros = csv_store.persist_zeros
emit_series = csv_store.emit_series
emit_hist = csv_store.emit_hist
emit_ap = csv_store.emit_ap
emit_primes = csv_store.emit_primes
