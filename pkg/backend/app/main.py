"""
Murmurations toolkit command line.

This module is the entry point of the ``murmur`` command. It wires the
computational services to six subcommands:

- sieve:     count (and optionally list) the primes below a limit
- ap:        Frobenius traces a_p(E) for a curve corpus
- zeros:     critical-line zeros of Kronecker or odd mod-prime families
- hist:      zero-density histogram of a zeros file
- murmurate: family-averaged murmuration series (blue, gold, black curves)
- verify:    acceptance suites with PASS/FAIL reporting

Exit codes: 0 success, 1 usage or domain error, 2 data or ingestion error,
3 numeric diagnostic (missed zeros, accuracy, failed verification).

Environment:
- MURMUR_THREADS: worker threads for per-member evaluation
- MURMUR_LOG_LEVEL: root log level
Both may also be set in a .env file in the working directory.
"""

import argparse
import logging
import sys
from typing import Dict, Optional, Sequence

import numpy as np
from dotenv import load_dotenv

# Load environment variables from .env before settings are read
load_dotenv()

from .core.config import settings  # noqa: E402
from .core.errors import (  # noqa: E402
    CoverageError,
    EmptyFamilyError,
    MurmurationError,
    PreconditionError,
    UsageError,
    VerificationFailure,
)
from .models.character import parse_character_id  # noqa: E402
from .models.family import Family  # noqa: E402
from .models.formula import Truncation  # noqa: E402
from .models.zeros import EvalAccuracy, ZeroList  # noqa: E402
from .services.data_io import AP_HEADER, csv_store  # noqa: E402
from .services.dirichlet import build_kronecker_characters, build_odd_family  # noqa: E402
from .services.elliptic import ap_vector  # noqa: E402
from .services.family import (  # noqa: E402
    build_elliptic_family,
    build_kronecker_family,
    build_odd_mod_prime_family,
    default_x_grid,
    murmuration_series_dirichlet,
    murmuration_series_elliptic,
    zero_density,
)
from .services.lfunc import find_zeros_many  # noqa: E402
from .services.verification import AcceptanceRunner, suite_names  # noqa: E402
from .utils.arith import sieve_primes  # noqa: E402

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors raised instead of exiting with status 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return value


def _truncation(text: str) -> Truncation:
    try:
        return Truncation.parse(text)
    except MurmurationError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="murmur", description="Murmurations and explicit formulas")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sieve", help="count primes below a limit")
    p.add_argument("--limit", type=_positive_int, required=True)
    p.add_argument("--out", help="write the primes, one per line")

    p = sub.add_parser("ap", help="a_p(E) for every curve of a corpus")
    p.add_argument("--curves", required=True)
    p.add_argument("--limit", type=_positive_int, required=True)
    p.add_argument("--out", help="CSV output (default: stdout)")

    p = sub.add_parser("zeros", help="zeros of a character family on the critical line")
    p.add_argument("--kind", choices=["kronecker", "modprime"], required=True)
    p.add_argument("--lo", type=int)
    p.add_argument("--hi", type=int)
    p.add_argument("--modulus", type=_positive_int)
    p.add_argument("--count", type=_positive_int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--height", type=_positive_float, required=True)
    p.add_argument("--grid-step", type=_positive_float)
    p.add_argument("--out", required=True)

    p = sub.add_parser("hist", help="zero-density histogram of a zeros file")
    p.add_argument("--zeros", required=True)
    p.add_argument("--curves", help="curve corpus, when the zeros belong to curves")
    p.add_argument("--bin-width", type=_positive_float, required=True)
    p.add_argument("--gamma-max", type=_positive_float, required=True)
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("murmurate", help="family-averaged murmuration series")
    p.add_argument("--kind", choices=["ec", "kronecker", "odd"], required=True)
    p.add_argument("--curves")
    p.add_argument("--conductor-lo", type=_positive_int, default=1)
    p.add_argument("--conductor-hi", type=_positive_int, default=10**9)
    p.add_argument("--rank", type=int, default=0)
    p.add_argument("--lo", type=int)
    p.add_argument("--hi", type=int)
    p.add_argument("--modulus", type=_positive_int)
    p.add_argument("--count", type=_positive_int)
    p.add_argument("--seed", type=int, default=0)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--zeros")
    source.add_argument("--height", type=_positive_float)
    p.add_argument("--trunc", type=_truncation)
    p.add_argument("--grid", type=_positive_int, default=settings.SERIES_GRID_POINTS)
    p.add_argument("--xmax", type=_positive_float, default=2000.0)
    p.add_argument("--include-r", action="store_true")
    p.add_argument("--zero-term", choices=["atomic", "histogram"], default="atomic")
    p.add_argument("--bin-width", type=_positive_float, default=0.1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="run acceptance suites")
    p.add_argument("--suite", choices=suite_names(), default="all")
    p.add_argument("--curves", help="curve corpus (default: bundled toy corpus)")
    p.add_argument(
        "--zeros", help="zeros of the curve corpus (default: data/toy_zeros.csv)"
    )
    return parser


def _require(args, *names: str):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"{args.command} --kind {args.kind} needs {flags}")


# Commands


def cmd_sieve(args) -> int:
    table = sieve_primes(args.limit)
    print(len(table))
    if args.out:
        csv_store.emit_primes(table, args.out)
    return 0


def cmd_ap(args) -> int:
    curves = csv_store.ingest_curves(args.curves)
    rows = [(E.label, p, a) for E in curves for p, a in ap_vector(E, args.limit)]
    if args.out:
        csv_store.emit_ap(rows, args.out)
    else:
        print(",".join(AP_HEADER))
        for label, p, a in rows:
            print(f"{label},{p},{a}")
    return 0


def _character_family_members(args):
    if args.kind == "kronecker":
        _require(args, "lo", "hi")
        return build_kronecker_characters(args.lo, args.hi)
    _require(args, "modulus", "count")
    return list(build_odd_family(args.modulus, args.count, args.seed).members)


def cmd_zeros(args) -> int:
    members = _character_family_members(args)
    if not members:
        raise EmptyFamilyError("no characters selected")
    zeros = find_zeros_many(members, args.height, EvalAccuracy.default(), args.grid_step)
    csv_store.persist_zeros(zeros, args.out)
    total = sum(len(z) for z in zeros.values())
    print(f"{len(zeros)} characters, {total} zeros up to T={args.height:g}")
    return 0


def _family_for_zero_ids(zeros: Dict[str, ZeroList], curves_path: Optional[str]) -> Family:
    ids = sorted(zeros)
    if curves_path:
        curves = {E.label: E for E in csv_store.ingest_curves(curves_path)}
        members = [curves[i] for i in ids if i in curves]
        if len(members) != len(ids):
            unknown = [i for i in ids if i not in curves]
            raise PreconditionError(f"zeros for unknown curves: {', '.join(unknown[:5])}")
        return Family(id="zeros-file", kind="EllipticCustom", members=tuple(members))
    chars = [parse_character_id(i) for i in ids]
    kind = "KroneckerRange" if all(c.kind == "kronecker" for c in chars) else "OddModPrime"
    return Family(id="zeros-file", kind=kind, members=tuple(chars))


def cmd_hist(args) -> int:
    zeros = csv_store.ingest_zeros(args.zeros)
    family = _family_for_zero_ids(zeros, args.curves)
    hist = zero_density(family, zeros, args.bin_width, args.gamma_max, args.normalized)
    csv_store.emit_hist(hist, args.out)
    binned = sum(int(np.count_nonzero(z.gammas < args.gamma_max)) for z in zeros.values())
    print(f"{len(family)} objects, {binned} zeros binned")
    return 0


def cmd_murmurate(args) -> int:
    x = default_x_grid(args.xmax, args.grid)
    acc = EvalAccuracy.default()

    if args.kind == "ec":
        _require(args, "curves", "zeros")
        curves = csv_store.ingest_curves(args.curves)
        family = build_elliptic_family(
            curves, args.conductor_lo, args.conductor_hi, args.rank
        )
        zeros = csv_store.ingest_zeros(args.zeros)
        uncovered = [i for i in family.member_ids if i not in zeros]
        if uncovered:
            raise CoverageError(
                f"{args.zeros}: no zero data for {len(uncovered)} of "
                f"{len(family.member_ids)} members, first {uncovered[0]}",
                member=uncovered[0],
            )
        hist = None
        if args.zero_term == "histogram":
            gamma_max = min(zeros[i].height_bound for i in family.member_ids)
            hist = zero_density(family, zeros, args.bin_width, gamma_max)
        series = murmuration_series_elliptic(
            family, zeros, x, args.trunc, zero_term_mode=args.zero_term, hist=hist
        )
    else:
        if args.kind == "kronecker":
            _require(args, "lo", "hi")
            family = build_kronecker_family(args.lo, args.hi)
        else:
            _require(args, "modulus", "count")
            family = build_odd_mod_prime_family(args.modulus, args.count, args.seed)
        if args.zeros:
            zeros = csv_store.ingest_zeros(args.zeros)
        else:
            zeros = find_zeros_many(family.members, args.height, acc)
        series = murmuration_series_dirichlet(
            family, zeros, x, args.trunc, include_r=args.include_r, acc=acc
        )

    csv_store.emit_series(series, args.out)
    count = series.metadata["member_count"]
    print(f"{series.family_id}: {count} members, {len(series)} x values")
    return 0


def cmd_verify(args) -> int:
    runner = AcceptanceRunner(args.curves, args.zeros)
    results = runner.run(args.suite)
    for r in results:
        print(f"[{r.status}] {r.name}: {r.details}")
    passed = sum(1 for r in results if r.status == "PASS")
    skipped = sum(1 for r in results if r.status == "SKIP")
    print(f"{passed} passed, {runner.failed} failed, {skipped} skipped")
    if runner.failed:
        raise VerificationFailure(f"{runner.failed} acceptance checks failed")
    return 0


COMMANDS = {
    "sieve": cmd_sieve,
    "ap": cmd_ap,
    "zeros": cmd_zeros,
    "hist": cmd_hist,
    "murmurate": cmd_murmurate,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except MurmurationError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
