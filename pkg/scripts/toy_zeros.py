#!/usr/bin/env python3
"""
Low-lying zeros of the toy curve corpus.

Computes the positive ordinates of L(E, s) on the critical line with PARI
(through cypari2) and writes them in the zeros CSV format read by
``murmur murmurate --kind ec --zeros`` and ``murmur verify --suite curves``.
Central zeros of positive-rank curves are left out; the rank term of the
explicit formula accounts for them.

    python scripts/toy_zeros.py --height 150 --out data/toy_zeros.csv
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, Iterable

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "backend"))

from app.models.curve import EllipticCurve  # noqa: E402
from app.models.zeros import ZeroList  # noqa: E402
from app.services.data_io import csv_store  # noqa: E402

logger = logging.getLogger(__name__)

DEFAULT_HEIGHT = 150.0
CENTRAL_FLOOR = 1e-6


def open_pari():
    import cypari2

    return cypari2.Pari(size=64 * 2**20, sizemax=2**31)


def curve_zeros(
    curves: Iterable[EllipticCurve], height: float = DEFAULT_HEIGHT, pari=None
) -> Dict[str, ZeroList]:
    """ZeroList of every curve, complete on (CENTRAL_FLOOR, height]."""
    pari = pari or open_pari()
    zeros = {}
    for E in curves:
        L = pari.lfuncreate(pari.ellinit(list(E.ainvs)))
        gammas = np.array([float(t) for t in pari.lfunzeros(L, height)])
        gammas = np.unique(gammas[gammas > CENTRAL_FLOOR])
        zeros[E.label] = ZeroList(
            object_id=E.label,
            gammas=gammas,
            height_bound=float(height),
            source="ingested",
        )
        logger.info(f"{E.label}: {gammas.size} zeros up to {height:g}")
    return zeros


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
    parser.add_argument("--curves", default=str(ROOT / "data" / "toy_curves.csv"))
    parser.add_argument("--height", type=float, default=DEFAULT_HEIGHT)
    parser.add_argument("--out", default=str(ROOT / "data" / "toy_zeros.csv"))
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    curves = csv_store.ingest_curves(args.curves)
    csv_store.persist_zeros(curve_zeros(curves, args.height), args.out)
    print(f"{len(curves)} curves, zeros to {args.height:g} written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
