"""Shared fixtures for the murmurations test suite."""

from pathlib import Path

import numpy as np
import pytest

from app.models.character import DirichletCharacter
from app.models.curve import EllipticCurve
from app.models.zeros import EvalAccuracy, ZeroList
from app.services.data_io import ingest_curves, persist_zeros
from app.utils.arith import sieve_primes

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def toy_curves_path() -> Path:
    return ROOT / "data" / "toy_curves.csv"


@pytest.fixture(scope="session")
def toy_curves(toy_curves_path):
    return ingest_curves(toy_curves_path)


@pytest.fixture(scope="session")
def curves_by_label(toy_curves):
    return {E.label: E for E in toy_curves}


@pytest.fixture
def curve_11a1() -> EllipticCurve:
    return EllipticCurve(
        label="11a1", a1=0, a2=-1, a3=1, a4=-10, a6=-20, conductor=11, rank=0
    )


@pytest.fixture(scope="session")
def primes_2001():
    return sieve_primes(2001)


@pytest.fixture(scope="session")
def acc() -> EvalAccuracy:
    return EvalAccuracy.default()


@pytest.fixture(scope="session")
def chi5() -> DirichletCharacter:
    return DirichletCharacter.kronecker(5)


@pytest.fixture
def synthetic_zeros():
    """Seeded ordinates for algebraic identities that hold for any zero set."""

    def make(labels, count=25, height=40.0, seed=11):
        rng = np.random.default_rng(seed)
        return {
            label: ZeroList(
                object_id=label,
                gammas=np.sort(rng.uniform(0.5, height, count)),
                height_bound=height,
                source="ingested",
            )
            for label in labels
        }

    return make


@pytest.fixture(scope="session")
def toy_zeros_path(tmp_path_factory, toy_curves) -> Path:
    """Bundled toy zeros when present, else computed once with PARI."""
    bundled = ROOT / "data" / "toy_zeros.csv"
    if bundled.exists():
        return bundled
    pytest.importorskip("cypari2")
    from toy_zeros import curve_zeros

    path = tmp_path_factory.mktemp("zeros") / "toy_zeros.csv"
    persist_zeros(curve_zeros(toy_curves), path)
    return path
