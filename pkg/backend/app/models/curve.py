"""Elliptic curve models over the rationals.

Curves arrive as file rows (``CurveRecord``) and are promoted to validated
``EllipticCurve`` values. Conductor and rank are ingested metadata: nothing
here computes them, they define which family a curve belongs to.
"""

from typing import Tuple

from pydantic import BaseModel, Field, NonNegativeInt, PositiveInt, model_validator


def b_invariants(a1: int, a2: int, a3: int, a4: int, a6: int) -> Tuple[int, ...]:
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def weierstrass_discriminant(a1: int, a2: int, a3: int, a4: int, a6: int) -> int:
    b2, b4, b6, b8 = b_invariants(a1, a2, a3, a4, a6)
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


class EllipticCurve(BaseModel):
    """A minimal Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.

    Attributes:
        label: Identifier unique within a corpus (e.g. an LMFDB/Cremona label).
        a1, a2, a3, a4, a6: Integer coefficients of a minimal model.
        conductor: N(E), trusted as given.
        rank: Mordell-Weil rank r(E), trusted as given.
    """

    label: str = Field(..., min_length=1)
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    conductor: PositiveInt
    rank: NonNegativeInt

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _check_nonsingular(self):
        if self.discriminant == 0:
            raise ValueError(f"curve {self.label} is singular (discriminant 0)")
        return self

    @property
    def ainvs(self) -> Tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b_invariants(self) -> Tuple[int, int, int, int]:
        return b_invariants(*self.ainvs)

    @property
    def discriminant(self) -> int:
        return weierstrass_discriminant(*self.ainvs)


class CurveRecord(BaseModel):
    """One row of a curves CSV: ``label,a1,a2,a3,a4,a6,conductor,rank``."""

    label: str
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    conductor: int
    rank: int

    def to_curve(self) -> EllipticCurve:
        return EllipticCurve(**self.model_dump())

    @classmethod
    def from_curve(cls, curve: EllipticCurve) -> "CurveRecord":
        return cls(**curve.model_dump())
