"""Zero lists and L-function evaluation accuracy parameters."""

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, PositiveFloat, model_validator

from ..core.config import settings

ZeroSource = Literal["computed", "ingested"]


@dataclass(frozen=True)
class ZeroList:
    """Positive ordinates 0 < gamma_1 < gamma_2 < ... <= height_bound.

    Attributes:
        object_id: Curve label or character id the zeros belong to.
        gammas: Strictly increasing positive imaginary parts.
        height_bound: T; the list is complete on (0, T] for computed zeros and
            ends at the last ordinate for ingested ones.
        source: "computed" or "ingested".
        central_flagged: True when a sign change was found below the central
            floor and left out of ``gammas`` for the caller to handle.
    """

    object_id: str
    gammas: np.ndarray = field(repr=False)
    height_bound: float
    source: ZeroSource = "computed"
    central_flagged: bool = False

    def __post_init__(self):
        arr = np.ascontiguousarray(self.gammas, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("gammas must be one-dimensional")
        if arr.size:
            if arr[0] <= 0:
                raise ValueError(f"{self.object_id}: ordinates must be positive")
            if np.any(np.diff(arr) <= 0):
                raise ValueError(f"{self.object_id}: ordinates not strictly increasing")
            if arr[-1] > self.height_bound:
                raise ValueError(f"{self.object_id}: ordinate above height bound")
        arr.setflags(write=False)
        object.__setattr__(self, "gammas", arr)

    def __len__(self) -> int:
        return int(self.gammas.size)

    def up_to(self, height: float) -> np.ndarray:
        return self.gammas[self.gammas <= height]


class ZeroRecord(BaseModel):
    """One row of a zeros CSV: ``object_id,gamma``."""

    object_id: str = Field(..., min_length=1)
    gamma: PositiveFloat


class EvalAccuracy(BaseModel):
    """Accuracy knobs of the Hurwitz zeta / Euler-Maclaurin evaluator.

    ``shift_terms`` is a floor: at evaluation time the direct part is raised
    to at least max(shift_terms, 2|Im s|) terms.
    """

    abs_tol: PositiveFloat = 1e-9
    em_terms: int = Field(12, ge=2)
    shift_terms: int = Field(50, ge=1)

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _check_depth(self):
        if self.em_terms > 60:
            raise ValueError("em_terms above 60 overflows the Bernoulli table")
        return self

    @classmethod
    def default(cls) -> "EvalAccuracy":
        return cls(
            abs_tol=settings.ABS_TOL,
            em_terms=settings.EM_TERMS,
            shift_terms=settings.SHIFT_TERMS_MIN,
        )

    def shift_for(self, imag_part: float) -> int:
        return max(self.shift_terms, int(np.ceil(2.0 * abs(imag_part))))
