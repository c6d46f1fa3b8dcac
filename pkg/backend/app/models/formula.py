"""Value types for explicit-formula evaluation."""

from dataclasses import dataclass
from typing import Literal, Union

import numpy as np
from pydantic import BaseModel, PositiveFloat

from ..core.errors import BoundsError

ArrayLike = Union[float, complex, np.ndarray]


class Truncation(BaseModel):
    """How much of a zero list enters a zero sum.

    ``count:N`` keeps the N lowest positive ordinates (and, for signed lists,
    the N lowest negative ones); ``height:T`` keeps |gamma| <= T.
    """

    mode: Literal["count", "height"]
    value: PositiveFloat

    model_config = {"frozen": True}

    @classmethod
    def parse(cls, text: str) -> "Truncation":
        mode, sep, raw = text.partition(":")
        if not sep or mode not in ("count", "height"):
            raise BoundsError(f"truncation must be count:N or height:T, got {text!r}")
        try:
            value = float(raw)
        except ValueError as e:
            raise BoundsError(f"bad truncation value in {text!r}") from e
        if value <= 0 or (mode == "count" and not value.is_integer()):
            raise BoundsError(f"bad truncation value in {text!r}")
        return cls(mode=mode, value=value)

    def __str__(self) -> str:
        if self.mode == "count":
            return f"count:{int(self.value)}"
        return f"height:{self.value:g}"


@dataclass(frozen=True)
class FormulaSideSample:
    """Both sides of one explicit formula at x (scalars or aligned arrays).

    ``corrections`` collects every right-hand-side term other than the zero
    sum (1 - 2r for curves; -log x / sqrt x + R_chi for even characters), so
    residual = lhs - (corrections - zero_sum).
    """

    x: ArrayLike
    lhs: ArrayLike
    zero_sum: ArrayLike
    corrections: ArrayLike
    residual: ArrayLike


@dataclass(frozen=True)
class RChiBreakdown:
    """Components of the lower-order remainder R_chi(x) of an even character."""

    x: ArrayLike
    log_deriv: complex
    conductor_term: float
    euler_mascheroni: float
    trivial_zero_term: ArrayLike
    prime_power_sum: ArrayLike
    total: ArrayLike
