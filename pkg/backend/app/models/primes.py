"""Prime tables and prime powers, the index sets of every prime sum."""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PrimeTable:
    """All primes strictly below ``limit``, ascending.

    The array is read-only; tables are shared between worker threads.
    """

    limit: int
    primes: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(self.primes, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "primes", arr)

    def __len__(self) -> int:
        return int(self.primes.size)

    def tolist(self) -> list:
        return self.primes.tolist()

    def count_below(self, x):
        """Number of primes p with p < x (scalar or array x)."""
        return np.searchsorted(self.primes, x, side="left")


@dataclass(frozen=True, order=True)
class PrimePower:
    """A proper prime power p**k with k >= 2; orders by value."""

    value: int
    p: int
    k: int

    def __post_init__(self):
        if self.k < 2 or self.p**self.k != self.value:
            raise ValueError(f"Invalid prime power {self.p}^{self.k} != {self.value}")

    def astuple(self) -> tuple:
        return (self.p, self.k, self.value)
