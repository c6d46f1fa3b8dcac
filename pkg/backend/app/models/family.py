"""Families of L-function objects and the family-level series built on them."""

from dataclasses import dataclass, field
from typing import Any, Dict, Literal, Tuple, Union

import numpy as np

from ..core.errors import DomainError, EmptyFamilyError
from .character import DirichletCharacter
from .curve import EllipticCurve

FamilyKind = Literal[
    "EllipticRank0", "EllipticRank1", "EllipticCustom", "KroneckerRange", "OddModPrime"
]
Member = Union[EllipticCurve, DirichletCharacter]

_ELLIPTIC_KINDS = ("EllipticRank0", "EllipticRank1", "EllipticCustom")


def member_id(member: Member) -> str:
    return member.label if isinstance(member, EllipticCurve) else member.id


@dataclass(frozen=True)
class Family:
    """A finite, homogeneous set of curves or characters.

    Members are stored sorted by id; every reduction over the family walks
    them in that order.

    Attributes:
        id: Human-readable family id, also written into emitted metadata.
        kind: One of the FamilyKind literals.
        members: Curves (elliptic kinds) or characters (character kinds).
        provenance: Construction parameters (ranges, modulus, seed, ...).
    """

    id: str
    kind: FamilyKind
    members: Tuple[Member, ...]
    provenance: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.members:
            raise EmptyFamilyError(f"family {self.id} has no members")
        members = tuple(sorted(self.members, key=member_id))
        elliptic = self.kind in _ELLIPTIC_KINDS
        expected = EllipticCurve if elliptic else DirichletCharacter
        for m in members:
            if not isinstance(m, expected):
                raise DomainError(f"family {self.id} of kind {self.kind} holds {m!r}")
        if elliptic:
            rank = {"EllipticRank0": 0, "EllipticRank1": 1}.get(
                self.kind, self.provenance.get("rank")
            )
            off = [m.label for m in members if rank is not None and m.rank != rank]
            if off:
                raise DomainError(f"members {off} do not have rank {rank}")
        elif self.kind == "KroneckerRange":
            if any(m.kind != "kronecker" for m in members):
                raise DomainError("KroneckerRange family holds a non-Kronecker member")
        elif any(m.kind != "modprime" or m.parity != 1 for m in members):
            raise DomainError("OddModPrime family holds a non-odd member")
        ids = [member_id(m) for m in members]
        if len(set(ids)) != len(ids):
            raise DomainError(f"family {self.id} has duplicate members")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    @property
    def is_elliptic(self) -> bool:
        return self.kind in _ELLIPTIC_KINDS

    @property
    def member_ids(self) -> Tuple[str, ...]:
        return tuple(member_id(m) for m in self.members)


@dataclass(frozen=True)
class ZeroDensityHistogram:
    """Binned ordinates of all members; counts are divided by #F if normalized."""

    bin_edges: np.ndarray
    counts: np.ndarray
    family_id: str
    member_count: int
    normalized: bool = False

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=np.float64)
        counts = np.asarray(self.counts, dtype=np.float64)
        if edges.ndim != 1 or counts.size != edges.size - 1:
            raise ValueError("histogram needs len(counts) == len(bin_edges) - 1")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be strictly increasing")
        if np.any(counts < 0):
            raise ValueError("histogram counts must be nonnegative")
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "counts", counts)

    @property
    def midpoints(self) -> np.ndarray:
        return (self.bin_edges[:-1] + self.bin_edges[1:]) / 2

    def density_weights(self) -> np.ndarray:
        """Counts per family member, whatever the stored normalization."""
        return self.counts if self.normalized else self.counts / self.member_count


@dataclass(frozen=True)
class MurmurationSeries:
    """Family-averaged sides of an explicit formula over an x grid.

    ``avg_lhs`` is the averaged prime sum (blue), ``avg_zero_term`` the
    averaged zero side with its sign flipped so that black = blue + gold
    estimates the averaged lower-order terms (gold), and ``black`` their sum.
    """

    x_grid: np.ndarray
    avg_lhs: np.ndarray
    avg_zero_term: np.ndarray
    black: np.ndarray
    family_id: str
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x_grid, dtype=np.float64)
        if x.ndim != 1 or np.any(np.diff(x) <= 0):
            raise ValueError("x_grid must be strictly increasing")
        for name in ("avg_lhs", "avg_zero_term", "black"):
            arr = np.asarray(getattr(self, name), dtype=np.complex128)
            if arr.shape != x.shape:
                raise ValueError(f"{name} length {arr.size} != grid length {x.size}")
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "x_grid", x)

    def __len__(self) -> int:
        return int(self.x_grid.size)
