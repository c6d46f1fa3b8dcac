"""Dirichlet character models.

Two kinds are supported: real Kronecker characters (D/.) attached to a
fundamental discriminant D, and characters modulo an odd prime q defined by
a primitive root g and an index k via chi(g^j) = exp(2 pi i j k / (q-1)).
Both kinds are primitive and nontrivial by construction.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Literal, Optional, Tuple

from ..core.errors import DomainError
from ..utils.arith import (
    is_fundamental_discriminant,
    is_prime,
    primitive_root_order_check,
)

CharacterKind = Literal["kronecker", "modprime"]


@dataclass(frozen=True)
class DirichletCharacter:
    """A primitive nontrivial Dirichlet character.

    Attributes:
        modulus: The conductor q (|D| for Kronecker kind, the prime for
            ModPrime kind).
        kind: "kronecker" or "modprime".
        D: Fundamental discriminant (Kronecker kind only).
        g: Verified primitive root mod q (ModPrime kind only).
        index: k with 1 <= k <= q-2 (ModPrime kind only).
    """

    modulus: int
    kind: CharacterKind
    D: Optional[int] = None
    g: Optional[int] = None
    index: Optional[int] = None

    def __post_init__(self):
        if self.kind == "kronecker":
            if self.D is None or not is_fundamental_discriminant(self.D):
                raise DomainError(f"{self.D} is not a fundamental discriminant")
            if self.modulus != abs(self.D):
                raise DomainError(f"modulus {self.modulus} != |D| for D={self.D}")
        elif self.kind == "modprime":
            q = self.modulus
            if q < 3 or not is_prime(q):
                raise DomainError(f"modulus {q} is not an odd prime")
            if self.g is None or not primitive_root_order_check(self.g % q, q):
                raise DomainError(f"{self.g} is not a primitive root mod {q}")
            if self.index is None or not 1 <= self.index <= q - 2:
                raise DomainError(f"index {self.index} outside [1, {q - 2}]")
        else:
            raise DomainError(f"unknown character kind {self.kind!r}")

    @classmethod
    def kronecker(cls, D: int) -> "DirichletCharacter":
        return cls(modulus=abs(D), kind="kronecker", D=D)

    @classmethod
    def mod_prime(
        cls, q: int, index: int, g: Optional[int] = None
    ) -> "DirichletCharacter":
        if g is None:
            from ..services.dirichlet import smallest_primitive_root

            g = smallest_primitive_root(q)
        return cls(modulus=q, kind="modprime", g=g, index=index)

    @property
    def parity(self) -> int:
        if self.kind == "kronecker":
            return 0 if self.D > 0 else 1
        return self.index % 2

    @property
    def is_real(self) -> bool:
        return self.kind == "kronecker" or 2 * self.index == self.modulus - 1

    @property
    def id(self) -> str:
        if self.kind == "kronecker":
            return f"kron:{self.D}"
        return f"mod:{self.modulus}:{self.index}"


def parse_character_id(text: str, g: Optional[int] = None) -> DirichletCharacter:
    """Inverse of ``DirichletCharacter.id``."""
    parts = text.split(":")
    try:
        if parts[0] == "kron" and len(parts) == 2:
            return DirichletCharacter.kronecker(int(parts[1]))
        if parts[0] == "mod" and len(parts) == 3:
            return DirichletCharacter.mod_prime(int(parts[1]), int(parts[2]), g=g)
    except ValueError as e:
        raise DomainError(f"malformed character id {text!r}: {e}") from e
    raise DomainError(f"malformed character id {text!r}")


@dataclass(frozen=True)
class CharacterFamily:
    """A list of characters, optionally asserted closed under conjugation."""

    members: Tuple[DirichletCharacter, ...]
    closure: bool = False
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if self.closure:
            odd = [c for c in self.members if c.kind == "modprime"]
            present = {(c.modulus, c.index) for c in odd}
            for c in odd:
                if (c.modulus, c.modulus - 1 - c.index) not in present:
                    raise DomainError(
                        f"family not closed under conjugation: {c.id} lacks its conjugate"
                    )

    def __len__(self) -> int:
        return len(self.members)
