"""
Dirichlet characters: values, parity, conjugation, Gauss sums and families.

ModPrime characters are evaluated through a discrete-log table built once per
(q, g) in O(q); Kronecker characters through a residue table mod |D|. Both
tables are cached and read-only, so value queries are safe from any thread.

Seeded odd families draw conjugate pairs with numpy's PCG64 bit generator:
``PCG64(seed).random_raw()`` yields a fixed stream of 64-bit words and a
partial Fisher-Yates shuffle consumes word i as ``i + word % (n - i)``. The
bit stream of PCG64 is stable across numpy releases, so families are
reproducible bit for bit.
"""

import cmath
import logging
import math
from functools import lru_cache
from typing import List

import numpy as np

from ..core.errors import DomainError, EmptyFamilyError
from ..models.character import CharacterFamily, DirichletCharacter
from ..utils.arith import (
    is_prime,
    kronecker,
    list_fundamental_discriminants,
    primitive_root_order_check,
)

logger = logging.getLogger(__name__)

SAMPLER_NAME = "numpy PCG64 random_raw + partial Fisher-Yates"


def smallest_primitive_root(q: int) -> int:
    """Least generator of (Z/qZ)^* for an odd prime q."""
    if q < 3 or not is_prime(q):
        raise DomainError(f"{q} is not an odd prime")
    g = 2
    while not primitive_root_order_check(g, q):
        g += 1
    return g


@lru_cache(maxsize=64)
def discrete_log_table(q: int, g: int) -> np.ndarray:
    """table[g^j mod q] = j for 0 <= j < q-1; table[0] = -1."""
    table = np.full(q, -1, dtype=np.int64)
    value = 1
    for j in range(q - 1):
        table[value] = j
        value = value * g % q
    table.setflags(write=False)
    return table


@lru_cache(maxsize=1024)
def value_table(chi: DirichletCharacter) -> np.ndarray:
    """chi(a) for a = 0, ..., q-1 as a read-only complex array."""
    q = chi.modulus
    if chi.kind == "kronecker":
        values = np.array([kronecker(chi.D, a) for a in range(q)], dtype=np.complex128)
    else:
        logs = discrete_log_table(q, chi.g)
        angles = 2.0 * np.pi * ((logs * chi.index) % (q - 1)) / (q - 1)
        values = np.where(logs >= 0, np.exp(1j * angles), 0.0).astype(np.complex128)
    values.setflags(write=False)
    return values


def char_value(chi: DirichletCharacter, n: int) -> complex:
    """chi(n); zero when gcd(n, q) > 1."""
    if chi.kind == "kronecker":
        return complex(kronecker(chi.D, n))
    q = chi.modulus
    r = n % q
    if r == 0:
        return 0j
    j = int(discrete_log_table(q, chi.g)[r])
    return cmath.exp(2j * math.pi * ((j * chi.index) % (q - 1)) / (q - 1))


def char_values(chi: DirichletCharacter, n) -> np.ndarray:
    """Vectorised chi(n) over an integer array."""
    n = np.asarray(n, dtype=np.int64)
    return value_table(chi)[n % chi.modulus]


def parity(chi: DirichletCharacter) -> int:
    """0 for even (chi(-1) = 1), 1 for odd."""
    return chi.parity


def conjugate(chi: DirichletCharacter) -> DirichletCharacter:
    if chi.kind == "kronecker":
        return chi
    return DirichletCharacter(
        modulus=chi.modulus, kind="modprime", g=chi.g, index=chi.modulus - 1 - chi.index
    )


def gauss_sum(chi: DirichletCharacter) -> complex:
    """tau(chi) = sum_{a=1}^{q} chi(a) e(a/q)."""
    q = chi.modulus
    a = np.arange(1, q + 1)
    return complex(np.sum(char_values(chi, a) * np.exp(2j * np.pi * a / q)))


def root_number(chi: DirichletCharacter) -> complex:
    """epsilon(chi) = tau(chi) / (i^a sqrt(q)), of modulus one."""
    return gauss_sum(chi) / ((1j ** chi.parity) * math.sqrt(chi.modulus))


def build_kronecker_characters(lo: int, hi: int) -> List[DirichletCharacter]:
    return [DirichletCharacter.kronecker(D) for D in list_fundamental_discriminants(lo, hi)]


def odd_conjugate_pairs(q: int) -> List[tuple]:
    """Proper conjugate pairs (k, q-1-k) of odd indices, k < q-1-k."""
    return [(k, q - 1 - k) for k in range(1, (q - 1) // 2, 2)]


def build_odd_family(q: int, count: int, seed: int) -> CharacterFamily:
    """Seeded sample of ``count // 2`` conjugate pairs of odd characters mod q.

    The real odd character (index (q-1)/2, present when q = 3 mod 4) is its
    own conjugate; it is never sampled and is listed in the family metadata
    under ``self_conjugate_excluded``.
    """
    g = smallest_primitive_root(q)
    odd_total = (q - 1) // 2
    if count <= 0 or count % 2 != 0:
        raise DomainError(f"count must be a positive even integer, got {count}")
    if count > odd_total:
        raise DomainError(f"count {count} exceeds the {odd_total} odd characters mod {q}")

    pairs = odd_conjugate_pairs(q)
    wanted = count // 2
    if wanted > len(pairs):
        raise DomainError(
            f"{wanted} conjugate pairs requested, only {len(pairs)} available mod {q}"
        )

    order = list(range(len(pairs)))
    raw = np.random.PCG64(seed).random_raw(wanted)
    for i in range(wanted):
        j = i + int(raw[i] % np.uint64(len(pairs) - i))
        order[i], order[j] = order[j], order[i]

    indices = sorted(k for i in order[:wanted] for k in pairs[i])
    members = [
        DirichletCharacter(modulus=q, kind="modprime", g=g, index=k) for k in indices
    ]
    self_conj = [(q - 1) // 2] if ((q - 1) // 2) % 2 == 1 else []
    logger.info(f"Built odd family mod {q}: {len(members)} characters (seed {seed})")
    return CharacterFamily(
        members=tuple(members),
        closure=True,
        metadata={
            "modulus": q,
            "generator": g,
            "count": count,
            "seed": seed,
            "sampler": SAMPLER_NAME,
            "self_conjugate_excluded": self_conj,
        },
    )


def build_kronecker_character_family(lo: int, hi: int) -> CharacterFamily:
    members = build_kronecker_characters(lo, hi)
    if not members:
        raise EmptyFamilyError(f"no fundamental discriminants in [{lo}, {hi}]")
    return CharacterFamily(
        members=tuple(members), closure=True, metadata={"lo": lo, "hi": hi}
    )
