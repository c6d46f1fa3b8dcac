"""Integer and prime infrastructure: sieves, prime powers, Kronecker symbols,
fundamental discriminants and small modular helpers.

Everything here is a pure function of its arguments. Sieving is done with
numpy boolean masks; the symbol and discriminant routines work on Python
integers so they never overflow.
"""

import math
from functools import lru_cache
from typing import List

import numpy as np

from ..core.errors import BoundsError
from ..models.primes import PrimePower, PrimeTable

SIEVE_MAX_LIMIT = 2**32
_SEGMENT_ODDS = 1 << 22

# (2/n) for odd n, indexed by n mod 8
_TAB2 = (0, 1, 0, -1, 0, -1, 0, 1)

# Deterministic Miller-Rabin witnesses for n < 3.3 * 10^24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def _simple_sieve(limit: int) -> np.ndarray:
    """Primes <= limit by a plain Eratosthenes mask."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def sieve_primes(limit: int) -> PrimeTable:
    """All primes strictly below ``limit`` by an odd-only segmented sieve."""
    if not isinstance(limit, (int, np.integer)) or isinstance(limit, bool):
        raise BoundsError(f"sieve limit must be an integer, got {limit!r}")
    limit = int(limit)
    if limit < 2 or limit > SIEVE_MAX_LIMIT:
        raise BoundsError(f"sieve limit {limit} outside [2, 2^32]")

    base = _simple_sieve(math.isqrt(limit) + 1)
    chunks = [np.array([2], dtype=np.int64)] if limit > 2 else []

    low = 3
    while low < limit:
        high = min(low + 2 * _SEGMENT_ODDS, limit)  # exclusive
        odd_count = (high - low + 1) // 2
        mask = np.ones(odd_count, dtype=bool)
        for p in base[1:]:
            p = int(p)
            if p * p >= high:
                break
            start = max(p * p, ((low + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            if start >= high:
                continue
            mask[(start - low) // 2 :: p] = False
        values = low + 2 * np.flatnonzero(mask).astype(np.int64)
        chunks.append(values[values < high])
        low = high if high % 2 == 1 else high + 1

    primes = np.concatenate(chunks) if chunks else np.array([], dtype=np.int64)
    return PrimeTable(limit=limit, primes=primes)


def prime_powers(limit: int) -> List[PrimePower]:
    """All p**k with k >= 2 and p**k < limit, sorted by value."""
    if limit < 2:
        raise BoundsError(f"prime power limit {limit} must be >= 2")
    out = []
    for p in _simple_sieve(math.isqrt(limit) + 1).tolist():
        value, k = p * p, 2
        while value < limit:
            out.append(PrimePower(value=value, p=p, k=k))
            value *= p
            k += 1
    out.sort()
    return out


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> List[int]:
    """Distinct prime factors of |n| by trial division, ascending."""
    n = abs(n)
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            factors.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors.append(n)
    return factors


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return False
        d += 1 if d == 2 else 2
    return True


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for arbitrary integers, including n <= 0."""
    a, b = int(D), int(n)
    if b == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and b % 2 == 0:
        return 0

    v = 0
    while b % 2 == 0:
        b //= 2
        v += 1
    k = 1 if v % 2 == 0 else _TAB2[a & 7]
    if b < 0:
        b = -b
        if a < 0:
            k = -k

    # b is now odd and positive
    while True:
        if a == 0:
            return k if b == 1 else 0
        v = 0
        while a % 2 == 0:
            a //= 2
            v += 1
        if v % 2 == 1:
            k *= _TAB2[b & 7]
        if a & b & 2:
            k = -k
        r = abs(a)
        a = b % r
        b = r


def is_fundamental_discriminant(D: int) -> bool:
    """True iff D is the discriminant of a quadratic field."""
    D = int(D)
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def list_fundamental_discriminants(lo: int, hi: int) -> List[int]:
    """Fundamental discriminants in the closed interval [lo, hi], ascending.

    Both endpoints are included. For the range [9000, 10000] neither endpoint
    is fundamental, so the open and closed conventions agree (307 values).
    """
    if lo > hi:
        raise BoundsError(f"empty discriminant range [{lo}, {hi}]")
    return [D for D in range(lo, hi + 1) if is_fundamental_discriminant(D)]


@lru_cache(maxsize=256)
def primitive_root_order_check(g: int, q: int) -> bool:
    """True iff g generates (Z/qZ)^* for prime q."""
    if g % q == 0:
        return False
    return all(pow(g, (q - 1) // r, q) != 1 for r in prime_factors(q - 1))
