from dataclasses import dataclass
from functools import lru_cache
from math import comb, isqrt, log

import numpy as np
import sympy

from powerfree import utils

"""
    Number-theoretic kernels: sieves, factorisation, residue vectors
    modulo d, cubefree decompositions and the counting functions used
    by the rest of the package
"""

DEFAULT_SIEVE_LIMIT = 10**6

_TABLE_CACHE = {"table": None}


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """
        Primes up to limit and a smallest-prime-factor lookup for every
        integer up to limit (spf[0] = spf[1] = 0)
    """
    limit: int
    primes: np.ndarray
    spf: np.ndarray

    def __contains__(self, n):
        return 2 <= n <= self.limit and self.spf[n] == n


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple

    def exponent(self, p):
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def primes(self):
        return [p for p, _ in self.factors]


@dataclass(frozen=True)
class ResidueVector:
    """
        Sparse exponent vector modulo d: entries is a tuple of
        (prime, residue) pairs sorted by prime with residues in [1, d-1]
    """
    d: int
    entries: tuple = ()

    @classmethod
    def from_mapping(cls, d, mapping):
        return cls(d, tuple(sorted((p, r % d) for p, r in mapping.items()
                                   if r % d)))

    def __add__(self, other):
        if self.d != other.d:
            raise utils.InvalidArgumentError(
                f"cannot add residue vectors modulo {self.d} and {other.d}")
        mapping = dict(self.entries)
        for p, r in other.entries:
            mapping[p] = mapping.get(p, 0) + r
        return ResidueVector.from_mapping(self.d, mapping)

    def scale(self, m):
        return ResidueVector.from_mapping(self.d,
                                          {p: m * r for p, r in self.entries})

    def is_zero(self):
        return not self.entries

    def support(self):
        return [p for p, _ in self.entries]

    def as_dict(self):
        return dict(self.entries)


@dataclass(frozen=True)
class CubefreeDecomposition:
    """
        a = u * v**2 * w**3 with u, v squarefree and coprime
    """
    u: int
    v: int
    w: int

    @property
    def value(self):
        return self.u * self.v**2 * self.w**3

    @property
    def cubefree_part(self):
        return self.u * self.v**2

    @property
    def opposite(self):
        # the class whose product with this one is a cube
        return self.v * self.u**2


def sieve(limit):
    """
        Smallest-prime-factor sieve

        Parameters:
            limit (int): largest integer covered, at least 2

        Returns:
            table (PrimeTable): primes up to limit and spf lookup
    """
    if limit < 2:
        raise utils.InvalidArgumentError(
            f"Invalid limit '{limit}': must be at least 2")
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, isqrt(limit) + 1):
        if spf[p] == 0:
            multiples = spf[p * p::p]
            multiples[multiples == 0] = p
    unmarked = np.nonzero(spf == 0)[0]
    unmarked = unmarked[unmarked >= 2]
    spf[unmarked] = unmarked
    return PrimeTable(limit=limit, primes=unmarked, spf=spf)


def prime_table(limit=DEFAULT_SIEVE_LIMIT):
    """
        Returns a shared table covering at least limit, re-sieving only
        when a larger limit is requested
    """
    table = _TABLE_CACHE["table"]
    if table is None or table.limit < limit:
        table = sieve(max(limit, DEFAULT_SIEVE_LIMIT))
        _TABLE_CACHE["table"] = table
    return table


@lru_cache(maxsize=None)
def first_primes(r):
    """
        The first r primes p_1 < ... < p_r
    """
    return tuple(sympy.prime(j) for j in range(1, r + 1))


def factor(n, table=None):
    """
        Canonical factorisation of n. Integers covered by the table use
        the spf lookup, larger ones fall back to sympy.factorint.

        Parameters:
            n (int): positive integer
            table (PrimeTable): optional, defaults to the shared table

        Returns:
            factorization (Factorization)
    """
    if n < 1:
        raise utils.InvalidArgumentError(
            f"Invalid n '{n}': must be a positive integer")
    if table is None:
        table = prime_table()
    if n > table.limit:
        return Factorization(n, tuple(sorted(sympy.factorint(n).items())))
    factors = []
    spf = table.spf
    m = n
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        factors.append((p, e))
    return Factorization(n, tuple(factors))


def residue_vector(n, d, table=None):
    """
        Exponent vector of n reduced modulo d; zero exactly when n is a
        perfect d-th power
    """
    if d < 2:
        raise utils.InvalidArgumentError(
            f"Invalid d '{d}': must be at least 2")
    return ResidueVector(d, tuple((p, e % d) for p, e in
                                  factor(n, table).factors if e % d))


def cubefree_decompose(n, table=None):
    u = v = w = 1
    for p, e in factor(n, table).factors:
        if e % 3 == 1:
            u *= p
        elif e % 3 == 2:
            v *= p
        w *= p ** (e // 3)
    return CubefreeDecomposition(u, v, w)


def smooth_rough_split(n, r):
    """
        Splits n into its p_r-smooth part and its p_{r+1}-rough part

        Returns:
            (smooth, rough) (tuple of int): n = smooth * rough
    """
    if n < 1 or r < 1:
        raise utils.InvalidArgumentError(
            f"Invalid arguments n={n}, r={r}: both must be positive")
    smooth = 1
    rough = n
    for p in first_primes(r):
        while rough % p == 0:
            rough //= p
            smooth *= p
    return smooth, rough


def big_omega(n, table=None):
    return sum(e for _, e in factor(n, table).factors)


def is_squarefree(n, table=None):
    return all(e == 1 for _, e in factor(n, table).factors)


def largest_prime_factor(n, table=None):
    if n < 2:
        raise utils.InvalidArgumentError(
            f"Invalid n '{n}': largest prime factor needs n >= 2")
    return factor(n, table).factors[-1][0]


def tau3(n, table=None):
    """
        Number of ordered triples (a, b, c) with abc = n
    """
    result = 1
    for _, e in factor(n, table).factors:
        result *= comb(e + 2, 2)
    return result


def nth_root(n, d):
    """
        floor(n ** (1/d)) in exact integer arithmetic
    """
    if n < 0 or d < 1:
        raise utils.InvalidArgumentError(
            f"Invalid arguments n={n}, d={d}")
    return int(sympy.integer_nthroot(n, d)[0])


def is_perfect_power(n, d):
    return sympy.integer_nthroot(n, d)[1]


def prime_pi(x, table=None):
    """
        Exact number of primes up to x
    """
    x = int(x)
    if x < 2:
        return 0
    if table is None:
        table = prime_table()
    if x > table.limit:
        return int(sympy.primepi(x))
    return int(np.searchsorted(table.primes, x, side="right"))


def primes_in_range(lo, hi, table=None):
    """
        Primes p with lo < p <= hi as a list of ints
    """
    hi = int(hi)
    if hi < 2 or hi <= lo:
        return []
    if table is None:
        table = prime_table(hi)
    primes = table.primes
    start = np.searchsorted(primes, lo, side="right")
    end = np.searchsorted(primes, hi, side="right")
    return [int(p) for p in primes[start:end]]


def _doubling_blocks(limit):
    # i // spf[i] <= i / 2, so every block only reads earlier blocks
    lo = 2
    while lo <= limit:
        hi = min(2 * lo, limit + 1)
        yield lo, hi
        lo = hi


def omega_table(limit, table=None):
    """
        Array of big_omega(m) for 0 <= m <= limit (entries 0 and 1 are 0)
    """
    if table is None or table.limit < limit:
        table = prime_table(limit)
    spf = table.spf[:limit + 1]
    omega = np.zeros(limit + 1, dtype=np.int64)
    for lo, hi in _doubling_blocks(limit):
        idx = np.arange(lo, hi)
        omega[lo:hi] = omega[idx // spf[lo:hi]] + 1
    return omega


def largest_prime_factor_table(limit, table=None):
    """
        Array of the largest prime factor of m for 0 <= m <= limit, with
        1 stored for m = 0 and m = 1
    """
    if table is None or table.limit < limit:
        table = prime_table(limit)
    spf = table.spf[:limit + 1]
    lpf = np.ones(limit + 1, dtype=np.int64)
    for lo, hi in _doubling_blocks(limit):
        idx = np.arange(lo, hi)
        lpf[lo:hi] = np.maximum(spf[lo:hi], lpf[idx // spf[lo:hi]])
    return lpf


def count_by_omega(x, y, direction="ge"):
    """
        Counts m <= x with big_omega(m) compared against y * log log x

        Parameters:
            x (int): range bound, at least 3
            y (float): multiplier of log log x
            direction (str): 'le' (<=) or 'ge' (>=)

        Returns:
            count (int)
    """
    if x < 3:
        raise utils.InvalidArgumentError(f"Invalid x '{x}': must be >= 3")
    threshold = float(y) * log(log(x))
    omega = omega_table(x)[1:]
    if direction in ("le", "<="):
        return int(np.count_nonzero(omega <= threshold))
    if direction in ("ge", ">="):
        return int(np.count_nonzero(omega >= threshold))
    raise utils.InvalidArgumentError(
        f"Invalid direction '{direction}': must be one of: le, ge")


def count_almost_primes(n, k):
    """
        pi_k(n): number of m <= n with big_omega(m) = k
    """
    if n < 2:
        return 0
    omega = omega_table(n)[1:]
    return int(np.count_nonzero(omega == k))


def balanced_triple_factorization(a, lo, hi):
    """
        Finds u <= v <= w with a = uvw and lo <= u, v, w <= hi by an
        exhaustive scan over divisor pairs

        Returns:
            (u, v, w) (tuple of int) or None
    """
    if lo < 1 or lo > hi:
        raise utils.InvalidArgumentError(
            f"Invalid window [{lo}, {hi}]: need 1 <= lo <= hi")
    for u in sympy.divisors(a):
        if u > hi or u**3 > a:
            break
        if u < lo:
            continue
        b = a // u
        for v in sympy.divisors(b):
            if v * v > b or v > hi:
                break
            if v < max(lo, u):
                continue
            w = b // v
            if w <= hi:
                return (u, v, w)
    return None


def equipartition_max_part(m, d):
    """
        ||m||: the smallest possible largest part over partitions of m
        into parts >= d
    """
    if d < 2 or m < d:
        raise utils.InvalidArgumentError(
            f"Invalid arguments m={m}, d={d}: need m >= d >= 2")
    best = [0] + [None] * m
    for j in range(d, m + 1):
        candidates = [max(part, best[j - part]) for part in range(d, j + 1)
                      if best[j - part] is not None]
        best[j] = min(candidates) if candidates else None
    return best[m]


def main_term(n, k, d, table=None):
    """
        Sum of pi(n/j) for j = 1 .. ||k/d|| - 1
    """
    if d < 2 or k % d or k < d * d:
        raise utils.InvalidArgumentError(
            f"Invalid arguments k={k}, d={d}: need d | k and k >= d^2")
    parts = equipartition_max_part(k // d, d)
    return sum(prime_pi(n // j, table) for j in range(1, parts))
