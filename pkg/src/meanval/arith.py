"""Exact evaluation of multiplicative arithmetic functions on factored integers.

Everything here works on explicit prime factorizations, so each function is a
finite product over prime powers:

* ``divisor_count`` -- number of positive divisors, prod (a_i + 1).
* ``omega`` -- number of distinct prime factors.
* ``minimal_power`` -- the least m with n | m**r; at a prime power p**a this
  is p**ceil(a/r), and the function is multiplicative.
* ``weighted_divisor`` -- d(n) / k**omega(n), damping integers with many
  distinct prime factors.
* ``composite_weighted_divisor`` -- the weighted divisor count of the minimal
  power, the arithmetic function whose mean value the rest of the package
  studies.

Values are exact ``Fraction``s whenever the weight k is an integer (their
denominators divide k**omega(n)); for non-integer k a float is returned whose
relative error is bounded by ``float_error_bound``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Union

from .primes import iter_trial_candidates, primes_up_to

__all__ = [
    "MAX_FACTOR_INPUT",
    "ArithParams",
    "ExactValue",
    "PrimeFactorization",
    "composite_weighted_divisor",
    "divisor_count",
    "factorize",
    "float_error_bound",
    "minimal_power",
    "omega",
    "weighted_divisor",
]

MAX_FACTOR_INPUT = 2**63 - 1

#: Exact rational when the weight is an integer, float otherwise.
ExactValue = Union[Fraction, float]

_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class PrimeFactorization:
    """A positive integer as an ordered tuple of (prime, exponent) pairs.

    The empty tuple represents 1. Primes must be strictly increasing and
    exponents at least 1; primality itself is guaranteed by ``factorize``,
    which is the intended constructor.
    """

    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        last = 1
        for p, a in self.factors:
            if p <= last:
                raise ValueError(f"primes not strictly increasing at {p}")
            if a < 1:
                raise ValueError(f"exponent {a} < 1 for prime {p}")
            last = p

    @property
    def value(self) -> int:
        """The represented integer."""
        n = 1
        for p, a in self.factors:
            n *= p**a
        return n

    def __iter__(self):
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class ArithParams:
    """The (r, k) pair: power order r >= 2 and divisor weight k >= 1."""

    r: int
    k: float

    def __post_init__(self) -> None:
        if not isinstance(self.r, int) or self.r < 2:
            raise ValueError(f"r must be an integer >= 2, got {self.r!r}")
        if not self.k >= 1:
            raise ValueError(f"k must be >= 1, got {self.k!r}")

    @property
    def exact(self) -> bool:
        """True when k is an integer, enabling exact rational arithmetic."""
        return float(self.k).is_integer()

    @property
    def k_int(self) -> int:
        if not self.exact:
            raise ValueError(f"k={self.k} is not an integer")
        return int(self.k)


# Trial-division primes are sieved in advance and the cache grows on demand;
# past the cache the 30-wheel candidate stream takes over, which keeps memory
# flat for the occasional large input.
_CACHE_LIMIT = 1 << 16
_PRIME_CACHE = primes_up_to(_CACHE_LIMIT).tolist()


def _extend_prime_cache(limit: int) -> None:
    global _CACHE_LIMIT, _PRIME_CACHE
    if limit <= _CACHE_LIMIT:
        return
    _CACHE_LIMIT = limit
    _PRIME_CACHE = primes_up_to(limit).tolist()


def factorize(n: int) -> PrimeFactorization:
    """Factor n by deterministic trial division.

    Accepts 1 <= n <= 2**63 - 1. The prime cache is extended by sieving up to
    2**24 when needed; beyond that the wheel stream continues the search, so
    worst-case inputs (products of two ~31-bit primes) are slow but correct.
    """
    if not isinstance(n, int):
        raise ValueError(f"n must be an integer, got {type(n).__name__}")
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    if n > MAX_FACTOR_INPUT:
        raise ValueError(f"n={n} exceeds the supported range 2**63 - 1")

    if isqrt(n) > _CACHE_LIMIT:
        _extend_prime_cache(min(1 << 24, isqrt(n) + 1))

    m = n
    out: list[tuple[int, int]] = []
    for p in _PRIME_CACHE:
        if p * p > m:
            break
        if m % p == 0:
            a = 0
            while m % p == 0:
                m //= p
                a += 1
            out.append((p, a))
    else:
        # cache exhausted with p*p <= m: continue on the wheel
        for c in iter_trial_candidates(_CACHE_LIMIT + 1):
            if c * c > m:
                break
            if m % c == 0:
                a = 0
                while m % c == 0:
                    m //= c
                    a += 1
                out.append((c, a))
    if m > 1:
        out.append((m, 1))
    return PrimeFactorization(tuple(out))


def divisor_count(f: PrimeFactorization) -> int:
    """Number of positive divisors: prod of (exponent + 1)."""
    d = 1
    for _, a in f:
        d *= a + 1
    return d


def omega(f: PrimeFactorization) -> int:
    """Number of distinct prime factors."""
    return len(f.factors)


def minimal_power(f: PrimeFactorization, r: int) -> PrimeFactorization:
    """Factorization of the least m such that the represented n divides m**r.

    Each exponent a becomes ceil(a/r). Multiplicative in n. r = 1 is allowed
    (identity map) so oracle comparisons can include it, even though the
    asymptotic theory elsewhere requires r >= 2.
    """
    if not isinstance(r, int) or r < 1:
        raise ValueError(f"r must be an integer >= 1, got {r!r}")
    return PrimeFactorization(tuple((p, -(-a // r)) for p, a in f))


def weighted_divisor(f: PrimeFactorization, k: float) -> ExactValue:
    """d(n) / k**omega(n); exact Fraction for integer k, float otherwise."""
    if not k >= 1:
        raise ValueError(f"k must be >= 1, got {k!r}")
    d = divisor_count(f)
    w = omega(f)
    if float(k).is_integer():
        return Fraction(d, int(k) ** w)
    return d / float(k) ** w


def composite_weighted_divisor(f: PrimeFactorization, params: ArithParams) -> ExactValue:
    """Weighted divisor count of the minimal power of the represented integer.

    Multiplicative; at a prime power p**a the value is (ceil(a/r) + 1) / k.
    The weight exponent omega is taken on the minimal power, which has the
    same prime support as n, so it equals omega(n).
    """
    return weighted_divisor(minimal_power(f, params.r), params.k)


def float_error_bound(w: int) -> float:
    """Relative float round-off bound for a weighted divisor value.

    A float-mode value is formed from one pow, one division, and up to w
    factor multiplications, each contributing at most one ulp.
    """
    return (w + 3) * _EPS
