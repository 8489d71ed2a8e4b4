"""Primes, quadratic symbols, radicals and the Chebyshev quantities behind the constants."""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np
from scipy import integrate
from sympy import jacobi_symbol, primefactors

from .errors import DomainError, NumericError
from .types import PrimeSieve, ThetaIntegralResult
from .utils import blocked_fsum, fan_out

logger = logging.getLogger(__name__)

SEGMENT_SIZE = 1 << 20
SEGMENTED_THRESHOLD = 10**8


def simple_sieve(limit: int) -> np.ndarray:
    """Plain Eratosthenes for the base primes of the segmented sieve."""

    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p : limit + 1 : p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _segment_bounds(limit: int, segment_size: int) -> list[tuple[int, int]]:
    span = 2 * segment_size
    bounds = []
    low = 3
    while low <= limit:
        high = min(low + span, limit + 1)
        bounds.append((low, high))
        low = high
    return bounds


def _sieve_segment(low: int, high: int, base: np.ndarray, limit: int) -> np.ndarray:
    """Odd primes in [low, high); low is odd."""

    odd_count = (high - low + 1) // 2
    mask = np.ones(odd_count, dtype=bool)
    for p in base:
        p = int(p)
        if p == 2:
            continue
        p2 = p * p
        if p2 > limit or p2 >= high:
            break
        start = max(p2, ((low + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        if start >= high:
            continue
        mask[(start - low) // 2 :: p] = False
    return low + 2 * np.flatnonzero(mask).astype(np.int64)


def iter_prime_segments(limit: int, segment_size: int = SEGMENT_SIZE) -> Iterator[np.ndarray]:
    """Stream the primes up to ``limit`` segment by segment, in ascending order."""

    if limit < 2:
        raise DomainError(f"prime limit must be at least 2, got {limit}")
    base = simple_sieve(math.isqrt(limit) + 1)
    yield np.array([2], dtype=np.int64)
    for low, high in _segment_bounds(limit, segment_size):
        yield _sieve_segment(low, high, base, limit)


def sieve(limit: int, segment_size: int = SEGMENT_SIZE, threads: int | None = None) -> PrimeSieve:
    """All primes up to ``limit``.

    Below ``SEGMENTED_THRESHOLD`` a single Eratosthenes pass is used; above it the
    odd-only segmented sieve runs with segments evaluated independently.
    """

    if limit < 2:
        raise DomainError(f"prime limit must be at least 2, got {limit}")
    if limit <= SEGMENTED_THRESHOLD:
        primes = simple_sieve(limit)
    else:
        base = simple_sieve(math.isqrt(limit) + 1)
        bounds = _segment_bounds(limit, segment_size)
        parts = fan_out(lambda bound: _sieve_segment(bound[0], bound[1], base, limit), bounds, threads)
        primes = np.concatenate([np.array([2], dtype=np.int64), *parts])
        logger.debug("segmented sieve to %d used %d segments", limit, len(bounds))
    primes.setflags(write=False)
    return PrimeSieve(limit=limit, primes=primes)


@lru_cache(maxsize=16)
def odd_primes_upto(limit: int) -> np.ndarray:
    """Read-only array of odd primes up to ``limit`` (empty below 3)."""

    if limit < 3:
        primes = np.array([], dtype=np.int64)
    else:
        primes = simple_sieve(limit)[1:]
    primes.setflags(write=False)
    return primes


def jacobi(n: int, m: int) -> int:
    """Jacobi symbol (n / m); 0 exactly when gcd(n, m) > 1."""

    if m <= 0 or m % 2 == 0:
        raise DomainError(f"jacobi modulus must be odd and positive, got {m}")
    return int(jacobi_symbol(n % m, m))


@lru_cache(maxsize=64)
def legendre_table(p: int) -> np.ndarray:
    """Read-only int8 array chi with chi[x] = (x / p) for 0 <= x < p."""

    if p < 3 or p % 2 == 0:
        raise DomainError(f"legendre_table needs an odd prime, got {p}")
    chi = np.full(p, -1, dtype=np.int8)
    squares = (np.arange(1, (p - 1) // 2 + 1, dtype=np.int64) ** 2) % p
    chi[squares] = 1
    chi[0] = 0
    chi.setflags(write=False)
    return chi


def radical(n: int) -> int:
    """Product of the distinct primes dividing ``n``."""

    if n == 0:
        raise DomainError("radical of 0 is undefined")
    return math.prod(primefactors(abs(n)))


def log_radical_table(limit: int) -> np.ndarray:
    """Array whose entry n is log rad(n) for 1 <= n <= limit (entry 0 unused)."""

    table = np.zeros(limit + 1, dtype=np.float64)
    for p in simple_sieve(limit):
        table[int(p) :: int(p)] += math.log(int(p))
    return table


def gamma_l(l: int) -> Fraction:
    """gamma(l) = (1/l) * prod_{p | l} (1 - p^-2)^-1, exactly."""

    if l <= 0:
        raise DomainError(f"gamma_l needs a positive integer, got {l}")
    value = Fraction(1, l)
    for p in primefactors(l):
        value *= Fraction(p * p, p * p - 1)
    return value


def theta_and_r_integral(
    T: int,
    tail_constant: float = 1.0,
    segment_size: int = SEGMENT_SIZE,
) -> ThetaIntegralResult:
    """theta(T) and the integral of R(t)/t^2 over [1, T] by summation by parts.

    With R(t) = theta(t) - t the integral equals
    sum_{p <= T} log p / p - theta(T)/T - log T. The discarded tail beyond T is
    reported as tail_constant * T^(-1/2) * (log T)^2.
    """

    if T < 2:
        raise DomainError(f"theta cutoff must be at least 2, got {T}")
    theta_parts: list[float] = []
    mertens_parts: list[float] = []
    for segment in iter_prime_segments(T, segment_size):
        if segment.size == 0:
            continue
        logs = np.log(segment.astype(np.float64))
        theta_parts.append(blocked_fsum(logs))
        mertens_parts.append(blocked_fsum(logs / segment))
    theta_T = math.fsum(theta_parts)
    log_p_over_p = math.fsum(mertens_parts)
    r_integral = log_p_over_p - theta_T / T - math.log(T)
    tail = tail_constant * T**-0.5 * math.log(T) ** 2
    logger.info("theta(%d)=%.12g, R-integral=%.12g", T, theta_T, r_integral)
    return ThetaIntegralResult(
        T=T,
        theta_T=theta_T,
        r_integral=r_integral,
        tail_estimate=tail,
        log_p_over_p=log_p_over_p,
    )


def r_integral_quadrature(T: int) -> float:
    """Direct quadrature of R(t)/t^2 on [1, T], one adaptive piece per prime gap."""

    if T < 2:
        raise DomainError(f"theta cutoff must be at least 2, got {T}")
    primes = simple_sieve(T).tolist()
    breakpoints = [1, *primes, T] if primes[-1] != T else [1, *primes]
    pieces = []
    theta = 0.0
    for idx, (left, right) in enumerate(zip(breakpoints, breakpoints[1:])):
        if idx > 0:
            theta += math.log(breakpoints[idx])
        value, error = integrate.quad(lambda t, th=theta: (th - t) / (t * t), left, right)
        if not math.isfinite(value) or error > 1e-9:
            raise NumericError(f"R-integral quadrature did not converge on [{left}, {right}]")
        pieces.append(value)
    return math.fsum(pieces)
