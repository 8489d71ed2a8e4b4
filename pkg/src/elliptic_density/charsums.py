"""Complete character sums over residue pairs (a, b) mod p.

Every exact quantity is accumulated from the histogram of (a_p, bad) values of
an ``ApTable``: the p^2 residue classes take at most 4 sqrt(p) + 3 distinct
values, and the Hecke recurrence runs once per value on Python integers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np
from sympy import isprime

from .errors import DomainError, ResourceCapError
from .families import iter_rows, predicted_family_size, prime_power_trace
from .numtheory import legendre_table
from .types import ExactMoment, FamilyId, ScaledFamily
from .utils import fan_out

logger = logging.getLogger(__name__)

DEFAULT_PRIME_CAP = 5000
DEFAULT_MAX_ORDER = 12
_CHUNK_CELLS = 1 << 21


@dataclass(frozen=True)
class ApTable:
    """a_p and the bad-reduction flag for every residue pair (a mod p, b mod p)."""

    family: FamilyId
    p: int
    traces: np.ndarray
    bad: np.ndarray

    def entry(self, a: int, b: int) -> tuple[int, bool]:
        return int(self.traces[a % self.p, b % self.p]), bool(self.bad[a % self.p, b % self.p])

    def histogram(self) -> tuple[tuple[int, bool, int], ...]:
        """Distinct (a_p, bad) values with their class counts, ascending."""

        return self._classes

    @cached_property
    def _classes(self) -> tuple[tuple[int, bool, int], ...]:
        keys = self.traces.astype(np.int64).ravel() * 2 + self.bad.ravel()
        values, counts = np.unique(keys, return_counts=True)
        return tuple((int(key) >> 1, bool(key & 1), int(count)) for key, count in zip(values, counts))


def _check_prime(p: int, cap: int) -> None:
    if p < 3 or not isprime(p):
        raise DomainError(f"character sums need an odd prime, got {p}")
    if p > cap:
        raise ResourceCapError(f"p={p} exceeds the character-sum prime cap {cap}")


def _orbit_representatives(family: FamilyId, p: int, chi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Traces at (1, s) and at (0, s) for every s mod p."""

    x = np.arange(p, dtype=np.int64)[None, :]
    unit_row = np.empty(p, dtype=np.int64)
    zero_row = np.empty(p, dtype=np.int64)
    step = max(1, _CHUNK_CELLS // p)
    for start in range(0, p, step):
        s = np.arange(start, min(p, start + step), dtype=np.int64)[:, None]
        if family.id == "F1":
            unit = (x * (x - 1) % p) * ((x + 2 * s) % p) % p
            zero = (x * x % p) * ((x + 2 * s) % p) % p
        else:
            unit = x * ((x * x + 2 * x - s) % p) % p
            zero = x * ((x * x - s) % p) % p
        unit_row[start : start + s.shape[0]] = -chi[unit].astype(np.int64).sum(axis=1)
        zero_row[start : start + s.shape[0]] = -chi[zero].astype(np.int64).sum(axis=1)
    return unit_row, zero_row


def _build_table(family: FamilyId, p: int) -> ApTable:
    chi = legendre_table(p)
    unit_row, zero_row = _orbit_representatives(family, p, chi)
    inverses = np.array([0] + [pow(a, -1, p) for a in range(1, p)], dtype=np.int64)
    scale = inverses if family.id == "F1" else (inverses * inverses) % p
    column = np.arange(p, dtype=np.int64)[None, :]

    traces = np.empty((p, p), dtype=np.int16)
    bad = np.empty((p, p), dtype=bool)
    traces[0, :] = zero_row
    step = max(1, _CHUNK_CELLS // p)
    for start in range(0, p, step):
        rows = np.arange(start, min(p, start + step), dtype=np.int64)[:, None]
        if family.id == "F1":
            bad[start : start + rows.shape[0]] = ((rows * column % p) * ((rows + 2 * column) % p) % p) == 0
        else:
            bad[start : start + rows.shape[0]] = (column * ((rows * rows + column) % p) % p) == 0
        nonzero = rows[rows[:, 0] > 0]
        if nonzero.size:
            orbit_index = (column * scale[nonzero]) % p
            traces[nonzero[:, 0]] = chi[nonzero].astype(np.int64) * unit_row[orbit_index]
    traces.setflags(write=False)
    bad.setflags(write=False)
    return ApTable(family=family, p=p, traces=traces, bad=bad)


@lru_cache(maxsize=64)
def _cached_table(family: FamilyId, p: int) -> ApTable:
    logger.debug("building %s a_p table for p=%d", family.id, p)
    return _build_table(family, p)


def ap_table(family: FamilyId, p: int, cap: int = DEFAULT_PRIME_CAP) -> ApTable:
    """a_p for every residue pair via the one-parameter orbit reduction.

    F1 satisfies a_p(ea, eb) = (e/p) a_p(a, b) and F2 satisfies
    a_p(ea, e^2 b) = (e/p) a_p(a, b), so only the rows a = 0 and a = 1 need
    character sums; every other row is a permuted, signed copy of a = 1.
    """

    _check_prime(p, cap)
    return _cached_table(family, p)


def ap_tables(family: FamilyId, primes: Sequence[int], cap: int = DEFAULT_PRIME_CAP,
              threads: int | None = None) -> list[ApTable]:
    return fan_out(lambda p: ap_table(family, int(p), cap), list(primes), threads)


@lru_cache(maxsize=None)
def _cached_histogram(family: FamilyId, p: int) -> tuple[tuple[int, bool, int], ...]:
    return _cached_table(family, p).histogram()


def class_histogram(family: FamilyId, p: int, cap: int = DEFAULT_PRIME_CAP) -> tuple[tuple[int, bool, int], ...]:
    """ApTable.histogram for p, kept after the table itself leaves the table cache."""

    _check_prime(p, cap)
    return _cached_histogram(family, p)


def class_histograms(family: FamilyId, primes: Sequence[int], cap: int = DEFAULT_PRIME_CAP,
                     threads: int | None = None) -> list[tuple[tuple[int, bool, int], ...]]:
    return fan_out(lambda p: class_histogram(family, int(p), cap), list(primes), threads)


def Q_exact(family: FamilyId, p: int, v: int, cap: int = DEFAULT_PRIME_CAP,
            max_order: int = DEFAULT_MAX_ORDER) -> ExactMoment:
    """Q(p^v) = sum over all residue pairs of lambda(p^v), exactly."""

    if v < 1 or v > max_order:
        raise DomainError(f"moment order must lie in [1, {max_order}], got {v}")
    numerator = sum(
        count * prime_power_trace(trace, p, v, good=not is_bad)
        for trace, is_bad, count in class_histogram(family, p, cap)
    )
    return ExactMoment(numerator=numerator, half_power=v, p=p, v=v)


def second_moment(family: FamilyId, p: int, cap: int = DEFAULT_PRIME_CAP) -> Fraction:
    """Sum of lambda(p)^2 over all residue pairs."""

    histogram = class_histogram(family, p, cap)
    return Fraction(sum(count * trace * trace for trace, _bad, count in histogram), p)


def closed_form_second_moment(family: FamilyId, p: int) -> Fraction:
    """Number of good classes: Q(p^2) = 0 forces sum lambda^2 = #good."""

    if family.id == "F1":
        return Fraction((p - 1) * (p - 2))
    return Fraction((p - 1) ** 2)


def _class_term(trace: int, p: int, is_bad: bool) -> Fraction:
    # (1 - a/p + chi/p)^-1 - 1 with chi = 1 on good classes and 0 on bad ones
    if is_bad:
        return Fraction(trace, p - trace)
    return Fraction(trace - 1, p - trace + 1)


def local_factor_sum(family: FamilyId, p: int, cap: int = DEFAULT_PRIME_CAP) -> Fraction:
    """Sum over residue pairs of (1 - lambda(p)/sqrt(p) + chi(p)/p)^-1 - 1."""

    return sum(
        (count * _class_term(trace, p, is_bad) for trace, is_bad, count in class_histogram(family, p, cap)),
        start=Fraction(0),
    )


def q_series_local_sum(family: FamilyId, p: int, L_max: int, cap: int = DEFAULT_PRIME_CAP) -> Fraction:
    """sum_{l <= L_max} Q(p^(2l)) / p^l, the truncated series form of the local factor sum."""

    total = Fraction(0)
    for l in range(1, L_max + 1):
        moment = Q_exact(family, p, 2 * l, cap, max_order=max(2 * L_max, DEFAULT_MAX_ORDER))
        total += moment.as_fraction() / p**l
    return total


def q_series_tail_bound(family: FamilyId, p: int, L_max: int, cap: int = DEFAULT_PRIME_CAP) -> float:
    """Bound on the omitted terms l > L_max using |lambda(p^v)| <= v + 1 on good classes."""

    histogram = class_histogram(family, p, cap)
    good = sum(count for _trace, is_bad, count in histogram if not is_bad)
    bad = sum(count for trace, is_bad, count in histogram if is_bad and trace != 0)
    good_tail = math.fsum((2 * l + 1) * p ** (-l) for l in range(L_max + 1, L_max + 400))
    bad_tail = math.fsum(p ** (-2 * l) for l in range(L_max + 1, L_max + 200))
    return good * good_tail + bad * bad_tail


def lambda_power_table(table: ApTable, v: int) -> np.ndarray:
    """lambda(p^v) as floats for every residue class of ``table``."""

    p = table.p
    values = np.zeros(table.traces.shape, dtype=np.float64)
    for trace, is_bad, _count in table.histogram():
        mask = (table.traces == trace) & (table.bad == is_bad)
        values[mask] = prime_power_trace(trace, p, v, good=not is_bad) / p ** (v / 2)
    return values


def weighted_moment_V(scaled: ScaledFamily, p: int, v: int, cap: int = DEFAULT_PRIME_CAP) -> float:
    """V(p, v) = sum over the family of lambda(p^v) w(a/A, b/B)."""

    if p == 2 or scaled.params.q % p == 0:
        raise DomainError(f"weighted moment needs p not dividing 2q, got p={p}, q={scaled.params.q}")
    if v < 0:
        raise DomainError(f"moment order must be nonnegative, got {v}")
    if v == 0:
        values = None
    else:
        values = lambda_power_table(ap_table(scaled.family, p, cap), v)
    partials = []
    for a, b_values, weights in iter_rows(scaled):
        if values is None:
            partials.append(math.fsum(weights.tolist()))
        else:
            partials.append(math.fsum((weights * values[a % p, b_values % p]).tolist()))
    return math.fsum(partials)


def predicted_weighted_moment(scaled: ScaledFamily, p: int, v: int, cap: int = DEFAULT_PRIME_CAP) -> float:
    """Leading term Q(p^v) / (p^2 - 1) * M(F)."""

    moment = Q_exact(scaled.family, p, v, cap)
    return float(moment) / (p * p - 1) * predicted_family_size(scaled)
