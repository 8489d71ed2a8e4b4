"""Utility helpers for deterministic summation, thread fan-out and number formatting."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

SIGNIFICANT_DIGITS = 15


def default_threads() -> int:
    """Hardware parallelism, at least one."""

    return max(1, os.cpu_count() or 1)


def fan_out(fn: Callable[[T], R], items: Sequence[T], threads: int | None = None) -> list[R]:
    """Map ``fn`` over ``items`` and return results in input order.

    Results never depend on the schedule: each item is evaluated independently
    and the output list is indexed by position.
    """

    workers = threads or 1
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def blocked_fsum(values: np.ndarray, block_size: int = 1 << 16) -> float:
    """Correctly rounded sum of a float array, combined block by block in fixed order."""

    flat = np.asarray(values, dtype=np.float64).ravel()
    partials = [math.fsum(flat[start : start + block_size].tolist()) for start in range(0, flat.size, block_size)]
    return math.fsum(partials)


def fraction_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def round_significant(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    """Round to ``digits`` significant digits; non-finite values pass through."""

    if not math.isfinite(value) or value == 0.0:
        return value
    return float(f"{value:.{digits}g}")


def parse_float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def parse_int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]

