"""Empirical checks of the family averages along a grid of X values."""

from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np
from sympy import primefactors

from .charsums import DEFAULT_PRIME_CAP, ap_table
from .config_schema import GridConfig, TruncationParams
from .constants import DEFAULT_TRUNCATION, d_constants, odd_prime_sums, weight_log_integral
from .density import conductor_table_limit, log_conductors
from .errors import DomainError
from .families import WeightFunction, iter_rows, make_weight, predicted_family_size, scale_family
from .numtheory import log_radical_table
from .types import ConvergenceRow, FamilyParams, ScaledFamily

logger = logging.getLogger(__name__)

FLAG_OUT_OF_RANGE = "out_of_asymptotic_range"
FLAG_NOT_MONOTONE = "decay_not_monotone"


def _row(label: str, X: float, observed: float, predicted: float, residual_scaled: float,
         flags: tuple[str, ...] = ()) -> ConvergenceRow:
    ratio = observed / predicted if predicted != 0.0 else math.nan
    return ConvergenceRow(label=label, X=X, observed=observed, predicted=predicted, ratio=ratio,
                          residual_scaled=residual_scaled, flags=flags)


def _check_grid(X_grid: Sequence[float]) -> None:
    if len(X_grid) < 2:
        raise DomainError("X grid must contain at least two points")
    if any(left >= right for left, right in zip(X_grid, X_grid[1:])):
        raise DomainError(f"X grid must be strictly ascending, got {list(X_grid)}")


def _total_weight(scaled: ScaledFamily) -> float:
    return math.fsum(math.fsum(weights.tolist()) for _a, _b, weights in iter_rows(scaled))


def is_monotone_decay(values: Sequence[float], rel_tol: float = 0.2, abs_tol: float = 1e-3) -> bool:
    """|values| non-increasing up to a relative slack and an absolute noise floor."""

    sizes = [abs(value) for value in values]
    return all(later <= (1.0 + rel_tol) * earlier + abs_tol for earlier, later in zip(sizes, sizes[1:]))


def family_size_check(params: FamilyParams, weight: WeightFunction | None, X_grid: Sequence[float]) -> list[ConvergenceRow]:
    """W_X from enumeration against M(F) = A B gamma(q^2) / (k zeta(2))."""

    _check_grid(X_grid)
    rows = []
    for X in X_grid:
        scaled = scale_family(params, X, weight)
        observed = _total_weight(scaled)
        predicted = predicted_family_size(scaled)
        rows.append(_row("family_size", scaled.X, observed, predicted, observed / predicted - 1.0))
    return rows


def p_divides_density_check(params: FamilyParams, weight: WeightFunction | None, X: float, p: int) -> ConvergenceRow:
    """Weighted share of the family with p | a against 1/(p+1)."""

    if p == 2 or params.q % p == 0:
        raise DomainError(f"divisibility density needs p not dividing 2q, got p={p}, q={params.q}")
    scaled = scale_family(params, X, weight)
    hits, total = [], []
    for a, _b_values, weights in iter_rows(scaled):
        row_weight = math.fsum(weights.tolist())
        total.append(row_weight)
        if a % p == 0:
            hits.append(row_weight)
    W_X = math.fsum(total)
    if W_X == 0.0:
        raise DomainError(f"{params.family.id} family at X={X:g} is empty")
    observed = math.fsum(hits) / W_X
    predicted = 1.0 / (p + 1)
    # no multiple of p inside the a-window
    flags = (FLAG_OUT_OF_RANGE,) if p > scaled.A * scaled.weight.x_hi else ()
    return _row(f"p_divides_a:{p}", scaled.X, observed, predicted, (observed - predicted) * (p + 1), flags)


def avg_log_conductor_check(
    params: FamilyParams,
    weight: WeightFunction | None,
    X_grid: Sequence[float],
    trunc: TruncationParams = DEFAULT_TRUNCATION,
    cap: int = DEFAULT_PRIME_CAP,
) -> list[ConvergenceRow]:
    """Average of log N / log X against 1 + (d1 + c1) / log X."""

    _check_grid(X_grid)
    family = params.family
    weight = weight or make_weight()
    c1 = weight_log_integral(family, weight, trunc.quad_tol) - family.delta * odd_prime_sums(trunc.P)["log_p_over_p2_minus_1"]
    d1 = d_constants(family, params.q, cap)[1]
    rows = []
    for X in X_grid:
        scaled = scale_family(params, X, weight)
        log_X = scaled.log_X
        log_rad = log_radical_table(conductor_table_limit(scaled))
        weighted, weights = [], []
        for a, b_values, row_weights in iter_rows(scaled):
            weighted.append(math.fsum((row_weights * log_conductors(family, a, b_values, log_rad)).tolist()))
            weights.append(math.fsum(row_weights.tolist()))
        observed = math.fsum(weighted) / math.fsum(weights) / log_X
        predicted = 1.0 + (d1 + c1) / log_X
        rows.append(_row("avg_log_conductor", scaled.X, observed, predicted, (observed - predicted) * log_X))
    return rows


def squarefree_log_check(
    params: FamilyParams,
    weight: WeightFunction | None,
    X: float,
    trunc: TruncationParams = DEFAULT_TRUNCATION,
) -> ConvergenceRow:
    """Average of log rad(a) against log A + integral of log x w - sum_{p not | 2q} log p/(p^2 - 1)."""

    weight = weight or make_weight()
    scaled = scale_family(params, X, weight)
    log_rad = log_radical_table(conductor_table_limit(scaled))
    weighted, weights = [], []
    for a, _b_values, row_weights in iter_rows(scaled):
        row_weight = math.fsum(row_weights.tolist())
        weighted.append(row_weight * float(log_rad[a]))
        weights.append(row_weight)
    observed = math.fsum(weighted) / math.fsum(weights)
    log_x_integral, _error = weight.integrate(lambda x, y: math.log(x), trunc.quad_tol)
    excluded = [math.log(p) / (p * p - 1) for p in map(int, primefactors(params.q))]
    deficit = odd_prime_sums(trunc.P)["log_p_over_p2_minus_1"] - math.fsum(excluded)
    predicted = math.log(scaled.A) + log_x_integral - deficit
    return _row("squarefree_log", scaled.X, observed, predicted, observed - predicted)


def bad_prime_moment_check(
    params: FamilyParams,
    weight: WeightFunction | None,
    X: float,
    p: int,
    nu: int,
    cap: int = DEFAULT_PRIME_CAP,
) -> ConvergenceRow:
    """Average of lambda(p)^nu over curves with p | N against delta p^(-nu/2)/(p+1) or 0."""

    if p == 2 or params.q % p == 0:
        raise DomainError(f"bad-prime moment needs p not dividing 2q, got p={p}, q={params.q}")
    if nu < 1:
        raise DomainError(f"moment order must be positive, got {nu}")
    scaled = scale_family(params, X, weight)
    table = ap_table(params.family, p, cap)
    values = np.where(table.bad, table.traces.astype(np.float64) ** nu / p ** (nu / 2), 0.0)
    weighted, weights = [], []
    for a, b_values, row_weights in iter_rows(scaled):
        weighted.append(math.fsum((row_weights * values[a % p, b_values % p]).tolist()))
        weights.append(math.fsum(row_weights.tolist()))
    observed = math.fsum(weighted) / math.fsum(weights)
    predicted = params.family.delta * p ** (-nu / 2) / (p + 1) if nu % 2 == 0 else 0.0
    return _row(f"bad_prime_moment:{p}:{nu}", scaled.X, observed, predicted, (observed - predicted) * (p + 1))


def _with_decay_flag(rows: list[ConvergenceRow], values: Sequence[float], grid: GridConfig) -> list[ConvergenceRow]:
    if is_monotone_decay(values, grid.monotone_tolerance, grid.noise_floor):
        return rows
    logger.warning("%s: residuals do not decay along the grid: %s", rows[0].label, list(values))
    last = rows[-1]
    return rows[:-1] + [_row(last.label, last.X, last.observed, last.predicted, last.residual_scaled,
                              last.flags + (FLAG_NOT_MONOTONE,))]


def verify_suite(
    params: FamilyParams,
    weight: WeightFunction | None,
    grid: GridConfig,
    trunc: TruncationParams = DEFAULT_TRUNCATION,
    cap: int = DEFAULT_PRIME_CAP,
) -> list[ConvergenceRow]:
    """Every check along ``grid``; rows whose decay fails carry a flag on their last X."""

    sizes = family_size_check(params, weight, grid.X)
    sizes = _with_decay_flag(sizes, [row.ratio - 1.0 for row in sizes], grid)
    conductors = avg_log_conductor_check(params, weight, grid.X, trunc, cap)
    conductors = _with_decay_flag(conductors, [row.residual_scaled for row in conductors], grid)
    rows = sizes + conductors
    for p in grid.divisibility_primes:
        if params.q % p == 0:
            logger.info("skipping divisibility prime %d, it divides q=%d", p, params.q)
            continue
        rows.extend(p_divides_density_check(params, weight, X, p) for X in grid.X)
        rows.extend(bad_prime_moment_check(params, weight, grid.X[-1], p, nu, cap) for nu in (1, 2))
    rows.append(squarefree_log_check(params, weight, grid.X[-1], trunc))
    return rows
