"""Explicit-formula evaluation of the zero sum D(E; phi) and its family averages.

The explicit formula turns sum_gamma phi(gamma log X / 2 pi) into a conductor
term, an archimedean (gamma-factor) term and finite prime sums; phi_hat vanishes
outside [-rho, rho], so only primes p < X^rho ever contribute.
"""

from __future__ import annotations

import logging
import math
import time
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy import integrate, special

from .charsums import DEFAULT_PRIME_CAP, ApTable, ap_tables
from .config_schema import TruncationParams
from .constants import C2, DEFAULT_TRUNCATION, constants_report, predicted_density
from .errors import DomainError, UnsupportedError
from .families import (
    check_curve,
    conductor,
    is_bad_residue,
    iter_rows,
    predicted_family_size,
    prime_power_trace,
    trace_of_frobenius,
)
from .numtheory import log_radical_table, odd_primes_upto
from .testfunctions import TestFunctionPair, integrate_against_phi
from .types import ConstantsReport, Curve, DensityReport, DensityValue, FamilyAverage, FamilyId, ScaledFamily

logger = logging.getLogger(__name__)

Method = Literal["auto", "tables", "direct"]
LOG_2PI = math.log(2.0 * math.pi)


def _psi_on_line(x: float, log_X: float) -> complex:
    return complex(special.psi(complex(1.0, 2.0 * math.pi * x / log_X)))


@lru_cache(maxsize=64)
def gamma_term(X: float, test: TestFunctionPair, tol: float = 1e-11, cutoff_periods: float = 10.0) -> float:
    """(2/log X) * integral of phi(x) (-log 2 pi + Re psi(1 + 2 pi i x / log X))."""

    log_X = math.log(X)

    def archimedean(x: float) -> float:
        return -LOG_2PI + _psi_on_line(x, log_X).real

    return 2.0 / log_X * integrate_against_phi(test, archimedean, tol, cutoff_periods)


def gamma_term_imaginary_residual(X: float, test: TestFunctionPair, tol: float = 1e-11,
                                  cutoff_periods: float = 10.0) -> float:
    """Imaginary part of the archimedean integral over [-L, L]; zero by symmetry."""

    log_X = math.log(X)
    cutoff = cutoff_periods / test.rho
    value, _error = integrate.quad(
        lambda x: float(test.phi(x)) * _psi_on_line(x, log_X).imag,
        -cutoff,
        cutoff,
        epsabs=tol,
        limit=1000,
    )
    return 2.0 / log_X * value


def gamma_term_series_check(X: float, test: TestFunctionPair, M: int) -> float:
    """c2 phi_hat(0)/log X - 2 sum_{l <= M} zeta(1+2l) phi_hat^(2l)(0) (log X)^(-2l-1)."""

    if test.kind != "cosine_sq":
        raise UnsupportedError(f"series expansion needs a transform smooth at 0, got kind '{test.kind}'")
    if not 0 <= M <= 3:
        raise DomainError(f"series order M must lie in [0, 3], got {M}")
    log_X = math.log(X)
    terms = [C2 * test.phihat0 / log_X]
    for l in range(1, M + 1):
        terms.append(-2.0 * float(special.zeta(1 + 2 * l)) * test.phi_hat_derivative(2 * l) * log_X ** (-2 * l - 1))
    return math.fsum(terms)


def prime_contribution(
    trace: int,
    bad: bool,
    p: int,
    log_X: float,
    test: TestFunctionPair,
    slack: float = 1.0,
) -> tuple[float, float, float]:
    """(bad, pnt, good) contributions of one odd prime to the explicit formula."""

    step = math.log(p) / log_X
    reach = test.rho * slack
    if bad:
        terms = []
        nu = 1
        while nu * step < reach:
            terms.append(trace**nu / p**nu * float(test.phi_hat(nu * step)))
            nu += 1
        return -2.0 * step * math.fsum(terms), 0.0, 0.0
    pnt = 2.0 * step / p * float(test.phi_hat(2 * step))
    terms = []
    nu = 1
    while nu * step < reach:
        coefficient = prime_power_trace(trace, p, nu, good=True) / p**nu
        terms.append(coefficient * (float(test.phi_hat(nu * step)) - float(test.phi_hat((nu + 2) * step)) / p))
        nu += 1
    return 0.0, pnt, -2.0 * step * math.fsum(terms)


def _contributing_primes(X: float, test: TestFunctionPair, slack: float = 1.0) -> list[int]:
    log_X = math.log(X)
    bound = math.exp(test.rho * slack * log_X)
    return [int(p) for p in odd_primes_upto(int(bound) + 1) if math.log(int(p)) / log_X < test.rho * slack]


def explicit_formula_value(
    family: FamilyId,
    curve: Curve,
    X: float,
    test: TestFunctionPair,
    slack: float = 1.0,
    quad_tol: float = 1e-11,
    cutoff_periods: float = 10.0,
) -> DensityValue:
    """D(E; phi) from the explicit formula using character sums for every lambda(p)."""

    check_curve(family, curve)
    if X < 100:
        raise DomainError(f"X must be at least 100, got {X}")
    log_X = math.log(X)
    term_conductor = test.phihat0 * math.log(conductor(family, curve)) / log_X
    term_gamma = gamma_term(float(X), test, quad_tol, cutoff_periods)
    bad_terms, pnt_terms, good_terms = [], [], []
    for p in _contributing_primes(X, test, slack):
        trace = trace_of_frobenius(family, curve.a, curve.b, p)
        bad = is_bad_residue(family, curve.a, curve.b, p)
        bad_part, pnt_part, good_part = prime_contribution(trace, bad, p, log_X, test, slack)
        bad_terms.append(bad_part)
        pnt_terms.append(pnt_part)
        good_terms.append(good_part)
    term_bad, term_pnt, term_good = math.fsum(bad_terms), math.fsum(pnt_terms), math.fsum(good_terms)
    return DensityValue(
        total=math.fsum([term_conductor, term_gamma, term_bad, term_pnt, term_good]),
        term_conductor=term_conductor,
        term_gamma=term_gamma,
        term_bad=term_bad,
        term_pnt=term_pnt,
        term_good=term_good,
    )


def class_contributions(table: ApTable, log_X: float, test: TestFunctionPair) -> np.ndarray:
    """Explicit-formula contribution of prime table.p for every residue class."""

    values = np.zeros(table.traces.shape, dtype=np.float64)
    for trace, bad, _count in table.histogram():
        mask = (table.traces == trace) & (table.bad == bad)
        values[mask] = math.fsum(prime_contribution(trace, bad, table.p, log_X, test))
    return values


def log_conductors(family: FamilyId, a: int, b_values: np.ndarray, log_rad: np.ndarray) -> np.ndarray:
    two_part = family.conductor_two_power * math.log(2.0)
    if family.id == "F1":
        return two_part + log_rad[abs(a)] + log_rad[np.abs(b_values)] + log_rad[np.abs(a + 2 * b_values)]
    return two_part + log_rad[np.abs(b_values)] + log_rad[np.abs(a * a + b_values)]


def conductor_table_limit(scaled: ScaledFamily) -> int:
    weight = scaled.weight
    a_max = math.floor(scaled.A * max(abs(weight.x_lo), abs(weight.x_hi)))
    b_max = math.floor(scaled.B * max(abs(weight.y_lo), abs(weight.y_hi)))
    if scaled.family.id == "F1":
        return a_max + 2 * b_max + 1
    return a_max * a_max + b_max + 1


def _choose_method(scaled: ScaledFamily, test: TestFunctionPair, method: Method) -> str:
    if method != "auto":
        return method
    primes = _contributing_primes(scaled.X, test)
    table_cost = sum(p * p for p in primes)
    direct_cost = len(primes) * predicted_family_size(scaled) * max(primes, default=1)
    return "tables" if direct_cost > table_cost else "direct"


def family_density(
    scaled: ScaledFamily,
    test: TestFunctionPair,
    method: Method = "auto",
    limit: int | None = None,
    threads: int | None = None,
    cap: int = DEFAULT_PRIME_CAP,
    quad_tol: float = 1e-11,
    cutoff_periods: float = 10.0,
) -> FamilyAverage:
    """Weighted average of D(E; phi) over the family, optionally over its first ``limit`` curves."""

    family = scaled.family
    if test.rho >= family.support_bound:
        raise DomainError(
            f"test function support {test.rho} must be below {family.support_bound:.6g} for {family.id}"
        )
    chosen = _choose_method(scaled, test, method)
    started = time.perf_counter()
    log_X = scaled.log_X
    term_gamma = gamma_term(scaled.X, test, quad_tol, cutoff_periods)

    weighted: list[float] = []
    weights: list[float] = []
    count = 0
    if chosen == "tables":
        primes = _contributing_primes(scaled.X, test)
        tables = ap_tables(family, primes, cap, threads)
        contributions = [(table.p, class_contributions(table, log_X, test)) for table in tables]
        log_rad = log_radical_table(conductor_table_limit(scaled))
        for a, b_values, row_weights in iter_rows(scaled):
            if limit is not None and count + b_values.size > limit:
                keep = limit - count
                b_values, row_weights = b_values[:keep], row_weights[:keep]
            totals = test.phihat0 * log_conductors(family, a, b_values, log_rad) / log_X + term_gamma
            for p, values in contributions:
                totals = totals + values[a % p, b_values % p]
            weighted.append(math.fsum((row_weights * totals).tolist()))
            weights.append(math.fsum(row_weights.tolist()))
            count += int(b_values.size)
            if limit is not None and count >= limit:
                break
    else:
        for a, b_values, row_weights in iter_rows(scaled):
            for b, w in zip(b_values.tolist(), row_weights.tolist()):
                if limit is not None and count >= limit:
                    break
                value = explicit_formula_value(
                    family, Curve(a=a, b=b), scaled.X, test, quad_tol=quad_tol, cutoff_periods=cutoff_periods
                )
                weighted.append(w * value.total)
                weights.append(w)
                count += 1
            if limit is not None and count >= limit:
                break

    W_X = math.fsum(weights)
    if count == 0 or W_X == 0.0:
        raise DomainError(f"{family.id} family at X={scaled.X:g} is empty")
    logger.info("%s density at X=%g over %d curves via %s in %.1f ms",
                family.id, scaled.X, count, chosen, (time.perf_counter() - started) * 1000.0)
    return FamilyAverage(empirical=math.fsum(weighted) / W_X, W_X=W_X, curve_count=count, method=chosen)


def compare_report(
    scaled: ScaledFamily,
    test: TestFunctionPair,
    trunc: TruncationParams = DEFAULT_TRUNCATION,
    constants: ConstantsReport | None = None,
    method: Method = "auto",
    limit: int | None = None,
    threads: int | None = None,
    cap: int = DEFAULT_PRIME_CAP,
    quad_tol: float = 1e-11,
    cutoff_periods: float = 10.0,
) -> DensityReport:
    """Empirical family density against the predicted expansion, with residuals."""

    params = scaled.params
    if constants is None:
        constants = constants_report(
            scaled.family, params.q, params.a0, params.b0, scaled.weight, trunc, cap, threads=threads
        )
    predicted = predicted_density(scaled, test, trunc, constants, cap)
    average = family_density(
        scaled,
        test,
        method=method,
        limit=limit,
        threads=threads,
        cap=cap,
        quad_tol=quad_tol,
        cutoff_periods=cutoff_periods,
    )
    residual = average.empirical - predicted
    log_X = scaled.log_X
    return DensityReport(
        family=scaled.family.id,
        q=params.q,
        a0=params.a0,
        b0=params.b0,
        X=scaled.X,
        A=scaled.A,
        B=scaled.B,
        test_kind=test.kind,
        rho=test.rho,
        phi0=test.phi0,
        phihat0=test.phihat0,
        curve_count=average.curve_count,
        W_X=average.W_X,
        empirical=average.empirical,
        predicted=predicted,
        residual=residual,
        residual_scaled=residual * log_X * log_X,
        lower_order_coefficient=(average.empirical - 0.5 * test.phi0 - test.phihat0) * log_X,
        method=average.method,
    )
