"""Lower-order constants c1..c6, d1..d6(q), e(a0, b0) and the density prediction."""

from __future__ import annotations

import logging
import math
from functools import lru_cache

import numpy as np
from sympy import primefactors

from .charsums import DEFAULT_PRIME_CAP, class_histograms, local_factor_sum, q_series_local_sum, q_series_tail_bound
from .config_schema import TruncationParams
from .errors import DomainError, NumericError
from .families import WeightFunction, make_weight, trace_of_frobenius, validate_and_residues
from .numtheory import SEGMENT_SIZE, odd_primes_upto, theta_and_r_integral
from .testfunctions import TestFunctionPair
from .types import ConstantsReport, FamilyId, ScaledFamily
from .utils import blocked_fsum

logger = logging.getLogger(__name__)

LOG_2 = math.log(2.0)
C2 = -2.0 * math.log(2.0 * math.pi) - 2.0 * float(np.euler_gamma)

DEFAULT_TRUNCATION = TruncationParams(P=10**6, P_Q=2000, L_max=5, T=10**8, quad_tol=1e-9)

FLAG_D2 = "d2_identically_zero: the family statement names d2 but no definition accompanies it"
FLAG_C4 = "c4_mertens_convention_differs: see diagnostics c4_mertens_convention"


def _integral_tail(P: int, power: int) -> float:
    """Upper bound for sum_{n > P} log n / n^power by the integral from P."""

    k = power - 1
    return P ** (-k) * (math.log(P) / k + 1.0 / (k * k))


@lru_cache(maxsize=8)
def odd_prime_sums(P: int) -> dict[str, float]:
    """The four convergent odd-prime sums entering c1, c3, c4 and c6, truncated at P."""

    primes = odd_primes_upto(P).astype(np.float64)
    logs = np.log(primes)
    sums = {
        "log_p_over_p2_minus_1": blocked_fsum(logs / (primes * primes - 1.0)),
        "log_p_over_p2_minus_1_p_plus_1": blocked_fsum(logs / ((primes * primes - 1.0) * (primes + 1.0))),
        "log_p_over_p_p_plus_1": blocked_fsum(logs / (primes * (primes + 1.0))),
        "log_p_over_p_p_plus_1_sq": blocked_fsum(logs / (primes * (primes + 1.0) ** 2)),
    }
    logger.debug("odd prime sums to P=%d: %s", P, sums)
    return sums


def weight_log_integral(family: FamilyId, weight: WeightFunction, tol: float) -> float:
    """Integral of log(2^5 x y (x+2y)) w for F1 or log(2^6 y (x^2+y)) w for F2."""

    two_part = family.conductor_two_power * LOG_2
    if family.id == "F1":
        integrand = lambda x, y: math.log(x) + math.log(y) + math.log(x + 2.0 * y)  # noqa: E731
    else:
        integrand = lambda x, y: math.log(y) + math.log(x * x + y)  # noqa: E731
    value, error = weight.integrate(integrand, tol)
    if error > 100 * tol:
        raise NumericError(f"log-conductor quadrature error {error:.3g} exceeds tolerance {tol:.3g}")
    return two_part * weight.mass(tol) + value


def c5_local_form(family: FamilyId, P_Q: int, cap: int = DEFAULT_PRIME_CAP,
                  threads: int | None = None) -> tuple[float, float]:
    """c5 = -2 sum_{p <= P_Q} log p / (p(p+1)) * local_factor_sum(p), with a tail estimate."""

    primes = [int(p) for p in odd_primes_upto(P_Q)]
    class_histograms(family, primes, cap, threads)
    terms = []
    local_sizes = []
    for p in primes:
        local = float(local_factor_sum(family, p, cap))
        terms.append(-2.0 * math.log(p) / (p * (p + 1)) * local)
        local_sizes.append(abs(local) * p)
    # the local sums decay like 1/p; extrapolate with the largest p*|local| among the top half
    upper = local_sizes[len(local_sizes) // 2 :] or local_sizes
    kappa = max(upper) if upper else 0.0
    tail = 2.0 * kappa * _integral_tail(P_Q, 3)
    return math.fsum(terms), tail


def c5_q_series_form(family: FamilyId, P_Q: int, L_max: int, cap: int = DEFAULT_PRIME_CAP) -> tuple[float, float]:
    """c5 = -2 sum log p/(p+1) sum_{l <= L_max} Q(p^(2l))/p^(l+1) and its truncation bound."""

    terms = []
    bounds = []
    for p in (int(p) for p in odd_primes_upto(P_Q)):
        weight = 2.0 * math.log(p) / (p * (p + 1))
        terms.append(-weight * float(q_series_local_sum(family, p, L_max, cap)))
        bounds.append(weight * q_series_tail_bound(family, p, L_max, cap))
    return math.fsum(terms), math.fsum(bounds)


def c4_values(
    family: FamilyId,
    T: int,
    P: int,
    tail_constant: float = 1.0,
    segment_size: int = SEGMENT_SIZE,
) -> dict[str, float]:
    """c4 in the explicit-formula normalization and in the Mertens-sum convention.

    The prime number theorem sum over p not dividing N removes only the p = 2
    term, weighted log 2, and the R-integral tends to E - 1 with
    E = -gamma - sum_p sum_{k>=2} log p / p^k. The tabulated digits correspond to
    subtracting 2 log 2 and using sum log p/p - log T for the integral.
    """

    theta = theta_and_r_integral(T, tail_constant=tail_constant, segment_size=segment_size)
    sums = odd_prime_sums(P)
    bad_sum = family.delta * sums["log_p_over_p_p_plus_1"]
    consistent = 2.0 * (1.0 + theta.r_integral - bad_sum) - LOG_2
    log2_inside = 2.0 * (1.0 + theta.r_integral - bad_sum - LOG_2)
    mertens = 2.0 * (1.0 + theta.log_p_over_p - math.log(T) - bad_sum - LOG_2)
    return {
        "c4": consistent,
        "c4_log2_inside": log2_inside,
        "c4_mertens_convention": mertens,
        "r_integral": theta.r_integral,
        "theta_T": theta.theta_T,
        "tail": 2.0 * theta.tail_estimate + 2.0 * family.delta * _integral_tail(P, 2),
    }


def pnt_sum_coefficient(family: FamilyId, test: TestFunctionPair, log_X: float) -> float:
    """log X times the family-averaged odd-prime PNT sum, less the phi(0)/2 it carries.

    A prime p > 2 divides the conductor with average weight delta/(p+1), so the
    sum runs over 2 log p/(p log X) phi_hat(2 log p/log X) (1 - delta/(p+1)).
    The coefficient tends to c4 phi_hat(0), with an error of order 1/(rho log X).
    """

    if log_X <= 0.0:
        raise DomainError(f"log X must be positive, got {log_X}")
    limit = int(math.exp(0.5 * test.rho * log_X)) + 1
    primes = odd_primes_upto(limit).astype(np.float64)
    steps = 2.0 * np.log(primes) / log_X
    terms = steps / primes * test.phi_hat(steps) * (1.0 - family.delta / (primes + 1.0))
    return log_X * (blocked_fsum(terms) - 0.5 * test.phi0)


def c_constants(
    family: FamilyId,
    weight: WeightFunction | None = None,
    trunc: TruncationParams = DEFAULT_TRUNCATION,
    cap: int = DEFAULT_PRIME_CAP,
    tail_constant: float = 1.0,
    threads: int | None = None,
    segment_size: int = SEGMENT_SIZE,
) -> tuple[dict[int, float], dict[str, float], dict[str, float]]:
    """(c map, tails, diagnostics) for one family."""

    weight = weight or make_weight()
    sums = odd_prime_sums(trunc.P)
    delta = family.delta

    c: dict[int, float] = {}
    tails: dict[str, float] = {}
    c[1] = weight_log_integral(family, weight, trunc.quad_tol) - delta * sums["log_p_over_p2_minus_1"]
    tails["c1"] = delta * _integral_tail(trunc.P, 2) + trunc.quad_tol
    c[2] = C2
    tails["c2"] = 0.0
    c[3] = -2.0 * delta * sums["log_p_over_p2_minus_1_p_plus_1"]
    tails["c3"] = 2.0 * delta * _integral_tail(trunc.P, 3)
    c4 = c4_values(family, trunc.T, trunc.P, tail_constant, segment_size)
    c[4] = c4["c4"]
    tails["c4"] = c4["tail"]
    c[5], tails["c5"] = c5_local_form(family, trunc.P_Q, cap, threads)
    c[6] = 2.0 * delta * sums["log_p_over_p_p_plus_1_sq"]
    tails["c6"] = 2.0 * delta * _integral_tail(trunc.P, 3)

    c5_series, c5_series_bound = c5_q_series_form(family, trunc.P_Q, trunc.L_max, cap)
    diagnostics = {
        "c4_log2_inside": c4["c4_log2_inside"],
        "c4_mertens_convention": c4["c4_mertens_convention"],
        "r_integral": c4["r_integral"],
        "theta_T": c4["theta_T"],
        "c5_q_series": c5_series,
        "c5_q_series_bound": c5_series_bound,
        "c5_form_difference": abs(c[5] - c5_series),
        "c3456_mertens_convention": math.fsum([c[3], c4["c4_mertens_convention"], c[5], c[6]]),
    }
    logger.info("%s constants: %s", family.id, c)
    return c, tails, diagnostics


def d_constants(family: FamilyId, q: int, cap: int = DEFAULT_PRIME_CAP) -> dict[int, float]:
    """Finite sums over the primes dividing q; d2 is identically zero."""

    if q <= 0 or q % 2 == 0:
        raise DomainError(f"q must be odd and positive, got {q}")
    delta = family.delta
    d = {idx: 0.0 for idx in range(1, 7)}
    terms: dict[int, list[float]] = {idx: [] for idx in range(1, 7)}
    for p in primefactors(q):
        p = int(p)
        log_p = math.log(p)
        terms[1].append(delta * log_p / (p * p - 1))
        terms[3].append(2.0 * delta * log_p / ((p * p - 1) * (p + 1)))
        terms[4].append(2.0 * delta * log_p / (p * (p + 1)))
        terms[5].append(2.0 * log_p / (p * (p + 1)) * float(local_factor_sum(family, p, cap)))
        terms[6].append(-2.0 * delta * log_p / (p * (p + 1) ** 2))
    for idx, values in terms.items():
        if values:
            d[idx] = math.fsum(values)
    return d


def e_constant(family: FamilyId, q: int, a0: int, b0: int) -> float:
    """-2 sum_{p | q} log p (1 - 1/p) [(1 - lambda(p)/sqrt(p) + 1/p)^-1 - 1]."""

    validate_and_residues(family, q, a0, b0)
    terms = []
    for p in primefactors(q):
        p = int(p)
        trace = trace_of_frobenius(family, a0, b0, p)
        bracket = (trace - 1) / (p - trace + 1)
        terms.append(-2.0 * math.log(p) * (1.0 - 1.0 / p) * bracket)
    return math.fsum(terms)


def constants_report(
    family: FamilyId,
    q: int = 1,
    a0: int = 1,
    b0: int = 1,
    weight: WeightFunction | None = None,
    trunc: TruncationParams = DEFAULT_TRUNCATION,
    cap: int = DEFAULT_PRIME_CAP,
    tail_constant: float = 1.0,
    threads: int | None = None,
    segment_size: int = SEGMENT_SIZE,
) -> ConstantsReport:
    """Every constant for (family, q, a0, b0) with truncation provenance."""

    validate_and_residues(family, q, a0, b0)
    c, tails, diagnostics = c_constants(family, weight, trunc, cap, tail_constant, threads, segment_size)
    d = d_constants(family, q, cap)
    e = e_constant(family, q, a0, b0)
    values = [*c.values(), *d.values(), e]
    if not all(math.isfinite(value) for value in values):
        raise NumericError(f"non-finite constant in report for {family.id}, q={q}")
    return ConstantsReport(
        family=family.id,
        q=q,
        a0=a0,
        b0=b0,
        c=c,
        d=d,
        e=e,
        tails=tails,
        provenance=trunc,
        flags=(FLAG_D2, FLAG_C4),
        diagnostics=diagnostics,
    )


def predicted_density(
    scaled: ScaledFamily,
    test: TestFunctionPair,
    trunc: TruncationParams = DEFAULT_TRUNCATION,
    report: ConstantsReport | None = None,
    cap: int = DEFAULT_PRIME_CAP,
) -> float:
    """phi(0)/2 + phi_hat(0) + phi_hat(0)/log X * (e + sum d + sum c)."""

    family = scaled.family
    if test.rho >= family.support_bound:
        raise DomainError(
            f"test function support {test.rho} must be below {family.support_bound:.6g} for {family.id}"
        )
    params = scaled.params
    if report is None:
        report = constants_report(family, params.q, params.a0, params.b0, scaled.weight, trunc, cap)
    return 0.5 * test.phi0 + test.phihat0 + test.phihat0 / scaled.log_X * report.lower_order_sum
