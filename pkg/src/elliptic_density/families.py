"""The families F1: y^2 = x(x-a)(x+2b) and F2: y^2 = x(x^2+2ax-b).

Admissibility, congruence residues, scaling and enumeration live here together
with the per-curve invariants: conductor, reduction type and the normalized
Hecke coefficients lambda(p^v).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
from scipy import integrate
from sympy import isprime, primefactors
from sympy.ntheory.modular import crt

from .config_schema import WeightConfig
from .errors import AdmissibilityError, DomainError, NumericError, UnsupportedError
from .numtheory import gamma_l, jacobi, legendre_table, radical
from .types import BadPrimeCrossCheck, Curve, FamilyId, FamilyParams, ReductionType, ScaledFamily

logger = logging.getLogger(__name__)

F1 = FamilyId(id="F1", delta=3, two_exponent=1, support_bound=2 / 3, conductor_two_power=5, size_denominator=3)
F2 = FamilyId(id="F2", delta=2, two_exponent=2, support_bound=1 / 2, conductor_two_power=6, size_denominator=12)
FAMILIES: dict[str, FamilyId] = {"f1": F1, "f2": F2}

ZETA_2 = math.pi**2 / 6


def family_by_name(name: str) -> FamilyId:
    try:
        return FAMILIES[name.lower()]
    except KeyError as exc:
        raise DomainError(f"unknown family '{name}', expected one of {sorted(FAMILIES)}") from exc


# -- weight functions -------------------------------------------------------


def _bump(u: np.ndarray) -> np.ndarray:
    inside = np.abs(u) < 1.0
    safe = np.where(inside, 1.0 - u * u, 1.0)
    return np.where(inside, np.exp(-1.0 / safe), 0.0)


@dataclass(frozen=True)
class WeightFunction:
    """Nonnegative weight w(x, y) on a box, normalized to total mass 1."""

    kind: str
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    scale: float

    def profile(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if self.kind == "box":
            inside = (x >= self.x_lo) & (x <= self.x_hi) & (y >= self.y_lo) & (y <= self.y_hi)
            return inside.astype(np.float64)
        u = (2.0 * x - (self.x_lo + self.x_hi)) / (self.x_hi - self.x_lo)
        v = (2.0 * y - (self.y_lo + self.y_hi)) / (self.y_hi - self.y_lo)
        return _bump(u) * _bump(v)

    def __call__(self, x, y):
        return self.scale * self.profile(x, y)

    def integrate(self, fn: Callable[[float, float], float], tol: float = 1e-9) -> tuple[float, float]:
        """Integral of fn(x, y) * w(x, y) over the support, with its error estimate."""

        def integrand(y: float, x: float) -> float:
            return fn(x, y) * float(self(x, y))

        value, error = integrate.dblquad(
            integrand, self.x_lo, self.x_hi, self.y_lo, self.y_hi, epsabs=tol, epsrel=tol
        )
        return value, error

    def mass(self, tol: float = 1e-9) -> float:
        value, error = self.integrate(lambda x, y: 1.0, tol)
        if error > 100 * tol:
            raise NumericError(f"weight mass quadrature error {error:.3g} exceeds tolerance {tol:.3g}")
        return value


def make_weight(config: WeightConfig | None = None) -> WeightFunction:
    """Weight from config; the default is the product bump on [1, 2]^2."""

    config = config or WeightConfig(kind="bump", x_lo=1.0, x_hi=2.0, y_lo=1.0, y_hi=2.0)
    width_x = config.x_hi - config.x_lo
    width_y = config.y_hi - config.y_lo
    if config.kind == "box":
        scale = 1.0 / (width_x * width_y)
    else:
        one_d, error = integrate.quad(lambda u: float(_bump(np.array(u))), -1.0, 1.0, epsabs=1e-13, epsrel=1e-13)
        if error > 1e-10:
            raise NumericError(f"bump normalization quadrature error {error:.3g}")
        scale = 1.0 / ((width_x / 2.0) * one_d * (width_y / 2.0) * one_d)
    return WeightFunction(
        kind=config.kind,
        x_lo=config.x_lo,
        x_hi=config.x_hi,
        y_lo=config.y_lo,
        y_hi=config.y_hi,
        scale=scale,
    )


# -- parameters and scaling -------------------------------------------------


def _coprimality_target(family: FamilyId, a: int, b: int) -> int:
    if family.id == "F1":
        return a * b * (a + 2 * b)
    return b * (a * a + b)


def _parity_ok(family: FamilyId, a: int, b: int) -> bool:
    modulus = family.residue_modulus
    return a % modulus == 1 and b % modulus == 1


def validate_and_residues(family: FamilyId, q: int, a0: int, b0: int) -> FamilyParams:
    """Check the coprimality invariant and lift (a0, b0) to residues mod 2^i q."""

    if q <= 0 or q % 2 == 0:
        raise DomainError(f"q must be odd and positive, got {q}")
    shared = math.gcd(q, _coprimality_target(family, a0, b0))
    if shared != 1:
        prime = int(primefactors(shared)[0])
        expression = "a0*b0*(a0+2*b0)" if family.id == "F1" else "b0*(a0^2+b0)"
        raise AdmissibilityError(
            f"{family.id}: prime {prime} divides both q={q} and {expression} for (a0, b0)=({a0}, {b0})",
            prime=prime,
        )
    two_power = family.residue_modulus
    modulus = two_power * q
    r = int(crt([q, two_power], [a0 % q, 1])[0]) % modulus
    t = int(crt([q, two_power], [b0 % q, 1])[0]) % modulus
    return FamilyParams(family=family, q=q, a0=a0, b0=b0, r=r, t=t)


def _scaled_root(X: float, k: int) -> float:
    root = X ** (1.0 / k)
    nearest = round(root)
    if nearest > 0 and abs(nearest**k - X) <= 1e-9 * X:
        return float(nearest)
    return root


def scale_family(params: FamilyParams, X: float, weight: WeightFunction | None = None) -> ScaledFamily:
    """Attach the scale X: A = B = X^(1/3) for F1, A = X^(1/4), B = X^(1/2) for F2."""

    if X < 100:
        raise DomainError(f"X must be at least 100, got {X}")
    if params.family.id == "F1":
        A = B = _scaled_root(X, 3)
    else:
        A, B = _scaled_root(X, 4), _scaled_root(X, 2)
    return ScaledFamily(params=params, X=float(X), A=A, B=B, weight=weight or make_weight())


def check_curve(family: FamilyId, curve: Curve, params: FamilyParams | None = None) -> None:
    """Raise AdmissibilityError unless ``curve`` satisfies the family invariants."""

    a, b = curve.a, curve.b
    if math.gcd(a, b) != 1:
        raise AdmissibilityError(f"{family.id}: gcd(a, b) = {math.gcd(a, b)} for ({a}, {b})")
    if not _parity_ok(family, a, b):
        congruence = "a and b odd" if family.id == "F1" else "a = b = 1 (mod 4)"
        raise AdmissibilityError(f"{family.id}: ({a}, {b}) violates {congruence}", prime=2)
    if params is not None and params.q > 1:
        if (a - params.a0) % params.q or (b - params.b0) % params.q:
            raise AdmissibilityError(
                f"{family.id}: ({a}, {b}) is not congruent to ({params.a0}, {params.b0}) mod {params.q}"
            )


def _first_in_class(lower: int, residue: int, modulus: int) -> int:
    return lower + ((residue - lower) % modulus)


def iter_rows(scaled: ScaledFamily) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """Yield (a, b values, weights) for each admissible a, b ascending within the row."""

    params = scaled.params
    modulus = params.modulus
    weight = scaled.weight
    a_lo, a_hi = math.ceil(scaled.A * weight.x_lo), math.floor(scaled.A * weight.x_hi)
    b_lo, b_hi = math.ceil(scaled.B * weight.y_lo), math.floor(scaled.B * weight.y_hi)
    b_start = _first_in_class(b_lo, params.t, modulus)
    b_column = np.arange(b_start, b_hi + 1, modulus, dtype=np.int64)
    if b_column.size == 0:
        return
    y = b_column / scaled.B
    for a in range(_first_in_class(a_lo, params.r, modulus), a_hi + 1, modulus):
        keep = np.gcd(b_column, a) == 1
        b_values = b_column[keep]
        if b_values.size == 0:
            continue
        yield a, b_values, weight(np.full(b_values.size, a / scaled.A), y[keep])


def enumerate_family(scaled: ScaledFamily) -> Iterator[tuple[Curve, float]]:
    """Stream (curve, weight) pairs in (a, then b) ascending order."""

    for a, b_values, weights in iter_rows(scaled):
        for b, w in zip(b_values.tolist(), weights.tolist()):
            yield Curve(a=a, b=b), w


def predicted_family_size(scaled: ScaledFamily) -> float:
    """M(F) = A B gamma(q^2) / (3 zeta(2)) for F1 and / (12 zeta(2)) for F2."""

    family = scaled.family
    return scaled.A * scaled.B * float(gamma_l(scaled.params.q**2)) / (family.size_denominator * ZETA_2)


# -- per-curve invariants ---------------------------------------------------


def conductor(family: FamilyId, curve: Curve) -> int:
    """N = 2^5 rad(a) rad(b) rad(a+2b) for F1, 2^6 rad(b) rad(a^2+b) for F2."""

    check_curve(family, curve)
    a, b = curve.a, curve.b
    if family.id == "F1":
        return 2**5 * radical(a) * radical(b) * radical(a + 2 * b)
    return 2**6 * radical(b) * radical(a * a + b)


def is_bad_residue(family: FamilyId, a: int, b: int, p: int) -> bool:
    """Whether p divides the conductor, decided from (a mod p, b mod p)."""

    return _coprimality_target(family, a % p, b % p) % p == 0


def reduction_type(family: FamilyId, curve: Curve, p: int) -> ReductionType:
    if p == 2:
        raise UnsupportedError("reduction at p = 2 is additive for both families and handled by lambda(2) = 0")
    if p < 2 or not isprime(p):
        raise DomainError(f"reduction_type needs a prime, got {p}")
    check_curve(family, curve)
    return "multiplicative" if is_bad_residue(family, curve.a, curve.b, p) else "good"


def cubic_values(family: FamilyId, a: int, b: int, x: np.ndarray, p: int) -> np.ndarray:
    """The family cubic f(x) reduced mod p, elementwise."""

    a %= p
    b %= p
    x = np.asarray(x, dtype=np.int64) % p
    if family.id == "F1":
        return (x * ((x - a) % p) % p) * ((x + 2 * b) % p) % p
    return x * ((x * x + 2 * a * x - b) % p) % p


def trace_of_frobenius(family: FamilyId, a: int, b: int, p: int) -> int:
    """a_p = -sum_x (f(x) / p) for an odd prime p."""

    chi = legendre_table(p)
    values = cubic_values(family, a, b, np.arange(p, dtype=np.int64), p)
    return -int(chi[values].astype(np.int64).sum())


def lambda_p(family: FamilyId, curve: Curve, p: int) -> float:
    """Normalized coefficient lambda(p) = a_p / sqrt(p); zero at p = 2."""

    if p < 2 or not isprime(p):
        raise DomainError(f"lambda_p needs a prime, got {p}")
    if p == 2:
        return 0.0
    return trace_of_frobenius(family, curve.a, curve.b, p) / math.sqrt(p)


def prime_power_trace(trace: int, p: int, v: int, good: bool) -> int:
    """A(p^v) = lambda(p^v) p^(v/2) as an exact integer."""

    if v < 0:
        raise DomainError(f"prime power exponent must be nonnegative, got {v}")
    if not good:
        return trace**v
    previous, current = 1, trace
    if v == 0:
        return 1
    for _ in range(v - 1):
        previous, current = current, trace * current - p * previous
    return current


def lambda_prime_power(family: FamilyId, curve: Curve, p: int, v: int) -> float:
    """lambda(p^v) via the Hecke recurrence at good p and lambda(p)^v at bad p."""

    if v < 0:
        raise DomainError(f"prime power exponent must be nonnegative, got {v}")
    if v == 0:
        return 1.0
    if p == 2:
        return 0.0
    if p < 2 or not isprime(p):
        raise DomainError(f"lambda_prime_power needs a prime, got {p}")
    trace = trace_of_frobenius(family, curve.a, curve.b, p)
    good = not is_bad_residue(family, curve.a, curve.b, p)
    return prime_power_trace(trace, p, v, good) / p ** (v / 2)


def count_nonsingular_points(family: FamilyId, a: int, b: int, p: int) -> int:
    """Brute-force #E_ns(F_p): affine solutions minus the node, plus the point at infinity."""

    x = np.arange(p, dtype=np.int64)
    f = cubic_values(family, a, b, x, p)
    y_squared = (x * x) % p
    solutions = (y_squared[None, :] == f[:, None])
    a_p, b_p = a % p, b % p
    if family.id == "F1":
        derivative = (3 * x * x + 2 * (2 * b_p - a_p) * x - 2 * a_p * b_p) % p
    else:
        derivative = (3 * x * x + 4 * a_p * x - b_p) % p
    singular = int(np.count_nonzero((f == 0) & (derivative == 0)))
    return int(np.count_nonzero(solutions)) - singular + 1


def lemma_bad_prime_trace(family: FamilyId, curve: Curve, p: int) -> tuple[str, int]:
    """Closed bad-prime table of Legendre symbols, listed case by case."""

    a, b = curve.a, curve.b
    if family.id == "F1":
        if a % p == 0:
            return "p|a", jacobi(2 * b, p)
        if b % p == 0:
            return "p|b", jacobi(-a, p)
        if (a + 2 * b) % p == 0:
            return "p|(a+2b)", jacobi(2 * b, p)
    else:
        if b % p == 0:
            return "p|b", jacobi(2 * a, p)
        if (a * a + b) % p == 0:
            return "p|(a^2+b)", jacobi(-a, p)
    raise DomainError(f"{family.id}: p={p} is a prime of good reduction for ({a}, {b})")


def cross_check_bad_prime(family: FamilyId, curve: Curve, p: int) -> BadPrimeCrossCheck:
    """Compare the character-sum trace at a bad prime with the closed table."""

    case, table_trace = lemma_bad_prime_trace(family, curve, p)
    sum_trace = trace_of_frobenius(family, curve.a, curve.b, p)
    agrees = sum_trace == table_trace
    if not agrees:
        logger.info("%s (%d, %d) p=%d case %s: sum gives %d, table gives %d",
                    family.id, curve.a, curve.b, p, case, sum_trace, table_trace)
    return BadPrimeCrossCheck(
        p=p,
        case=case,
        character_sum_trace=sum_trace,
        table_trace=table_trace,
        agrees=agrees,
    )
