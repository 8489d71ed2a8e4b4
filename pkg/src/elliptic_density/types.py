"""Typed data contracts shared across the elliptic-density modules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Literal

import numpy as np

from .errors import NumericError

if TYPE_CHECKING:
    from .config_schema import TruncationParams
    from .families import WeightFunction

FamilyLabel = Literal["F1", "F2"]
ReductionType = Literal["good", "multiplicative"]
BiasSign = Literal["+", "-"]


@dataclass(frozen=True)
class PrimeSieve:
    """All primes up to ``limit`` in a read-only ascending array."""

    limit: int
    primes: np.ndarray

    def __len__(self) -> int:
        return int(self.primes.size)

    def __contains__(self, value: object) -> bool:
        if not isinstance(value, (int, np.integer)):
            return False
        idx = int(np.searchsorted(self.primes, value))
        return idx < self.primes.size and int(self.primes[idx]) == int(value)

    def tolist(self) -> list[int]:
        return [int(p) for p in self.primes]


@dataclass(frozen=True)
class ThetaIntegralResult:
    """Chebyshev theta and the integral of R(t)/t^2 on [1, T]."""

    T: int
    theta_T: float
    r_integral: float
    tail_estimate: float
    log_p_over_p: float


@dataclass(frozen=True)
class FamilyId:
    """One of the two curve families with its fixed arithmetic data."""

    id: FamilyLabel
    delta: int
    two_exponent: int
    support_bound: float
    conductor_two_power: int
    size_denominator: int

    @property
    def name(self) -> str:
        return self.id.lower()

    @property
    def residue_modulus(self) -> int:
        """Power of two fixing the parity class of a and b."""

        return 2**self.two_exponent


@dataclass(frozen=True)
class FamilyParams:
    """Congruence data (q, a0, b0) with residues r, t modulo 2^i q."""

    family: FamilyId
    q: int
    a0: int
    b0: int
    r: int
    t: int

    @property
    def modulus(self) -> int:
        return self.family.residue_modulus * self.q


@dataclass(frozen=True)
class Curve:
    """Weierstrass member E_{a,b} of a family."""

    a: int
    b: int


@dataclass(frozen=True)
class ScaledFamily:
    """Family parameters at scale X with box scalings A, B and weight w."""

    params: FamilyParams
    X: float
    A: float
    B: float
    weight: "WeightFunction"

    @property
    def family(self) -> FamilyId:
        return self.params.family

    @property
    def log_X(self) -> float:
        return math.log(self.X)


@dataclass(frozen=True)
class BadPrimeCrossCheck:
    """Character-sum trace at a bad prime against the closed bad-prime table."""

    p: int
    case: str
    character_sum_trace: int
    table_trace: int
    agrees: bool


@dataclass(frozen=True)
class ExactMoment:
    """Exact value numerator / p^(half_power/2) of a complete character sum."""

    numerator: int
    half_power: int
    p: int
    v: int

    @property
    def is_rational(self) -> bool:
        return self.half_power % 2 == 0 or self.numerator == 0

    def as_fraction(self) -> Fraction:
        if self.half_power % 2 == 0:
            return Fraction(self.numerator, self.p ** (self.half_power // 2))
        if self.numerator == 0:
            return Fraction(0)
        raise NumericError(
            f"Q(p^{self.v}) for p={self.p} has odd half power and nonzero numerator {self.numerator}"
        )

    def __float__(self) -> float:
        return self.numerator / self.p ** (self.half_power / 2)

    def __str__(self) -> str:
        if self.is_rational:
            value = self.as_fraction()
            return f"{value.numerator}/{value.denominator}"
        return f"{self.numerator}/{self.p}^({self.half_power}/2)"


@dataclass(frozen=True)
class ConstantsReport:
    """All lower-order constants for one family and congruence class."""

    family: FamilyLabel
    q: int
    a0: int
    b0: int
    c: dict[int, float]
    d: dict[int, float]
    e: float
    tails: dict[str, float]
    provenance: "TruncationParams"
    flags: tuple[str, ...] = ()
    diagnostics: dict[str, float] = field(default_factory=dict)

    @property
    def c_sum(self) -> float:
        return math.fsum(self.c[idx] for idx in sorted(self.c))

    @property
    def d_sum(self) -> float:
        return math.fsum(self.d[idx] for idx in sorted(self.d))

    @property
    def lower_order_sum(self) -> float:
        """e + sum of d + sum of c, the coefficient of phi_hat(0)/log X."""

        return math.fsum([self.e, self.d_sum, self.c_sum])


@dataclass(frozen=True)
class DensityValue:
    """Explicit-formula value of the zero sum for one curve, split by term."""

    total: float
    term_conductor: float
    term_gamma: float
    term_bad: float
    term_pnt: float
    term_good: float


@dataclass(frozen=True)
class DensityReport:
    """Empirical family density against the predicted lower-order expansion."""

    family: FamilyLabel
    q: int
    a0: int
    b0: int
    X: float
    A: float
    B: float
    test_kind: str
    rho: float
    phi0: float
    phihat0: float
    curve_count: int
    W_X: float
    empirical: float
    predicted: float
    residual: float
    residual_scaled: float
    lower_order_coefficient: float
    method: str

    def to_dict(self) -> dict[str, object]:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}

    @classmethod
    def from_dict(cls, payload: dict[str, object]) -> "DensityReport":
        return cls(**payload)  # type: ignore[arg-type]


@dataclass(frozen=True)
class BiasChoice:
    """Residue pair chosen at one prime of a biased family."""

    p: int
    a_p: int
    b_p: int
    trace: int
    lam: float


@dataclass(frozen=True)
class BiasSpec:
    """Biased congruence family built from extremal residues at small primes."""

    family: FamilyLabel
    n: int
    sign: BiasSign
    q_n: int
    a0n: int
    b0n: int
    per_prime: tuple[BiasChoice, ...]
    e_value: float
    log_q: float
    growth_ratio: float
    e_small_lambda: float


@dataclass(frozen=True)
class ConvergenceRow:
    """Observed against predicted value of an averaged statistic at one X."""

    label: str
    X: float
    observed: float
    predicted: float
    ratio: float
    residual_scaled: float
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class FamilyAverage:
    """Weighted family average of the explicit-formula totals."""

    empirical: float
    W_X: float
    curve_count: int
    method: str
