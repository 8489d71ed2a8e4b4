"""Even test functions phi with compactly supported Fourier transform phi_hat."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericError, UnsupportedError

TestKind = Literal["fejer", "cosine_sq"]
MAX_SUPPORT = 2 / 3


@dataclass(frozen=True)
class TailPart:
    """phi(x) = sum of envelope(x) * trig(omega x) for x beyond the tail cutoff."""

    envelope: Callable[[float], float]
    weight: Literal["cos", "sin"] | None
    omega: float


@dataclass(frozen=True)
class TestFunctionPair:
    """Closed-form Fourier pair (phi, phi_hat) with phi_hat supported in [-rho, rho]."""

    kind: TestKind
    rho: float

    @property
    def phi0(self) -> float:
        return self.rho

    @property
    def phihat0(self) -> float:
        return 1.0

    def phi(self, x):
        x = np.asarray(x, dtype=np.float64)
        rho = self.rho
        if self.kind == "fejer":
            return rho * np.sinc(rho * x) ** 2
        u = 2.0 * rho * x
        near_pole = np.abs(np.abs(u) - 1.0) < 1e-9
        denominator = np.where(near_pole, 1.0, 1.0 - u * u)
        return np.where(near_pole, rho / 2.0, rho * np.sinc(u) / denominator)

    def phi_hat(self, t):
        t = np.abs(np.asarray(t, dtype=np.float64))
        if self.kind == "fejer":
            return np.maximum(0.0, 1.0 - t / self.rho)
        return np.where(t < self.rho, np.cos(np.pi * t / (2.0 * self.rho)) ** 2, 0.0)

    def phi_hat_derivative(self, order: int) -> float:
        """Derivative of phi_hat at 0; odd orders vanish by evenness."""

        if order == 0:
            return 1.0
        if self.kind == "fejer":
            raise UnsupportedError("the Fejer transform is not differentiable at 0")
        if order % 2:
            return 0.0
        # cos^2(pi t / 2 rho) = (1 + cos(pi t / rho)) / 2
        half = order // 2
        return (-1) ** half * (math.pi / self.rho) ** order / 2.0

    def tail_parts(self) -> tuple[TailPart, ...]:
        rho = self.rho
        omega = 2.0 * math.pi * rho
        if self.kind == "fejer":
            scale = 1.0 / (2.0 * math.pi**2 * rho)
            return (
                TailPart(envelope=lambda x: scale / (x * x), weight=None, omega=0.0),
                TailPart(envelope=lambda x: -scale / (x * x), weight="cos", omega=omega),
            )
        return (
            TailPart(
                envelope=lambda x: 1.0 / (2.0 * math.pi * x * (1.0 - 4.0 * rho * rho * x * x)),
                weight="sin",
                omega=omega,
            ),
        )


def make_test_function(kind: str, rho: float, support_bound: float = MAX_SUPPORT) -> TestFunctionPair:
    """Fejer or cosine-squared pair with support parameter 0 < rho < support_bound."""

    if kind not in ("fejer", "cosine_sq"):
        raise DomainError(f"unknown test function kind '{kind}', expected fejer or cosine_sq")
    if not 0.0 < rho < support_bound:
        raise DomainError(f"test function support rho={rho} must lie in (0, {support_bound:.6g})")
    return TestFunctionPair(kind=kind, rho=float(rho))  # type: ignore[arg-type]


def integrate_against_phi(
    test: TestFunctionPair,
    h: Callable[[float], float],
    tol: float = 1e-11,
    cutoff_periods: float = 10.0,
) -> float:
    """Integral over the real line of phi(x) h(x) for even h.

    [0, L] is handled by adaptive quadrature and [L, inf) by the Fourier
    integral routine applied to each envelope-times-trig piece of phi.
    """

    cutoff = cutoff_periods / test.rho
    head, head_error = integrate.quad(
        lambda x: float(test.phi(x)) * h(x), 0.0, cutoff, epsabs=tol, epsrel=tol, limit=1000
    )
    pieces = [head]
    errors = [head_error]
    for part in test.tail_parts():
        integrand = lambda x, part=part: part.envelope(x) * h(x)  # noqa: E731
        if part.weight is None:
            value, error = integrate.quad(integrand, cutoff, np.inf, epsabs=tol, epsrel=tol, limit=1000)
        else:
            value, error = integrate.quad(
                integrand, cutoff, np.inf, weight=part.weight, wvar=part.omega, epsabs=tol, limlst=200
            )
        pieces.append(value)
        errors.append(error)
    total_error = math.fsum(errors)
    if total_error > max(1e3 * tol, 1e-6):
        raise NumericError(f"phi quadrature error {total_error:.3g} exceeds tolerance {tol:.3g}")
    return 2.0 * math.fsum(pieces)


def phi_integral(test: TestFunctionPair, tol: float = 1e-11) -> float:
    """Integral of phi over the real line, equal to phi_hat(0)."""

    return integrate_against_phi(test, lambda x: 1.0, tol)
