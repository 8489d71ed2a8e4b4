"""Exception hierarchy shared by the library and the command-line front end."""

from __future__ import annotations


class EllipticDensityError(Exception):
    """Root of every error raised deliberately by this package."""


class DomainError(EllipticDensityError, ValueError):
    """An operation was called outside its documented domain."""


class AdmissibilityError(DomainError):
    """Family parameters or a curve violate a coprimality or congruence invariant."""

    def __init__(self, message: str, prime: int | None = None):
        super().__init__(message)
        self.prime = prime


class UnsupportedError(DomainError):
    """The requested combination is well defined but deliberately not implemented."""


class ResourceCapError(EllipticDensityError, RuntimeError):
    """A configured size cap would be exceeded."""


class NumericError(EllipticDensityError, ArithmeticError):
    """Quadrature failed to converge or an exact value is not representable."""
