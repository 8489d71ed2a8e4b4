"""Strict schema definitions for elliptic-density runtime configuration."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

FamilyName = Literal["f1", "f2"]
TestFunctionKind = Literal["fejer", "cosine_sq"]
WeightKind = Literal["bump", "box"]


class StrictBaseModel(BaseModel):
    """Base model with strict validation and no unknown keys."""

    model_config = ConfigDict(extra="forbid", strict=True, frozen=True)


class MetaConfig(StrictBaseModel):
    project_id: str
    config_version: str
    generated_on: str


class TruncationParams(StrictBaseModel):
    """Cutoffs for every truncated prime sum, series and quadrature."""

    P: int = Field(ge=100)
    P_Q: int = Field(ge=3)
    L_max: int = Field(ge=2)
    T: int = Field(ge=10_000)
    quad_tol: float = Field(gt=0, lt=1e-3)


class WeightConfig(StrictBaseModel):
    kind: WeightKind
    x_lo: float = Field(gt=0)
    x_hi: float = Field(gt=0)
    y_lo: float = Field(gt=0)
    y_hi: float = Field(gt=0)

    @model_validator(mode="after")
    def validate_box(self) -> "WeightConfig":
        if self.x_hi <= self.x_lo or self.y_hi <= self.y_lo:
            raise ValueError("weight support must satisfy x_lo < x_hi and y_lo < y_hi")
        return self


class GridConfig(StrictBaseModel):
    X: list[float]
    monotone_tolerance: float = Field(ge=0, le=1)
    noise_floor: float = Field(ge=0)
    divisibility_primes: list[int] = Field(default_factory=lambda: [3, 5, 7])

    @model_validator(mode="after")
    def validate_grid(self) -> "GridConfig":
        if len(self.X) < 2:
            raise ValueError("grid.X must contain at least two points")
        if any(value < 100 for value in self.X):
            raise ValueError("grid.X values must be at least 100")
        if any(left >= right for left, right in zip(self.X, self.X[1:])):
            raise ValueError("grid.X must be strictly ascending")
        if any(p < 3 or p % 2 == 0 for p in self.divisibility_primes):
            raise ValueError("grid.divisibility_primes must be odd primes")
        return self


class CapsConfig(StrictBaseModel):
    charsum_prime_cap: int = Field(ge=3)
    max_moment_order: int = Field(ge=1, le=64)
    bias_max_n: int = Field(ge=3)
    direct_sample_size: int = Field(gt=0)


class ThetaConfig(StrictBaseModel):
    tail_constant: float = Field(ge=0)
    segment_size: int = Field(ge=1024)


class DensityConfig(StrictBaseModel):
    default_kind: TestFunctionKind
    default_rho: float = Field(gt=0, lt=1)
    gamma_quad_tol: float = Field(gt=0, lt=1e-3)
    tail_cutoff_periods: float = Field(gt=0)


class RuntimeConfig(StrictBaseModel):
    meta: MetaConfig
    truncation: TruncationParams
    weight: WeightConfig
    grid: GridConfig
    caps: CapsConfig
    theta: ThetaConfig
    density: DensityConfig

    @model_validator(mode="after")
    def validate_references(self) -> "RuntimeConfig":
        if self.truncation.P_Q > self.caps.charsum_prime_cap:
            raise ValueError(
                f"truncation.P_Q={self.truncation.P_Q} exceeds "
                f"caps.charsum_prime_cap={self.caps.charsum_prime_cap}"
            )
        return self


def validate_config_dict(config: dict) -> RuntimeConfig:
    """Convenience helper that raises a detailed validation error on failure."""

    try:
        return RuntimeConfig.model_validate(config)
    except ValidationError as exc:
        raise exc
