"""Solver parameters."""

from enum import Enum
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..lifting import FilterSupport


class SolverMode(str, Enum):
    """Which components are recovered; the others stay pinned at zero."""
    COMBINED = "combined"
    FIRST_ORDER = "first_order"
    SECOND_ORDER = "second_order"


class SolverConfig(BaseModel):
    """Regularization, ADMM, IRLS and epsilon-schedule parameters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: SolverMode = SolverMode.COMBINED

    # Regularization
    lambda1: float = Field(default=1e-3, gt=0.0)
    lambda2: float = Field(default=1e-3, gt=0.0)
    p: float = Field(default=1.0, gt=0.0, le=1.0)

    # ADMM penalties
    gamma1: float = Field(default=1.0, gt=0.0)
    gamma2: float = Field(default=1.0, gt=0.0)
    gamma_relative: bool = True

    # Filter supports (rows, cols)
    filter_size1: Tuple[int, int] = (15, 15)
    filter_size2: Tuple[int, int] = (15, 15)

    # Iteration counts
    irls_iters: int = Field(default=10, ge=1)
    admm_iters_per_irls: int = Field(default=20, ge=1)

    # Epsilon schedule
    epsilon0: float = Field(default=1e-2, gt=0.0)
    epsilon_decay: float = Field(default=0.5, gt=0.0, le=1.0)
    epsilon_min: float = Field(default=1e-9, ge=0.0)
    epsilon_relative: bool = True

    # Denominators at or below this are singular in the rho update
    dc_tolerance: float = Field(default=0.0, ge=0.0)

    # With both components active, rho1 solves the coupled 2x2 system per k
    # so the rho2 update that follows lands on the joint minimizer.
    # False updates each component with the other held fixed.
    joint_rho: bool = True

    @field_validator("filter_size1", "filter_size2")
    @classmethod
    def _odd_sizes(cls, value: Tuple[int, int]) -> Tuple[int, int]:
        if any(size < 1 or size % 2 == 0 for size in value):
            raise ValueError(f"filter sizes must be odd and positive, got {value}")
        return value

    @property
    def filter_supp1(self) -> FilterSupport:
        return FilterSupport(*self.filter_size1)

    @property
    def filter_supp2(self) -> FilterSupport:
        return FilterSupport(*self.filter_size2)

    def support(self, component: int) -> FilterSupport:
        return self.filter_supp1 if component == 1 else self.filter_supp2

    def lam(self, component: int) -> float:
        return self.lambda1 if component == 1 else self.lambda2

    def gamma(self, component: int) -> float:
        return self.gamma1 if component == 1 else self.gamma2

    @property
    def active_components(self) -> Tuple[int, ...]:
        """Components updated by the solver; the rest are pinned at zero."""
        if self.mode is SolverMode.FIRST_ORDER:
            return (1,)
        if self.mode is SolverMode.SECOND_ORDER:
            return (2,)
        return (1, 2)

    def epsilon_at(self, iteration: int, base: float) -> float:
        """eps_n = max(base * decay^n, eps_min)."""
        return max(base * self.epsilon_decay ** iteration, self.epsilon_min)
