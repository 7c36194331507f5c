"""
ADMM inner loop for the circulant-form weighted least-squares problem.

For component i (1: gradient weighting M1, 2: Hessian weighting M2):

    min  sum_i lambda_i ||S_i^(1/2) y_i||^2 + ||A(rho1 + rho2) - b||^2
    s.t. y_i = F* M_i rho_i

Each sweep updates y1, y2, rho1, rho2, q1, q2 in that order; every
update is a pointwise closed form. y and q live in image space with one
channel per derivative; rho lives in k-space.
"""

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
import structlog

from ..errors import DimensionError
from ..grid import ComplexImage, DerivativeOp, DerivativeOrder, Domain, KGrid, fft2c, ifft2c
from ..weights import SosMask
from .config import SolverConfig
from .sampling import SamplingOp

logger = structlog.get_logger()


@lru_cache(maxsize=16)
def derivative_ops(grid: KGrid) -> Dict[int, DerivativeOp]:
    """M1 and M2 for a grid, keyed by component."""
    return {
        1: DerivativeOp(grid, DerivativeOrder.FIRST),
        2: DerivativeOp(grid, DerivativeOrder.SECOND),
    }


@dataclass
class AdmmState:
    """Primal iterates, splitting variables and scaled multipliers."""
    rho1_hat: ComplexImage
    rho2_hat: ComplexImage
    y1: np.ndarray  # (2, n_rows, n_cols), image space
    y2: np.ndarray  # (3, n_rows, n_cols), image space
    q1: np.ndarray
    q2: np.ndarray
    gamma1: float = 1.0
    gamma2: float = 1.0
    dc_held: bool = False
    lagrangian_history: List[float] = field(default_factory=list)
    residual_history: List[float] = field(default_factory=list)

    def __post_init__(self):
        grid = self.rho1_hat.grid
        self.rho1_hat.require(grid, Domain.FOURIER)
        self.rho2_hat.require(grid, Domain.FOURIER)
        for name, channels in (("y1", 2), ("q1", 2), ("y2", 3), ("q2", 3)):
            array = getattr(self, name)
            if array.shape != (channels,) + grid.shape:
                raise DimensionError(
                    f"{name} must have shape {(channels,) + grid.shape}, got {array.shape}"
                )

    @property
    def grid(self) -> KGrid:
        return self.rho1_hat.grid

    def spectrum(self, component: int) -> ComplexImage:
        return self.rho1_hat if component == 1 else self.rho2_hat

    def split(self, component: int) -> Tuple[np.ndarray, np.ndarray]:
        """(y_i, q_i)."""
        return (self.y1, self.q1) if component == 1 else (self.y2, self.q2)

    def gamma(self, component: int) -> float:
        return self.gamma1 if component == 1 else self.gamma2

    def is_finite(self) -> bool:
        arrays = (self.rho1_hat.values, self.rho2_hat.values, self.y1, self.y2, self.q1, self.q2)
        return all(np.all(np.isfinite(array)) for array in arrays)

    def with_gammas(self, gamma1: float, gamma2: float) -> "AdmmState":
        """
        Change the ADMM penalties while keeping the unscaled multipliers.

        The multiplier of constraint i is 2 * gamma_i * lambda_i * q_i, so
        q_i is rescaled by gamma_old / gamma_new.
        """
        return replace(
            self,
            q1=self.q1 * (self.gamma1 / gamma1),
            q2=self.q2 * (self.gamma2 / gamma2),
            gamma1=float(gamma1),
            gamma2=float(gamma2),
            lagrangian_history=list(self.lagrangian_history),
            residual_history=list(self.residual_history),
        )


def _image_derivative(component: int, spectrum: np.ndarray, grid: KGrid) -> np.ndarray:
    """F* M_i rho_i, one image per channel."""
    return ifft2c(derivative_ops(grid)[component].weight(spectrum))


def init_state(samp: SamplingOp, cfg: SolverConfig) -> AdmmState:
    """
    Starting point: the zero-filled data goes into the first active
    component, y_i = F* M_i rho_i and q_i = 0.
    """
    grid = samp.grid
    zero_filled = samp.zero_filled()
    zeros = np.zeros(grid.shape, dtype=np.complex128)
    first = cfg.active_components[0]
    rho1 = zero_filled if first == 1 else zeros
    rho2 = zero_filled if first == 2 else zeros.copy()
    return AdmmState(
        rho1_hat=ComplexImage(grid, rho1, Domain.FOURIER),
        rho2_hat=ComplexImage(grid, rho2, Domain.FOURIER),
        y1=_image_derivative(1, rho1, grid),
        y2=_image_derivative(2, rho2, grid),
        q1=np.zeros((2,) + grid.shape, dtype=np.complex128),
        q2=np.zeros((3,) + grid.shape, dtype=np.complex128),
        gamma1=cfg.gamma1,
        gamma2=cfg.gamma2,
    )


def update_y(y_idx: int, state: AdmmState, sos: SosMask, cfg: SolverConfig) -> np.ndarray:
    """
    Closed-form y_i update: gamma / (S + gamma) * (q_i + F* M_i rho_i).

    Args:
        y_idx: Component (1 or 2)
        state: Current iterates
        sos: Sum-of-squares mask S_i on the state grid
        cfg: Solver configuration

    Returns:
        New y_i of shape (channels, n_rows, n_cols)
    """
    if sos.grid != state.grid:
        raise DimensionError(f"mask grid {sos.grid.shape} does not match state grid {state.grid.shape}")
    gamma = state.gamma(y_idx)
    _, q = state.split(y_idx)
    target = q + _image_derivative(y_idx, state.spectrum(y_idx).values, state.grid)
    return (gamma / (sos.entries + gamma)) * target


def update_rho(rho_idx: int, state: AdmmState, samp: SamplingOp, cfg: SolverConfig) -> ComplexImage:
    """
    Closed-form rho_i update, pointwise in k:

        rho_i = [g l M_i* F (y_i - q_i) + A*b - A*A rho_other] / [mask + g l m_i]

    with g l = gamma_i * lambda_i and m_i the diagonal of M_i* M_i. Where
    the denominator is singular (unsampled DC) the previous value is kept.
    """
    grid = state.grid
    if samp.grid != grid:
        raise DimensionError(f"sampling grid {samp.grid.shape} does not match state grid {grid.shape}")
    op = derivative_ops(grid)[rho_idx]
    weight = state.gamma(rho_idx) * cfg.lam(rho_idx)
    y, q = state.split(rho_idx)
    other = state.spectrum(2 if rho_idx == 1 else 1).values

    numerator = weight * op.weight_adjoint(fft2c(y - q)) + samp.zero_filled() - samp.normal(other)
    denominator = samp.mask.astype(np.float64) + weight * op.normal_diagonal
    singular = denominator <= cfg.dc_tolerance
    values = np.where(
        singular,
        state.spectrum(rho_idx).values,
        numerator / np.where(singular, 1.0, denominator),
    )
    return ComplexImage(grid, values, Domain.FOURIER)


def update_rho_joint(state: AdmmState, samp: SamplingOp, cfg: SolverConfig) -> ComplexImage:
    """
    rho1 from the coupled pointwise system in (rho1, rho2):

        (a + g1 m1) rho1 + a rho2          = g1 r1 + A*b
        a rho1          + (a + g2 m2) rho2 = g2 r2 + A*b

    with a the mask, g_i = gamma_i * lambda_i and r_i = M_i* F (y_i - q_i).
    update_rho(2) given this rho1 returns the rho2 of the same solution.
    Where the determinant is singular (DC) the per-component rho1 update
    is used instead.
    """
    grid = state.grid
    if samp.grid != grid:
        raise DimensionError(f"sampling grid {samp.grid.shape} does not match state grid {grid.shape}")
    ops = derivative_ops(grid)
    g1 = state.gamma1 * cfg.lambda1
    g2 = state.gamma2 * cfg.lambda2
    gm1 = g1 * ops[1].normal_diagonal
    gm2 = g2 * ops[2].normal_diagonal
    gr1 = g1 * ops[1].weight_adjoint(fft2c(state.y1 - state.q1))
    gr2 = g2 * ops[2].weight_adjoint(fft2c(state.y2 - state.q2))
    a = samp.mask.astype(np.float64)
    data = samp.zero_filled()

    determinant = a * (gm1 + gm2) + gm1 * gm2
    singular = determinant <= cfg.dc_tolerance
    numerator = gr1 * (a + gm2) + gm2 * data - a * gr2
    joint = numerator / np.where(singular, 1.0, determinant)
    values = np.where(singular, update_rho(1, state, samp, cfg).values, joint)
    return ComplexImage(grid, values, Domain.FOURIER)


def update_multiplier(component: int, state: AdmmState) -> np.ndarray:
    """q_i + F* M_i rho_i - y_i."""
    y, q = state.split(component)
    return q + _image_derivative(component, state.spectrum(component).values, state.grid) - y


def _penalty(component: int, state: AdmmState, sos: Optional[SosMask]) -> float:
    if sos is None:
        return 0.0
    y, _ = state.split(component)
    return float(np.sum(sos.entries * np.abs(y) ** 2))


def _lagrangian(state: AdmmState, masks: Dict[int, Optional[SosMask]], samp: SamplingOp,
                cfg: SolverConfig, active: Tuple[int, ...]) -> Tuple[float, float]:
    """Augmented Lagrangian at (y, rho, q) and the constraint residual norm."""
    value = samp.data_misfit(state.rho1_hat.values + state.rho2_hat.values)
    residual_sq = 0.0
    for i in active:
        y, q = state.split(i)
        gap = _image_derivative(i, state.spectrum(i).values, state.grid) - y
        weight = state.gamma(i) * cfg.lam(i)
        value += cfg.lam(i) * _penalty(i, state, masks[i])
        value += weight * float(np.sum(np.abs(q + gap) ** 2) - np.sum(np.abs(q) ** 2))
        residual_sq += float(np.sum(np.abs(gap) ** 2))
    return value, float(np.sqrt(residual_sq))


def admm_solve(
    state: AdmmState,
    sos1: Optional[SosMask],
    sos2: Optional[SosMask],
    samp: SamplingOp,
    cfg: SolverConfig,
) -> AdmmState:
    """
    Run cfg.admm_iters_per_irls sweeps of (y1, y2, rho1, rho2, q1, q2).

    Pinned components (see SolverConfig.mode) are skipped and may pass
    None for their mask. With both active and cfg.joint_rho, the rho1 step
    is update_rho_joint.

    Returns:
        New AdmmState; the input state is not modified
    """
    active = cfg.active_components
    joint = cfg.joint_rho and active == (1, 2)
    masks = {1: sos1, 2: sos2}
    for i in active:
        if masks[i] is None:
            raise DimensionError(f"component {i} is active but has no sum-of-squares mask")

    state = replace(
        state,
        lagrangian_history=list(state.lagrangian_history),
        residual_history=list(state.residual_history),
    )
    if not samp.dc_sampled and not state.dc_held:
        logger.warning("DC is not sampled; holding the DC coefficient at its initial value")
        state.dc_held = True

    for _ in range(cfg.admm_iters_per_irls):
        for i in active:
            y_new = update_y(i, state, masks[i], cfg)
            state = replace(state, **{f"y{i}": y_new})
        for i in active:
            if i == 1 and joint:
                rho_new = update_rho_joint(state, samp, cfg)
            else:
                rho_new = update_rho(i, state, samp, cfg)
            state = replace(state, **{f"rho{i}_hat": rho_new})

        lagrangian, residual = _lagrangian(state, masks, samp, cfg, active)
        for i in active:
            state = replace(state, **{f"q{i}": update_multiplier(i, state)})

        state.lagrangian_history.append(lagrangian)
        state.residual_history.append(residual)

    return state


def surrogate_value(
    rho1_hat: ComplexImage,
    rho2_hat: ComplexImage,
    sos1: Optional[SosMask],
    sos2: Optional[SosMask],
    samp: SamplingOp,
    cfg: SolverConfig,
) -> float:
    """
    Weighted least-squares cost minimized by the ADMM loop:

        lambda1 ||S1^(1/2) F* M1 rho1||^2 + lambda2 ||S2^(1/2) F* M2 rho2||^2
        + ||A(rho1 + rho2) - b||^2

    A component whose mask is None contributes no penalty.
    """
    grid = samp.grid
    value = samp.data_misfit(rho1_hat.values + rho2_hat.values)
    for i, spectrum, sos in ((1, rho1_hat, sos1), (2, rho2_hat, sos2)):
        if sos is None:
            continue
        image = _image_derivative(i, spectrum.values, grid)
        value += cfg.lam(i) * float(np.sum(sos.entries * np.abs(image) ** 2))
    return value
