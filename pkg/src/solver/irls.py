"""
Outer IRLS loop.

Each iteration freezes the weights H_i = (T_i^H T_i + eps_n I)^(p/2 - 1)
computed from the current iterates, turns them into sum-of-squares masks
and runs a warm-started ADMM solve of the weighted least-squares problem.
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from ..errors import NumericalError
from ..grid import ComplexImage, Domain, ifft2c
from ..lifting import build_lifted, gram_matrix
from ..weights import FilterBank, SosMask, sos_mask, weight_sqrt
from .admm import AdmmState, admm_solve, derivative_ops, init_state, surrogate_value
from .config import SolverConfig
from .sampling import SamplingOp

logger = structlog.get_logger()


@dataclass
class IterationRecord:
    """Diagnostics of one IRLS iteration."""
    iteration: int
    epsilon: float
    gamma1: float
    gamma2: float
    objective: float  # explicit lifting, frozen weights, new iterate
    surrogate_before: float  # circulant form, frozen weights, previous iterate
    surrogate_after: float  # circulant form, frozen weights, new iterate
    constraint_residual: float
    lagrangian: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class IrlsDiagnostics:
    """Per-iteration history of a recovery run."""
    epsilon_base: float = 0.0
    dc_held: bool = False
    records: List[IterationRecord] = field(default_factory=list)

    @property
    def objectives(self) -> List[float]:
        return [record.objective for record in self.records]

    def to_dict(self) -> dict:
        return {
            "epsilon_base": self.epsilon_base,
            "dc_held": self.dc_held,
            "iterations": [record.to_dict() for record in self.records],
        }


@dataclass
class RecoveryResult:
    """Recovered components in image space plus diagnostics."""
    rho1: ComplexImage
    rho2: ComplexImage
    diagnostics: IrlsDiagnostics
    state: AdmmState

    @property
    def rho(self) -> ComplexImage:
        return self.rho1.replace(self.rho1.values + self.rho2.values)

    def __iter__(self) -> Iterator:
        # Unpacks as (rho1, rho2, diagnostics).
        return iter((self.rho1, self.rho2, self.diagnostics))


def _lifted_penalty(spectrum: ComplexImage, component: int, bank: FilterBank) -> float:
    """||T_i(rho_i) H_i^(1/2)^H||_F^2."""
    op = derivative_ops(spectrum.grid)[component]
    lifted = build_lifted(spectrum, op, bank.supp)
    return float(np.linalg.norm(lifted.matrix @ bank.sqrt_matrix().conj().T) ** 2)


def _banks_from_iterates(
    spectra: Dict[int, ComplexImage],
    cfg: SolverConfig,
    eps: Dict[int, float],
) -> Dict[int, FilterBank]:
    banks = {}
    for i, spectrum in spectra.items():
        supp = cfg.support(i)
        gram = gram_matrix(spectrum, derivative_ops(spectrum.grid)[i], supp)
        banks[i] = weight_sqrt(gram, eps[i], cfg.p, supp)
    return banks


def objective_value(
    rho1_hat: ComplexImage,
    rho2_hat: ComplexImage,
    samp: SamplingOp,
    cfg: SolverConfig,
    eps: Union[float, Tuple[float, float]],
    banks: Optional[Sequence[Optional[FilterBank]]] = None,
) -> float:
    """
    Reweighted objective evaluated through the explicit lifted matrices:

        lambda1 ||T1 H1^(1/2)||_F^2 + lambda2 ||T2 H2^(1/2)||_F^2 + ||A(rho1 + rho2) - b||^2

    Args:
        rho1_hat, rho2_hat: Component spectra
        samp: Sampling operator with the measurements
        cfg: Solver configuration
        eps: Epsilon for both components, or one per component
        banks: Frozen filter banks (bank1, bank2); computed from the
            iterates at `eps` when omitted

    Returns:
        Objective value
    """
    eps_pair = (eps, eps) if np.isscalar(eps) else tuple(eps)
    spectra = {1: rho1_hat, 2: rho2_hat}
    active = cfg.active_components
    if banks is None:
        banks_by_component = _banks_from_iterates(
            {i: spectra[i] for i in active}, cfg, {1: eps_pair[0], 2: eps_pair[1]}
        )
    else:
        banks_by_component = {1: banks[0], 2: banks[1]}

    value = samp.data_misfit(rho1_hat.values + rho2_hat.values)
    for i in active:
        bank = banks_by_component.get(i)
        if bank is not None:
            value += cfg.lam(i) * _lifted_penalty(spectra[i], i, bank)
    return value


def _base_epsilon(grams: Dict[int, np.ndarray], cfg: SolverConfig) -> float:
    if not cfg.epsilon_relative:
        return cfg.epsilon0
    scale = max((float(np.linalg.norm(gram, 2)) for gram in grams.values()), default=0.0)
    return cfg.epsilon0 * scale if scale > 0 else cfg.epsilon0


def _effective_gamma(component: int, sos: Optional[SosMask], cfg: SolverConfig, current: float) -> float:
    if sos is None:
        return current
    if not cfg.gamma_relative:
        return cfg.gamma(component)
    mean = sos.mean()
    return cfg.gamma(component) * mean if mean > 0 else cfg.gamma(component)


def irls_recover(
    samp: SamplingOp,
    cfg: SolverConfig,
    state: Optional[AdmmState] = None,
) -> RecoveryResult:
    """
    Recover the piecewise-constant and piecewise-linear components.

    Args:
        samp: Sampling operator with measurements
        cfg: Solver configuration
        state: Optional warm start; defaults to init_state(samp, cfg)

    Returns:
        RecoveryResult (unpacks as rho1, rho2, diagnostics)
    """
    grid = samp.grid
    for i in cfg.active_components:
        cfg.support(i).check_fits(grid)
    state = state or init_state(samp, cfg)
    diagnostics = IrlsDiagnostics(dc_held=not samp.dc_sampled)
    ops = derivative_ops(grid)
    active = cfg.active_components

    logger.info(
        "Starting IRLS recovery",
        mode=cfg.mode.value,
        grid=grid.shape,
        samples=samp.n_samples,
        irls_iters=cfg.irls_iters,
        admm_iters=cfg.admm_iters_per_irls,
    )

    base_eps = None
    for n in range(cfg.irls_iters):
        grams = {i: gram_matrix(state.spectrum(i), ops[i], cfg.support(i)) for i in active}
        if base_eps is None:
            base_eps = _base_epsilon(grams, cfg)
            diagnostics.epsilon_base = base_eps
        eps = cfg.epsilon_at(n, base_eps)

        banks: Dict[int, Optional[FilterBank]] = {1: None, 2: None}
        masks: Dict[int, Optional[SosMask]] = {1: None, 2: None}
        for i in active:
            banks[i] = weight_sqrt(grams[i], eps, cfg.p, cfg.support(i))
            masks[i] = sos_mask(banks[i], grid)

        state = state.with_gammas(
            _effective_gamma(1, masks[1], cfg, state.gamma1),
            _effective_gamma(2, masks[2], cfg, state.gamma2),
        )

        before = surrogate_value(state.rho1_hat, state.rho2_hat, masks[1], masks[2], samp, cfg)
        state = admm_solve(state, masks[1], masks[2], samp, cfg)
        if not state.is_finite():
            logger.error("Non-finite iterate", iteration=n)
            raise NumericalError(f"non-finite iterate at IRLS iteration {n}", iteration=n)
        after = surrogate_value(state.rho1_hat, state.rho2_hat, masks[1], masks[2], samp, cfg)
        objective = objective_value(
            state.rho1_hat, state.rho2_hat, samp, cfg, eps, banks=(banks[1], banks[2])
        )
        if not np.isfinite(objective):
            raise NumericalError(f"non-finite objective at IRLS iteration {n}", iteration=n)

        record = IterationRecord(
            iteration=n,
            epsilon=eps,
            gamma1=state.gamma1,
            gamma2=state.gamma2,
            objective=objective,
            surrogate_before=before,
            surrogate_after=after,
            constraint_residual=state.residual_history[-1],
            lagrangian=state.lagrangian_history[-1],
        )
        diagnostics.records.append(record)
        logger.info(
            "IRLS iteration",
            iteration=n,
            epsilon=eps,
            objective=objective,
            surrogate_before=before,
            surrogate_after=after,
            residual=record.constraint_residual,
        )

    diagnostics.dc_held = state.dc_held
    return RecoveryResult(
        rho1=ComplexImage(grid, ifft2c(state.rho1_hat.values), Domain.SPATIAL),
        rho2=ComplexImage(grid, ifft2c(state.rho2_hat.values), Domain.SPATIAL),
        diagnostics=diagnostics,
        state=state,
    )
