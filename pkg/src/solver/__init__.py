"""IRLS / ADMM solver for the two-component recovery problem."""
from .config import SolverConfig, SolverMode
from .sampling import SamplingOp
from .admm import (
    AdmmState,
    init_state,
    update_y,
    update_rho,
    update_rho_joint,
    update_multiplier,
    admm_solve,
    surrogate_value,
)
from .irls import (
    IterationRecord,
    IrlsDiagnostics,
    RecoveryResult,
    irls_recover,
    objective_value,
)

__all__ = [
    "SolverConfig",
    "SolverMode",
    "SamplingOp",
    "AdmmState",
    "init_state",
    "update_y",
    "update_rho",
    "update_rho_joint",
    "update_multiplier",
    "admm_solve",
    "surrogate_value",
    "IterationRecord",
    "IrlsDiagnostics",
    "RecoveryResult",
    "irls_recover",
    "objective_value",
]
