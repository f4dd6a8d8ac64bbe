from .direct import pinv_solve_gram, solve_ls_direct
from .fista import fista_l1, soft_threshold
from .history import SolveHistory
from .igmrf import DifferenceOperators, edge_preserving_reconstruct, exp_schedule, igmrf_weights
from .krylov import CGInfo, cg_spd, lsqr

__all__ = [
    "CGInfo",
    "DifferenceOperators",
    "SolveHistory",
    "cg_spd",
    "edge_preserving_reconstruct",
    "exp_schedule",
    "fista_l1",
    "igmrf_weights",
    "lsqr",
    "pinv_solve_gram",
    "soft_threshold",
    "solve_ls_direct",
]
