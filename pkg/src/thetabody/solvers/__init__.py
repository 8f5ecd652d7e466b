"""Small dense LP, SDP and nonnegative QP solvers."""
from .common import Status, SolverError
from .lp import LinearProgram, LpReport, solve_lp
from .sdp import SdpProblem, SdpReport, solve_sdp, pair_matrix
from .qp import QpReport, solve_qp_nonneg, qp_kkt_residual

__all__ = [
    "Status", "SolverError",
    "LinearProgram", "LpReport", "solve_lp",
    "SdpProblem", "SdpReport", "solve_sdp", "pair_matrix",
    "QpReport", "solve_qp_nonneg", "qp_kkt_residual",
]
