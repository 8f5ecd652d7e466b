from __future__ import annotations

import enum


class Status(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"
    MAX_ITER = "MAX_ITER"


class SolverError(RuntimeError):
    """Raised by callers that need an OPTIMAL report and did not get one."""

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report
