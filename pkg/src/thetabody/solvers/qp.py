"""max 2<w, x> - x^T Q x over x >= 0, for PSD Q."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .common import Status

__all__ = ["QpReport", "solve_qp_nonneg", "qp_kkt_residual"]


@dataclass
class QpReport:
    status: Status
    x: Optional[np.ndarray]
    value: float
    kkt_residual: float
    iterations: int

    def __iter__(self):
        # allows ``x, value = solve_qp_nonneg(...)``
        yield self.x
        yield self.value


def qp_kkt_residual(q, w, x) -> float:
    """Largest violation of x >= 0, Qx >= w and <x, Qx - w> = 0,
    relative to 1 + max|w|."""
    g = q @ x - w
    r = max(float(np.max(-x, initial=0.0)),
            float(np.max(-g, initial=0.0)),
            abs(float(x @ g)))
    return r / (1.0 + float(np.max(np.abs(w), initial=0.0)))


def _active_set_polish(q, w, x, tol, max_rounds=None):
    """Primal active-set refinement from the support of x (Lawson-Hanson style)."""
    n = x.size
    max_rounds = max_rounds or 3 * n + 10
    free = x > 1e-12 * max(1.0, np.max(x, initial=0.0))
    x = np.where(free, x, 0.0)
    for _ in range(max_rounds):
        idx = np.flatnonzero(free)
        z = np.zeros(n)
        if idx.size:
            z[idx] = np.linalg.lstsq(q[np.ix_(idx, idx)], w[idx], rcond=None)[0]
        if np.all(z[idx] >= -1e-14):
            x = np.maximum(z, 0.0)
            g = q @ x - w
            cand = np.flatnonzero(~free & (g < -tol))
            if cand.size == 0:
                return x
            free[cand[np.argmin(g[cand])]] = True
        else:
            # move toward z until a free coordinate hits zero, then drop it
            neg = idx[z[idx] < 0]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = x[neg] / (x[neg] - z[neg])
            a = float(np.min(ratios)) if neg.size else 1.0
            x = x + a * (z - x)
            free &= x > 1e-14
            x = np.where(free, x, 0.0)
    return x


def solve_qp_nonneg(q, w, tol: float = 1e-10, max_iter: int = 20000) -> QpReport:
    """Projected gradient with Barzilai-Borwein steps, then an active-set
    polish.  Stops on the KKT residual."""
    q = np.asarray(q, dtype=float)
    q = 0.5 * (q + q.T)
    w = np.asarray(w, dtype=float)
    n = w.size
    if q.shape != (n, n):
        raise ValueError("Q and w have incompatible shapes")
    if np.all(w <= 0):
        x = np.zeros(n)
        return QpReport(Status.OPTIMAL, x, 0.0, qp_kkt_residual(q, w, x), 0)

    def grad(v):
        return 2.0 * (q @ v - w)

    lip = 2.0 * max(np.linalg.norm(q, 2), 1e-12)
    x = np.maximum(w / np.maximum(np.diag(q), 1e-12), 0.0)
    x = np.minimum(x, 1e6)
    g = grad(x)
    step = 1.0 / lip
    it = 0
    for it in range(1, max_iter + 1):
        xn = np.maximum(x - step * g, 0.0)
        gn = grad(xn)
        sx, sg = xn - x, gn - g
        x, g = xn, gn
        if np.max(np.abs(x)) > 1e12:
            return QpReport(Status.UNBOUNDED, x, np.inf, np.inf, it)
        if qp_kkt_residual(q, w, x) <= tol:
            break
        denom = sx @ sg
        step = (sx @ sx) / denom if denom > 1e-300 else 1.0 / lip
        step = min(max(step, 1e-3 / lip), 1e6 / lip)
    res_pg = qp_kkt_residual(q, w, x)
    xp = _active_set_polish(q, w, x, tol)
    res_p = qp_kkt_residual(q, w, xp)
    if res_p <= res_pg:
        x = xp
    res = min(res_p, res_pg)
    value = float(2 * w @ x - x @ q @ x)
    status = Status.OPTIMAL if res <= max(tol, 1e-9) else Status.MAX_ITER
    return QpReport(status, x, value, res, it)
