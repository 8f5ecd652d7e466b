"""Dense revised simplex method with Bland's anti-cycling rule."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .common import Status

__all__ = ["LinearProgram", "LpReport", "solve_lp"]


@dataclass
class LinearProgram:
    """optimize c^T x  s.t.  a x (senses) b,  lower <= x <= upper.

    ``senses`` holds '<=', '=' or '>=' per row.  Bounds default to x >= 0.
    """

    c: np.ndarray
    a: np.ndarray
    senses: Sequence[str]
    b: np.ndarray
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    maximize: bool = False

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.a = np.asarray(self.a, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.senses = list(self.senses)
        m = self.a.shape[0]
        if self.b.size != m or len(self.senses) != m:
            raise ValueError("row data have inconsistent lengths")
        if any(s not in ("<=", "=", ">=") for s in self.senses):
            raise ValueError("senses must be '<=', '=' or '>='")
        self.lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, float).ravel()
        self.upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, float).ravel()
        if self.lower.size != n or self.upper.size != n:
            raise ValueError("bounds have the wrong length")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")
        for arr in (self.c, self.a, self.b):
            if np.any(np.isnan(arr)) or np.any(np.isinf(arr)):
                raise ValueError("LP data must be finite")


@dataclass
class LpReport:
    status: Status
    x: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None          # row duals, user direction
    value: float = np.nan
    dual_value: float = np.nan
    gap: float = np.nan
    iterations: int = 0
    basis: list = field(default_factory=list)


def _simplex(a, b, c, basis, allowed, tol, max_iter):
    """Minimize c^T x, a x = b, x >= 0 from a feasible basis.

    Returns (status, basis, iterations).  Bland's rule: lowest index
    entering column, lowest basic index among tied leaving rows.
    """
    m = a.shape[0]
    it = 0
    while it < max_iter:
        it += 1
        bm = a[:, basis]
        xb = np.linalg.solve(bm, b)
        y = np.linalg.solve(bm.T, c[basis])
        red = c - a.T @ y
        red[basis] = 0.0
        cand = np.flatnonzero((red < -tol) & allowed)
        if cand.size == 0:
            return Status.OPTIMAL, basis, it
        j = int(cand[0])
        d = np.linalg.solve(bm, a[:, j])
        pos = d > tol
        if not np.any(pos):
            return Status.UNBOUNDED, basis, it
        ratios = np.full(m, np.inf)
        ratios[pos] = np.maximum(xb[pos], 0.0) / d[pos]
        rmin = ratios.min()
        ties = np.flatnonzero(ratios <= rmin + tol * max(1.0, abs(rmin)))
        leave = min(ties, key=lambda r: basis[r])
        basis = list(basis)
        basis[leave] = j
    return Status.MAX_ITER, basis, it


def solve_lp(p: LinearProgram, tol: float = 1e-9, max_iter: int = 20000) -> LpReport:
    n = p.c.size
    sign = -1.0 if p.maximize else 1.0
    c0 = sign * p.c

    # substitute bounded variables: x = lo + x' or x = up - x', free x = x+ - x-
    cols, shift = [], np.zeros(n)
    extra_rows = []
    for j in range(n):
        lo, up = p.lower[j], p.upper[j]
        if np.isfinite(lo):
            shift[j] = lo
            cols.append((j, 1.0))
            if np.isfinite(up):
                extra_rows.append((len(cols) - 1, up - lo))
        elif np.isfinite(up):
            shift[j] = up
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    k = len(cols)
    t = np.zeros((n, k))
    for col, (j, s) in enumerate(cols):
        t[j, col] = s
    a1 = p.a @ t
    b1 = p.b - p.a @ shift
    c1 = c0 @ t
    senses = list(p.senses)
    if extra_rows:
        ea = np.zeros((len(extra_rows), k))
        for r, (col, cap) in enumerate(extra_rows):
            ea[r, col] = 1.0
        a1 = np.vstack([a1, ea])
        b1 = np.concatenate([b1, [cap for _, cap in extra_rows]])
        senses += ["<="] * len(extra_rows)
    m = a1.shape[0]

    # slacks
    slack_cols = []
    for r, s in enumerate(senses):
        if s != "=":
            e = np.zeros(m)
            e[r] = 1.0 if s == "<=" else -1.0
            slack_cols.append(e)
    a2 = np.hstack([a1, np.array(slack_cols).T]) if slack_cols else a1.copy()
    c2 = np.concatenate([c1, np.zeros(len(slack_cols))])
    b2 = b1.copy()
    flip = np.where(b2 < 0, -1.0, 1.0)
    a2 *= flip[:, None]
    b2 *= flip
    nstd = a2.shape[1]

    if m == 0:
        if np.any(c2 < -tol):
            return LpReport(Status.UNBOUNDED)
        x = shift.copy()
        val = float(p.c @ x)
        return LpReport(Status.OPTIMAL, x, np.zeros(p.a.shape[0]), val, val, 0.0)

    # phase 1 with artificials
    a3 = np.hstack([a2, np.eye(m)])
    c3 = np.concatenate([np.zeros(nstd), np.ones(m)])
    basis = list(range(nstd, nstd + m))
    allowed = np.ones(nstd + m, dtype=bool)
    st, basis, it1 = _simplex(a3, b2, c3, basis, allowed, tol, max_iter)
    xb = np.linalg.solve(a3[:, basis], b2)
    infeas = sum(v for bi, v in zip(basis, xb) if bi >= nstd)
    if infeas > tol * max(1.0, np.max(np.abs(b2))) * 10:
        return LpReport(Status.INFEASIBLE, iterations=it1)

    # drive zero artificials out of the basis; drop redundant rows
    keep_rows = list(range(m))
    r = 0
    while r < len(basis):
        if basis[r] < nstd:
            r += 1
            continue
        bm = a3[np.ix_(keep_rows, basis)]
        row = np.linalg.solve(bm, a3[keep_rows][:, :nstd])[r]
        cand = [j for j in np.flatnonzero(np.abs(row) > 1e-9) if j not in basis]
        if cand:
            basis[r] = int(cand[0])
            r += 1
        else:
            del keep_rows[r]
            del basis[r]
    a4 = a2[keep_rows]
    b4 = b2[keep_rows]
    if not basis:
        if np.any(c2 < -tol):
            return LpReport(Status.UNBOUNDED, iterations=it1)
        xs = np.zeros(nstd)
        y_std = np.zeros(len(keep_rows))
        st, it2 = Status.OPTIMAL, 0
    else:
        allowed = np.ones(nstd, dtype=bool)
        st, basis, it2 = _simplex(a4, b4, c2, basis, allowed, tol, max_iter)
        if st is not Status.OPTIMAL:
            return LpReport(st, iterations=it1 + it2)
        bm = a4[:, basis]
        xs = np.zeros(nstd)
        xs[basis] = np.linalg.solve(bm, b4)
        xs = np.maximum(xs, 0.0)
        y_std = np.linalg.solve(bm.T, c2[basis])

    x = shift + t @ xs[:k]
    # duals of the original rows, in the user's direction
    y_full = np.zeros(m)
    y_full[keep_rows] = y_std
    y_full *= flip
    y = sign * y_full[: p.a.shape[0]]
    val = float(p.c @ x)
    dual_val = _dual_objective(p, y)
    gap = abs(val - dual_val)
    return LpReport(Status.OPTIMAL, x, y, val, dual_val, gap, it1 + it2, basis)


def _dual_objective(p: LinearProgram, y: np.ndarray) -> float:
    """Lagrangian dual value at row multipliers y, including bound terms."""
    r = p.c - p.a.T @ y
    total = float(p.b @ y)
    for j, rj in enumerate(r):
        if abs(rj) <= 1e-12:
            continue
        # a minimizer sits at the lower bound when r > 0, a maximizer at the upper
        at_lower = (rj > 0) != p.maximize
        bound = p.lower[j] if at_lower else p.upper[j]
        if not np.isfinite(bound):
            return np.inf if p.maximize else -np.inf
        total += rj * bound
    return total
