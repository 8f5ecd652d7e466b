"""Primal-dual interior point method for small dense SDPs.

Problems are posed over one PSD matrix variable X with linear equality
constraints, linear inequality constraints and entrywise sign
constraints on X.  Inequalities and sign constraints are turned into
equalities with nonnegative slacks, so internally the cone is
PSD(order) x R_+^p.  Search directions are HKM directions with a
Mehrotra predictor-corrector step.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .common import Status

__all__ = ["SdpProblem", "SdpReport", "solve_sdp", "pair_matrix"]


def pair_matrix(order: int, i: int, j: int) -> np.ndarray:
    """Symmetric E with <E, X> = X_ij (0-based indices)."""
    e = np.zeros((order, order))
    if i == j:
        e[i, i] = 1.0
    else:
        e[i, j] = e[j, i] = 0.5
    return e


@dataclass
class SdpProblem:
    """optimize <C, X> over X PSD subject to

        <A_k, X> = b_k              for (A_k, b_k) in ``eqs``
        <A_k, X> (<= | >=) b_k      for (A_k, b_k, sense) in ``ineqs``
        X_ij (>= | <= | =) 0        for (i, j, sense) in ``signs``

    The dual of the maximization form is

        min b^T y  s.t.  S = sum_k y_k A_k - C - sum_ij t_ij E_ij  PSD,

    with t_ij >= 0 for '>=' pairs, t_ij <= 0 for '<=' pairs and free for
    '='.  For minimization, S = C - sum y_k A_k - sum t_ij E_ij and the
    sign rules on t are the same.  ``y`` covers ``eqs`` then ``ineqs``.
    """

    order: int
    c: np.ndarray
    eqs: Sequence = field(default_factory=list)
    ineqs: Sequence = field(default_factory=list)
    signs: Sequence = field(default_factory=list)
    maximize: bool = True

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        if self.c.shape != (self.order, self.order):
            raise ValueError("cost matrix has the wrong shape")
        if not np.allclose(self.c, self.c.T, atol=1e-14, rtol=0):
            raise ValueError("cost matrix must be symmetric")
        for item in list(self.eqs) + list(self.ineqs):
            a = np.asarray(item[0])
            if a.shape != (self.order, self.order) or not np.allclose(a, a.T, atol=1e-14, rtol=0):
                raise ValueError("constraint matrices must be symmetric of the problem order")
        for i, j, s in self.signs:
            if s not in (">=", "<=", "="):
                raise ValueError(f"bad sign sense {s!r}")
            if not (0 <= i < self.order and 0 <= j < self.order):
                raise ValueError("sign constraint index out of range")


@dataclass
class SdpReport:
    status: Status
    x: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None
    t: dict = field(default_factory=dict)
    s: Optional[np.ndarray] = None          # dual slack matrix S
    value: float = np.nan                    # <C, X>
    dual_value: float = np.nan               # b^T y
    gap: float = np.nan                      # relative duality gap
    primal_residual: float = np.nan
    dual_residual: float = np.nan
    iterations: int = 0


def _max_step(x, dx, xinv_chol=None):
    """Largest a with x + a dx PSD (x positive definite)."""
    try:
        l = np.linalg.cholesky(x)
    except np.linalg.LinAlgError:
        return 0.0
    li = np.linalg.solve(l, np.eye(x.shape[0]))
    m = li @ dx @ li.T
    lam = np.linalg.eigvalsh(0.5 * (m + m.T))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _max_step_lp(v, dv):
    neg = dv < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-v[neg] / dv[neg]))


def solve_sdp(p: SdpProblem, tol: float = 1e-8, max_iter: int = 200) -> SdpReport:
    n = p.order
    rows, rhs, slack_coef = [], [], []
    for a, b in p.eqs:
        rows.append(np.asarray(a, float))
        rhs.append(float(b))
        slack_coef.append(0.0)
    for a, b, s in p.ineqs:
        rows.append(np.asarray(a, float))
        rhs.append(float(b))
        slack_coef.append(1.0 if s == "<=" else -1.0)
    n_lin = len(rows)
    for i, j, s in p.signs:
        rows.append(pair_matrix(n, i, j))
        rhs.append(0.0)
        slack_coef.append({"=": 0.0, ">=": -1.0, "<=": 1.0}[s])
    m = len(rows)
    A = np.array(rows).reshape(m, n, n) if m else np.zeros((0, n, n))
    Af = A.reshape(m, n * n)
    b = np.array(rhs)
    slack_rows = [k for k in range(m) if slack_coef[k] != 0.0]
    ns = len(slack_rows)
    B = np.zeros((m, ns))
    for col, k in enumerate(slack_rows):
        B[k, col] = slack_coef[k]
    C = -p.c if p.maximize else p.c.copy()

    normb = 1.0 + np.linalg.norm(b)
    normC = 1.0 + np.linalg.norm(C)
    anorm = [np.linalg.norm(A[k]) for k in range(m)]
    xi = max(10.0, np.sqrt(n), n * max([(1 + abs(b[k])) / (1 + anorm[k]) for k in range(m)] or [1.0]))
    eta = max(10.0, np.sqrt(n), max(anorm + [np.linalg.norm(C)]))
    X = xi * np.eye(n)
    Z = eta * np.eye(n)
    s = xi * np.ones(ns)
    zs = eta * np.ones(ns)
    y = np.zeros(m)
    I = np.eye(n)
    nu = n + ns

    status = Status.MAX_ITER
    it = 0
    best = None
    for it in range(1, max_iter + 1):
        rp = b - Af @ X.ravel() - B @ s
        Rd = C - (y @ Af).reshape(n, n) - Z
        rds = -B.T @ y - zs
        mu = (np.sum(X * Z) + s @ zs) / nu
        pobj = float(np.sum(C * X))
        dobj = float(b @ y)
        pinf = np.linalg.norm(rp) / normb
        dinf = (np.linalg.norm(Rd) + np.linalg.norm(rds)) / normC
        relgap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        compl = mu * nu / (1 + abs(pobj) + abs(dobj))
        err = max(pinf, dinf, relgap, compl)
        if best is None or err < best[0]:
            best = (err, X.copy(), y.copy(), Z.copy(), s.copy(), zs.copy())
        if err <= tol:
            status = Status.OPTIMAL
            break
        if np.linalg.norm(X) > 1e12 or np.linalg.norm(y) > 1e12:
            status = Status.INFEASIBLE if np.linalg.norm(y) > 1e12 else Status.UNBOUNDED
            break

        try:
            lz = np.linalg.cholesky(Z)
        except np.linalg.LinAlgError:
            break
        lzi = np.linalg.solve(lz, I)
        Zi = lzi.T @ lzi
        G = np.matmul(np.matmul(X, A), Zi)          # X A_l Z^-1
        M = Af @ G.reshape(m, n * n).T
        d_s = s / zs
        M += (B * d_s) @ B.T
        M = 0.5 * (M + M.T)
        try:
            lm = np.linalg.cholesky(M + 1e-14 * np.trace(M) / max(m, 1) * np.eye(m))
            solve_m = lambda r: np.linalg.solve(lm.T, np.linalg.solve(lm, r))
        except np.linalg.LinAlgError:
            solve_m = lambda r: np.linalg.lstsq(M, r, rcond=None)[0]

        XRdZi = X @ Rd @ Zi

        def direction(Rc, rcs):
            rhs_ = rp - Af @ (Rc @ Zi - XRdZi).ravel() - B @ (rcs / zs - d_s * rds)
            dy = solve_m(rhs_)
            dZ = Rd - (dy @ Af).reshape(n, n)
            dX = (Rc - X @ dZ) @ Zi
            dX = 0.5 * (dX + dX.T)
            dzs = rds - B.T @ dy
            ds = (rcs - s * dzs) / zs
            return dX, dy, dZ, ds, dzs

        # predictor
        dX, dy, dZ, ds, dzs = direction(-X @ Z, -s * zs)
        ap = min(1.0, _max_step(X, dX), _max_step_lp(s, ds))
        ad = min(1.0, _max_step(Z, dZ), _max_step_lp(zs, dzs))
        mu_aff = (np.sum((X + ap * dX) * (Z + ad * dZ)) + (s + ap * ds) @ (zs + ad * dzs)) / nu
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0
        # corrector
        Rc = sigma * mu * I - X @ Z - dX @ dZ
        rcs = sigma * mu - s * zs - ds * dzs
        dX, dy, dZ, ds, dzs = direction(Rc, rcs)
        gamma = 0.9 + 0.09 * min(ap, ad)
        ap = min(1.0, gamma * _max_step(X, dX), gamma * _max_step_lp(s, ds))
        ad = min(1.0, gamma * _max_step(Z, dZ), gamma * _max_step_lp(zs, dzs))
        X = X + ap * dX
        X = 0.5 * (X + X.T)
        s = s + ap * ds
        y = y + ad * dy
        Z = Z + ad * dZ
        Z = 0.5 * (Z + Z.T)
        zs = zs + ad * dzs

    if status is not Status.OPTIMAL and best is not None:
        _, X, y, Z, s, zs = best

    pobj = float(np.sum(C * X))
    dobj = float(b @ y)
    rp = b - Af @ X.ravel() - B @ s
    Rd = C - (y @ Af).reshape(n, n) - Z
    rds = -B.T @ y - zs
    sgn = -1.0 if p.maximize else 1.0
    t = {}
    for k, (i, j, _) in enumerate(p.signs):
        t[(i, j)] = float(y[n_lin + k])
    # dual slack matrix in the user's convention (see class docstring)
    return SdpReport(
        status=status,
        x=X,
        y=sgn * y[:n_lin],
        t=t,
        s=Z,
        value=sgn * pobj,
        dual_value=sgn * dobj,
        gap=abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj)),
        primal_residual=float(np.linalg.norm(rp) / normb),
        dual_residual=float((np.linalg.norm(Rd) + np.linalg.norm(rds)) / normC),
        iterations=it,
    )
