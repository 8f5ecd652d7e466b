"""Theta functions over sign-pattern cones with the PSD lifting.

For a graph G and a variant (TH, TH', TH+) with cone A, the theta body is
the set of diagonals of lifted PSD matrices [[1, x^T], [x, X]] with
diag(X) = x and X in A.  Five formulations of its weighted theta number
are computed independently here:

    theta3  max <sqrt(w) sqrt(w)^T, X>, tr X = 1, X in A, X PSD
    theta2  min lambda_max(Y + sqrt(w) sqrt(w)^T), Y in -A^Delta, diag Y = 0
            (the dual certificate of the theta3 solve, re-evaluated)
    theta4  support function of the theta body (lifted SDP)
    theta1  min over x in TH(A^Delta) of max_i w_i/x_i (exact gauge SDP)
    theta   support function of abl(TH(A^Delta)), by bisection on
            membership in TH(A^Delta)

All five agree; the certificate records their spread.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import corners
from .cones import (AdjacencyCone, Variant, cone_for_variant, cone_member,
                    delta_dual, lift)
from .graph import Graph, complement
from .linalg import (diag_scale, eigen_sym, is_psd, lambda_max, lambda_min,
                     pinv_diag)
from .solvers import (SdpProblem, Status, SolverError, pair_matrix, solve_sdp,
                      solve_qp_nonneg, qp_kkt_residual)

__all__ = [
    "ThetaCertificate",
    "GeometricRepresentation",
    "Theta6Result",
    "LuzResult",
    "theta_body",
    "theta3",
    "theta2",
    "theta4",
    "theta1",
    "theta_abl",
    "theta",
    "certify_all_thetas",
    "optimum_identity_check",
    "antiblocker_identity_check",
    "polar_product_check",
    "hoffman_ratio",
    "theta6_lower_search",
    "random_feasible_b",
    "extract_geometric_representation",
    "repair_lift",
    "lifted_optimum",
    "luz_upsilon_c",
    "luz_theta",
    "restrict_cone",
]

THETA_LIMIT = 20
SDP_TOL = 1e-9


# --- plumbing ---------------------------------------------------------------

def _weights(n: int, w) -> np.ndarray:
    w = np.ones(n) if w is None else np.asarray(w, dtype=float)
    if w.shape != (n,):
        raise ValueError(f"weights must have length {n}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and nonnegative")
    return w


def _guard(n: int):
    if n > THETA_LIMIT:
        raise ValueError(f"theta computations limited to n <= {THETA_LIMIT}")


def restrict_cone(a: AdjacencyCone, keep) -> AdjacencyCone:
    """Cone on the coordinates ``keep`` (0-based), relabelled 1..len(keep)."""
    pos = {int(v) + 1: k + 1 for k, v in enumerate(keep)}

    def sub(pairs):
        return frozenset((pos[i], pos[j]) for i, j in pairs if i in pos and j in pos)

    return AdjacencyCone(len(keep), sub(a.e_plus), sub(a.e_minus),
                         frozenset(pos[v] for v in a.v_plus if v in pos),
                         frozenset(pos[v] for v in a.v_minus if v in pos))


def _solve(p: SdpProblem, tol: float):
    rep = solve_sdp(p, tol=tol)
    if rep.status is not Status.OPTIMAL:
        # accept a nearly converged iterate, otherwise surface the failure
        if not (rep.gap < 1e3 * tol and rep.primal_residual < 1e3 * tol
                and rep.dual_residual < 1e3 * tol):
            raise SolverError(f"SDP solve ended with {rep.status.value}", rep)
    return rep


def _pad_matrix(m, keep, n, offset=0):
    out = np.zeros((n + offset, n + offset))
    idx = list(range(offset)) + [k + offset for k in keep]
    out[np.ix_(idx, idx)] = m
    return out


def _lift_constraints(order):
    """X00 = 1 and X0i = Xii on an (n+1)-order lifted variable."""
    eqs = [(pair_matrix(order, 0, 0), 1.0)]
    eqs += [(pair_matrix(order, 0, i) - pair_matrix(order, i, i), 0.0)
            for i in range(1, order)]
    return eqs


# --- the order-n pair (theta3, theta2) ------------------------------------------

def _theta3_solve(a: AdjacencyCone, w: np.ndarray, tol: float):
    """Solve theta3 on the full coordinate set; returns (value, X, lam, Y, rep)."""
    n = a.n
    sw = np.sqrt(w)
    p = SdpProblem(n, np.outer(sw, sw), eqs=[(np.eye(n), 1.0)],
                   signs=a.sign_constraints(), maximize=True)
    rep = _solve(p, tol)
    x = 0.5 * (rep.x + rep.x.T)
    y = np.zeros((n, n))
    for (i, j), t in rep.t.items():
        y[i, j] = y[j, i] = 0.5 * t
    return rep.value, x, float(rep.y[0]), y, rep


def _project_dual(y: np.ndarray, a: AdjacencyCone) -> np.ndarray:
    """Nearest point of -A^Delta with zero diagonal."""
    ad = delta_dual(a)
    return -ad.project(-y) - np.diag(np.diag(y))


def _purify(a: AdjacencyCone, w: np.ndarray, value: float, x: np.ndarray,
            y: np.ndarray, tol: float, zero_tol: float = 1e-7):
    """Re-solve on the numerical support of diag(x).

    Interior point iterates leave O(sqrt(mu)) couplings on coordinates whose
    optimal diagonal is zero.  Dropping those coordinates and solving again
    gives an optimum whose diagonal is bounded away from zero; it is kept
    only if its value matches.  Returns (value, x, keep) in local indices.
    """
    keep = np.arange(a.n)
    for _ in range(a.n):
        d = np.diag(x)
        live = np.flatnonzero(d > zero_tol * float(np.max(d)))
        if live.size == keep.size:
            break
        sub = restrict_cone(a, live)
        v2, x2, _, y2, _ = _theta3_solve(sub, w[live], tol)
        if abs(v2 - value) > 10 * tol * (1 + abs(value)):
            break
        a, w, x, y, keep = sub, w[live], x2, y2, keep[live]
    return value, _face_polish(a, w, value, x, _project_dual(y, a), tol), keep


def _face_polish(a: AdjacencyCone, w: np.ndarray, value: float, x: np.ndarray,
                 y: np.ndarray, tol: float) -> np.ndarray:
    """Project an approximate theta3 optimum onto the optimal face.

    The primal iterate is accurate only to about sqrt(gap) along the
    optimal face, while the null space of the dual slack is accurate to
    about gap.  With V spanning that null space, the optimum is V M V^T for
    a small PSD M; M is taken as the nearest matrix to V^T X V meeting the
    trace and the active zero entries.  Falls back to x when the polished
    point fails feasibility or optimality.
    """
    n = a.n
    sw = np.sqrt(w)
    ex = eigen_sym(x)
    r = int(np.sum(ex.values > 1e-6 * ex.values[0]))
    lam = lambda_max(y + np.outer(sw, sw))
    es = eigen_sym(lam * np.eye(n) - y - np.outer(sw, sw))
    v = es.vectors[:, n - r:]                      # smallest r eigenvalues
    iu = np.triu_indices(r)

    def row(i, j):
        m = np.outer(v[i], v[j])
        m = m + m.T
        m[np.diag_indices(r)] *= 0.5
        return m[iu]

    pat = a.pattern()
    active = [(i - 1, j - 1) for (i, j), sg in pat.items()
              if sg == "=" or abs(x[i - 1, j - 1]) <= 1e-7]
    k = [np.where(iu[0] == iu[1], 1.0, 0.0)] + [row(i, j) for i, j in active]
    h = np.zeros(len(k))
    h[0] = 1.0
    k = np.array(k)
    m0 = (v.T @ x @ v)[iu]
    corr = np.linalg.lstsq(k, h - k @ m0, rcond=None)[0]
    m = np.zeros((r, r))
    m[iu] = m0 + corr
    m = m + m.T - np.diag(np.diag(m))
    if np.max(np.abs(k @ m[iu] - h)) > 1e-12 or lambda_min(m) < -1e-13:
        return x
    xp = v @ m @ v.T
    xp = 0.5 * (xp + xp.T)
    for i, j in active:
        xp[i, j] = xp[j, i] = 0.0
    if _pattern_violation(a, xp) > 0 or lambda_min(xp) < -1e-12:
        return x
    if float(sw @ xp @ sw) < value - 10 * tol * (1 + value):
        return x
    return xp


def _theta3_primal(a: AdjacencyCone, w: np.ndarray, tol: float, purify: bool):
    """theta3 on a cone already restricted to supp(w); X padded to a.n."""
    val, x, _, y, _ = _theta3_solve(a, w, tol)
    if not purify:
        return val, x
    val, xp, live = _purify(a, w, val, x, y, tol)
    return val, _pad_matrix(xp, live, a.n)


def theta3(g: Graph, variant, w=None, tol: float = SDP_TOL, restrict: bool = True,
           purify: bool = True):
    """(value, X*) for max <sqrt(w)sqrt(w)^T, X>, tr X = 1, X in A and PSD."""
    a = cone_for_variant(g, variant)
    w = _weights(g.n, w)
    _guard(g.n)
    keep = np.flatnonzero(w > 0) if restrict else np.arange(g.n)
    if keep.size == 0:
        x = np.zeros((g.n, g.n))
        x[0, 0] = 1.0
        return 0.0, x
    val, x = _theta3_primal(restrict_cone(a, keep), w[keep], tol, purify and restrict)
    return val, _pad_matrix(x, keep, g.n)


def theta2(g: Graph, variant, w=None, tol: float = SDP_TOL):
    """(value, lambda*, Y*) from the dual certificate of the theta3 SDP.

    Y* is projected onto its admissible pattern and the value is
    recomputed as lambda_max(Y* + sqrt(w) sqrt(w)^T), so it is a
    genuine upper bound whatever the solver accuracy.
    """
    a = cone_for_variant(g, variant)
    w = _weights(g.n, w)
    _guard(g.n)
    keep = np.flatnonzero(w > 0)
    if keep.size == 0:
        return 0.0, 0.0, np.zeros((g.n, g.n))
    ar = restrict_cone(a, keep)
    _, _, _, y, _ = _theta3_solve(ar, w[keep], tol)
    y = _project_dual(y, ar)
    sw = np.sqrt(w[keep])
    lam = lambda_max(y + np.outer(sw, sw))
    return lam, lam, _pad_matrix(y, keep, g.n)


# --- lifted formulations ----------------------------------------------------------

def _support_sdp(a: AdjacencyCone, w: np.ndarray, tol: float):
    """max sum w_i X_ii over the lifted body; a is on supp(w) already."""
    n = a.n
    order = n + 1
    c = np.zeros((order, order))
    c[1:, 1:] = np.diag(w)
    p = SdpProblem(order, c, eqs=_lift_constraints(order),
                   signs=a.sign_constraints(offset=1), maximize=True)
    rep = _solve(p, tol)
    return rep.value, 0.5 * (rep.x + rep.x.T)


def _gauge_sdp(a: AdjacencyCone, w: np.ndarray, tol: float):
    """min X00 with X0i = Xii = w_i: the gauge of the lifted body at w."""
    order = a.n + 1
    c = pair_matrix(order, 0, 0)
    eqs = [(pair_matrix(order, 0, i), w[i - 1]) for i in range(1, order)]
    eqs += [(pair_matrix(order, i, i), w[i - 1]) for i in range(1, order)]
    p = SdpProblem(order, c, eqs=eqs, signs=a.sign_constraints(offset=1),
                   maximize=False)
    rep = _solve(p, tol)
    return rep.value, 0.5 * (rep.x + rep.x.T)


def _margin_sdp(a: AdjacencyCone, x: np.ndarray, tol: float) -> float:
    """Largest t such that some lift of x has lambda_min >= t.

    Variable P = Xhat - t I: min P00 with P0i = x_i, Pii - P00 = x_i - 1.
    """
    order = a.n + 1
    c = pair_matrix(order, 0, 0)
    eqs = [(pair_matrix(order, 0, i), x[i - 1]) for i in range(1, order)]
    eqs += [(pair_matrix(order, i, i) - pair_matrix(order, 0, 0), x[i - 1] - 1.0)
            for i in range(1, order)]
    p = SdpProblem(order, c, eqs=eqs, signs=a.sign_constraints(offset=1),
                   maximize=False)
    rep = _solve(p, tol)
    return 1.0 - rep.value


def theta_body(a: AdjacencyCone, tol: float = SDP_TOL, exact_gauge: bool = True,
               tag: str = "TH") -> corners.CornerOracle:
    """Corner oracle for TH(A, PSD lifting)."""
    n = a.n

    def member(x, t=1e-9):
        x = np.asarray(x, dtype=float)
        if np.any(x < -abs(t)):
            return False
        keep = np.flatnonzero(x > 0)
        if keep.size == 0:
            return True
        return _margin_sdp(restrict_cone(a, keep), x[keep], tol) >= -t

    def support_point(w):
        w = np.maximum(np.asarray(w, dtype=float), 0.0)
        keep = np.flatnonzero(w > 0)
        if keep.size == 0:
            return 0.0, np.zeros(n)
        val, xh = _support_sdp(restrict_cone(a, keep), w[keep], tol)
        x = np.zeros(n)
        x[keep] = np.diag(xh)[1:]
        return val, x

    def support(w):
        return support_point(w)[0]

    def gauge_hook(w):
        keep = np.flatnonzero(w > 0)
        return _gauge_sdp(restrict_cone(a, keep), w[keep], tol)[0]

    return corners.CornerOracle(n, member, support, tag,
                                gauge_hook=gauge_hook if exact_gauge else None,
                                support_point=support_point, extras={"cone": a})


def lifted_optimum(g: Graph, variant, w=None, tol: float = SDP_TOL):
    """(value, Xhat) at the optimum of the lifted support SDP, padded to n+1."""
    a = cone_for_variant(g, variant)
    w = _weights(g.n, w)
    keep = np.flatnonzero(w > 0)
    if keep.size == 0:
        xh = np.zeros((g.n + 1, g.n + 1))
        xh[0, 0] = 1.0
        return 0.0, xh
    val, xh = _support_sdp(restrict_cone(a, keep), w[keep], tol)
    return val, _pad_matrix(xh, keep, g.n, offset=1)


def theta4(g: Graph, variant, w=None, tol: float = SDP_TOL) -> float:
    _guard(g.n)
    return lifted_optimum(g, variant, w, tol)[0]


def _abl_body(g: Graph, variant, tol, exact_gauge):
    a = cone_for_variant(g, variant)
    return theta_body(delta_dual(a), tol, exact_gauge, tag=f"TH(A^D,{Variant.parse(variant).value})")


def theta1(g: Graph, variant, w=None, tol: float = SDP_TOL) -> float:
    """min over x in TH(A^Delta) of max_i w_i / x_i, via the exact gauge."""
    w = _weights(g.n, w)
    _guard(g.n)
    body = _abl_body(g, variant, tol, exact_gauge=True)
    return corners.min_max_ratio(body, w, tol).value


def theta_abl(g: Graph, variant, w=None, tol: float = SDP_TOL) -> float:
    """Support function of abl(TH(A^Delta)) at w.

    The antiblocker's support is the gauge of TH(A^Delta); here it is found
    by bisection on membership (each membership query is an SDP).
    """
    w = _weights(g.n, w)
    _guard(g.n)
    body = _abl_body(g, variant, tol, exact_gauge=False)
    # bisection resolution a little finer than what the callers compare at
    return corners.antiblocker(body, 1e-9).support(w)


def theta(g: Graph, w=None, variant=Variant.TH, tol: float = SDP_TOL) -> float:
    """Convenience: the weighted theta number via theta3."""
    return theta3(g, variant, w, tol)[0]


# --- certificates -------------------------------------------------------------------

@dataclass
class ThetaCertificate:
    variant: Variant
    w: np.ndarray
    values: dict                       # theta, theta1..theta4
    x_star: np.ndarray                 # theta3 optimum
    lam: float                         # theta2 optimum lambda
    y_star: np.ndarray                 # theta2 optimum Y
    xhat: np.ndarray                   # lifted optimum of theta4
    discrepancy: float
    residuals: dict = field(default_factory=dict)
    ok: bool = True

    @property
    def value(self) -> float:
        return self.values["theta3"]

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "w": self.w.tolist(),
            "values": dict(self.values),
            "lambda": self.lam,
            "discrepancy": self.discrepancy,
            "residuals": dict(self.residuals),
            "ok": self.ok,
            "x_star": self.x_star.tolist(),
            "y_star": self.y_star.tolist(),
            "xhat": self.xhat.tolist(),
        }


def certify_all_thetas(g: Graph, variant, w=None, tol: float = 1e-6,
                       sdp_tol: float = SDP_TOL) -> ThetaCertificate:
    """Compute all five formulations and check the certificate invariants.

    ``tol`` bounds the invariant residuals; route agreement is recorded in
    ``discrepancy`` (relative to 1 + value) for the caller to judge.
    """
    variant = Variant.parse(variant)
    w = _weights(g.n, w)
    _guard(g.n)
    a = cone_for_variant(g, variant)
    n = g.n
    keep = np.flatnonzero(w > 0)
    if keep.size == 0:
        xs = np.zeros((n, n))
        xs[0, 0] = 1.0
        xh = np.zeros((n + 1, n + 1))
        xh[0, 0] = 1.0
        vals = dict.fromkeys(["theta", "theta1", "theta2", "theta3", "theta4"], 0.0)
        return ThetaCertificate(variant, w, vals, xs, 0.0, np.zeros((n, n)), xh, 0.0,
                                {"trace": 0.0})
    ar = restrict_cone(a, keep)
    wr = w[keep]
    sw = np.sqrt(wr)

    v3, xr, _, yr, rep3 = _theta3_solve(ar, wr, sdp_tol)
    _, xp, live = _purify(ar, wr, v3, xr, yr, sdp_tol)
    xr = _pad_matrix(xp, live, keep.size)
    yr = _project_dual(yr, ar)
    lam = lambda_max(yr + np.outer(sw, sw))
    v4, xh = lifted_optimum(g, variant, w, sdp_tol)
    v1 = theta1(g, variant, w, sdp_tol)
    v0 = theta_abl(g, variant, w, sdp_tol)
    vals = {"theta": v0, "theta1": v1, "theta2": lam, "theta3": v3, "theta4": v4}
    spread = max(vals.values()) - min(vals.values())
    disc = spread / (1.0 + max(vals.values()))

    s = lam * np.eye(keep.size) - yr - np.outer(sw, sw)
    res = {
        "trace": abs(np.trace(xr) - 1.0),
        "primal_psd": max(0.0, -lambda_min(xr)),
        "primal_pattern": _pattern_violation(ar, xr),
        "dual_psd": max(0.0, -lambda_min(s)),
        "dual_pattern": _pattern_violation(delta_dual(ar), -yr) + float(np.max(np.abs(np.diag(yr)))),
        "complementarity": abs(float(np.sum(xr * s))),
        "sdp_gap": rep3.gap,
    }
    ok = all(v <= tol for v in res.values())
    return ThetaCertificate(variant, w, vals, _pad_matrix(xr, keep, n), lam,
                            _pad_matrix(yr, keep, n), xh, disc, res, ok)


def _pattern_violation(a: AdjacencyCone, x) -> float:
    worst = 0.0
    for (i, j), s in a.pattern().items():
        v = x[i - 1, j - 1]
        if s in ("=", ">="):
            worst = max(worst, -v)
        if s in ("=", "<="):
            worst = max(worst, v)
    return worst


@dataclass
class OptimumIdentityReport:
    supp_ok: bool
    eigen_residual: float
    lambda_residual: float
    scaled_residual: float
    lam: float
    d: np.ndarray
    xbar: np.ndarray

    def max_residual(self) -> float:
        return max(self.eigen_residual, self.lambda_residual, self.scaled_residual)

    def ok(self, tol: float = 1e-6) -> bool:
        return self.supp_ok and self.max_residual() <= tol


def optimum_identity_check(x_star, w, zero_tol: float = 1e-7) -> OptimumIdentityReport:
    """Identities between d = diag X*, Xbar and lambda at a theta3 optimum.

    Diagonal entries below ``zero_tol`` (relative to max d) are treated as
    zero, as are their rows and columns.
    """
    x = np.array(x_star, dtype=float)
    w = np.asarray(w, dtype=float)
    d = np.diag(x).copy()
    small = d <= zero_tol * max(float(np.max(d)), 1e-300)
    d[small] = 0.0
    x[small, :] = 0.0
    x[:, small] = 0.0
    supp_ok = bool(np.all(w[d > 0] > 0))
    sd = np.sqrt(d)
    xbar = diag_scale(pinv_diag(sd), x)
    sw = np.sqrt(w)
    m = diag_scale(sw, xbar)
    lam = lambda_max(m)
    eig_res = float(np.max(np.abs(m @ sd - lam * sd)))
    lam_res = abs(lam - float(sw @ x @ sw))
    scaled = float(np.max(np.abs(x @ sw - lam * pinv_diag(sw) * d)))
    return OptimumIdentityReport(supp_ok, eig_res, lam_res, scaled, lam, d, xbar)


# --- antiblocking and polarity -----------------------------------------------------

def repair_lift(xhat, a: AdjacencyCone) -> np.ndarray:
    """Snap a numerically lifted optimum to an exact member of the lifted body.

    Enforces X00 = 1, row 0 = diagonal and the sign pattern, then mixes in
    the lift of eps*e (eps = 1/2n), which is positive definite and satisfies
    every pattern, just enough to restore PSD.
    """
    xh = 0.5 * (np.array(xhat, dtype=float) + np.array(xhat, dtype=float).T)
    xh = xh / xh[0, 0]
    n = a.n
    d = np.clip(0.5 * (np.diag(xh)[1:] + xh[0, 1:]), 0.0, None)
    xh[0, 1:] = xh[1:, 0] = d
    xh[1:, 1:] = a.project(xh[1:, 1:])
    xh[np.arange(1, n + 1), np.arange(1, n + 1)] = d
    lmin = lambda_min(xh)
    if lmin < 0:
        eps = 1.0 / (2 * n)
        center = lift(np.full(n, eps), eps * np.eye(n))
        cmin = lambda_min(center)
        delta = min(1.0, (-lmin) / (cmin - lmin) * (1 + 1e-6) + 1e-15)
        xh = (1 - delta) * xh + delta * center
    return xh


@dataclass
class AntiblockerReport:
    pairing: str
    max_product: float
    pairs: int
    max_cross_support: float
    ok: bool
    details: dict = field(default_factory=dict)


_PAIRINGS = {
    "th": (Variant.TH, Variant.TH),
    "th-th": (Variant.TH, Variant.TH),
    "thp-thplus": (Variant.TH_PRIME, Variant.TH_PLUS),
    "thplus-thp": (Variant.TH_PLUS, Variant.TH_PRIME),
}


def antiblocker_identity_check(g: Graph, pairing: str = "th-th", samples: int = 100,
                               tol: float = 1e-7, seed: int = 0,
                               support_tol: float = 1e-6) -> AntiblockerReport:
    """Weak duality between a theta body of G and its partner on the complement.

    Points x (resp. y) are diagonals of lifted optima of random weights,
    snapped to exact members.  Every product <x, y> must be at most
    1 + tol; in addition each y must lie in abl of the first body, checked
    through its support function, and symmetrically for x.
    """
    v1, v2 = _PAIRINGS[pairing.lower().replace("_", "-")]
    a1 = cone_for_variant(g, v1)
    h = complement(g)
    a2 = cone_for_variant(h, v2)
    if a2 != delta_dual(a1):
        raise AssertionError("paired cone is not the Delta-dual")
    rng = np.random.default_rng(seed)
    k = max(1, math.ceil(math.sqrt(samples)))
    xs, ys = [], []
    for j in range(k):
        w = np.ones(g.n) if j == 0 else rng.random(g.n)
        _, xh = lifted_optimum(g, v1, w)
        xs.append(np.diag(repair_lift(xh, a1))[1:])
        w = np.ones(g.n) if j == 0 else rng.random(g.n)
        _, yh = lifted_optimum(h, v2, w)
        ys.append(np.diag(repair_lift(yh, a2))[1:])
    prods = [float(x @ y) for x in xs for y in ys][:max(samples, 1)]
    b1 = theta_body(a1)
    b2 = theta_body(a2)
    cross = [b1.support(y) for y in ys] + [b2.support(x) for x in xs]
    mp, mc = max(prods), max(cross)
    ok = mp <= 1 + tol and mc <= 1 + support_tol
    return AntiblockerReport(pairing, mp, len(prods), mc, ok,
                             {"x": [x.tolist() for x in xs], "y": [y.tolist() for y in ys]})


def polar_product_check(g: Graph, tol: float = SDP_TOL):
    """(theta(G; e), theta(Gbar; e), product); the caller asserts
    vertex-transitivity, under which the product equals n."""
    e = np.ones(g.n)
    a = theta3(g, Variant.TH, e, tol)[0]
    b = theta3(complement(g), Variant.TH, e, tol)[0]
    return a, b, a * b


# --- Hoffman-type bounds ---------------------------------------------------------------

def hoffman_ratio(a) -> float:
    """1 - [a != 0] lambda_max(a) / lambda_min(a)."""
    a = np.asarray(a, dtype=float)
    if np.any(np.abs(np.diag(a)) > 0):
        raise ValueError("hoffman_ratio expects a zero diagonal")
    if not np.any(a != 0):
        return 1.0
    vals = eigen_sym(a).values
    if vals[-1] >= 0:
        return np.inf
    return 1.0 - vals[0] / vals[-1]


@dataclass
class Theta6Result:
    value: float                 # lambda_max of the constructed B
    b: np.ndarray
    theta3: float
    sampled_max: float           # largest lambda_max among random feasible B
    samples: int
    feasible: bool               # constructed B passes diag/pattern/PSD checks

    def __iter__(self):
        yield self.value
        yield self.b


def random_feasible_b(a: AdjacencyCone, w: np.ndarray, rng) -> np.ndarray:
    """Random B with diag(B) = w, B in A, B PSD (w > 0 assumed).

    An admissible off-diagonal direction R is drawn and scaled by a random
    fraction (sometimes the maximal one) of the largest step keeping B PSD.
    """
    n = a.n
    r = rng.standard_normal((n, n))
    r = np.triu(r, 1)
    r = r + r.T
    r = a.project(r)
    np.fill_diagonal(r, 0.0)
    if not np.any(r):
        return np.diag(w)
    s = 1.0 / np.sqrt(w)
    lmin = lambda_min(diag_scale(s, r))
    tmax = 1e6 if lmin >= 0 else -1.0 / lmin
    frac = 1.0 if rng.random() < 0.3 else rng.random()
    return np.diag(w) + frac * tmax * (1 - 1e-12) * r


def theta6_lower_search(g: Graph, variant, w=None, restarts: int = 100,
                        tol: float = 1e-6, seed: int = 0) -> Theta6Result:
    """Build B = D_sqrt(w)(Xbar) + Diag(w on V minus supp d) from the theta3
    optimum and sample random feasible B for comparison."""
    variant = Variant.parse(variant)
    w = _weights(g.n, w)
    a = cone_for_variant(g, variant)
    v3, xs = theta3(g, variant, w)
    if v3 <= 0:
        return Theta6Result(0.0, np.diag(w), 0.0, 0.0, 0, True)
    rep = optimum_identity_check(xs, w)
    sw = np.sqrt(w)
    off = (rep.d == 0).astype(float)
    b = diag_scale(sw, rep.xbar) + np.diag(w * off)
    np.fill_diagonal(b, w)   # exact diagonal (xbar has unit diagonal on supp d)
    feasible = (cone_member(a, b, tol) and is_psd(b, tol)
                and float(np.max(np.abs(np.diag(b) - w))) <= tol)
    value = lambda_max(b)
    rng = np.random.default_rng(seed)
    keep = np.flatnonzero(w > 0)
    ar = restrict_cone(a, keep)
    best = 0.0
    for _ in range(restarts):
        bb = random_feasible_b(ar, w[keep], rng)
        best = max(best, lambda_max(bb))
    return Theta6Result(value, b, v3, best, restarts, feasible)


# --- geometric representations --------------------------------------------------------

@dataclass
class GeometricRepresentation:
    u0: np.ndarray
    u: np.ndarray                 # columns u_1..u_n
    x: np.ndarray                 # the represented point (diag of the lift)
    checks: dict = field(default_factory=dict)

    def reproduced(self) -> np.ndarray:
        return (self.u0 @ self.u) ** 2

    def ok(self, tol: float = 5e-6) -> bool:
        return all(v <= tol for v in self.checks.values())


def extract_geometric_representation(g: Graph, variant, xhat, tol: float = 1e-9,
                                     zero_tol: float = 1e-9) -> GeometricRepresentation:
    """Unit vectors u_0..u_n with x_i = <u_0, u_i>^2 and the inner-product
    sign pattern of the variant's cone.

    xhat is snapped to the lifted body, factored as Y^T Y, and its columns
    normalized; columns of (numerically) zero norm get orthonormal vectors
    orthogonal to all the others.
    """
    a = cone_for_variant(g, variant)
    xh = repair_lift(xhat, a)
    x = np.diag(xh)[1:].copy()
    dec = eigen_sym(xh)
    lam = np.clip(dec.values, 0.0, None)
    y = np.sqrt(lam)[:, None] * dec.vectors.T        # (n+1) x (n+1), xh = Y^T Y
    norms = np.linalg.norm(y, axis=0)
    zero = norms <= np.sqrt(zero_tol)
    zero[0] = False
    u = np.zeros_like(y)
    u[:, ~zero] = y[:, ~zero] / norms[~zero]
    z = np.flatnonzero(zero)
    if z.size:
        span = u[:, ~zero]
        # orthonormal basis of the complement of span, from an SVD
        q, s, _ = np.linalg.svd(span, full_matrices=True)
        rank = int(np.sum(s > 1e-10 * max(s[0], 1e-300)))
        comp = q[:, rank:]
        if comp.shape[1] < z.size:
            raise ArithmeticError("not enough room to complete the representation")
        u[:, z] = comp[:, : z.size]
    u0, us = u[:, 0], u[:, 1:]
    gram = us.T @ us
    inner0 = u0 @ us
    checks = {
        "norms": float(np.max(np.abs(np.linalg.norm(u, axis=0) - 1.0))),
        "u0_sign": float(max(0.0, -np.min(inner0))),
        "pattern": _pattern_violation(a, gram),
        "reproduction": float(np.max(np.abs(inner0 ** 2 - x))),
        "lift_shift": float(np.max(np.abs(x - np.diag(np.asarray(xhat))[1:] / np.asarray(xhat)[0, 0]))),
    }
    return GeometricRepresentation(u0, us, x, checks)


# --- Luz-Schrijver -------------------------------------------------------------------

@dataclass
class LuzResult:
    value: float
    c: np.ndarray
    x: np.ndarray
    kkt_residual: float

    def __iter__(self):
        yield self.value
        yield self.c


def _luz_q(c, w):
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    if np.any(np.diag(c) != 0):
        raise ValueError("luz_upsilon_c needs diag(c) = 0")
    if np.any(c != 0):
        h = c / (-lambda_min(c))
    else:
        h = np.zeros((n, n))
    return diag_scale(np.sqrt(w), h + np.eye(n))


def luz_upsilon_c(c, w, tol: float = 1e-10):
    """(value, x*) of max 2<w,x> - x^T D_sqrt(w)(H_C + I) x over x >= 0."""
    w = np.asarray(w, dtype=float)
    q = _luz_q(c, w)
    rep = solve_qp_nonneg(q, w, tol)
    if rep.status is Status.UNBOUNDED:
        raise SolverError("quadratic program is unbounded", rep)
    return rep.value, rep.x


def luz_kkt_residual(c, w, x) -> float:
    """Residual of x >= 0, Qx >= w, x^T Q x = <w, x>."""
    w = np.asarray(w, dtype=float)
    q = _luz_q(c, w)
    return qp_kkt_residual(q, w, x)


def luz_theta(g: Graph, variant, w=None, tol: float = 1e-10) -> LuzResult:
    """theta of the given variant through the convex quadratic program.

    The relevant C ranges over the Delta-dual of the variant's cone with
    zero diagonal; the optimal C is minus the theta2 optimum Y.
    """
    w = _weights(g.n, w)
    _, _, y = theta2(g, variant, w)
    c = -y
    np.fill_diagonal(c, 0.0)
    value, x = luz_upsilon_c(c, w, tol)
    res = luz_kkt_residual(c, w, x)
    return LuzResult(value, c, x, res)
