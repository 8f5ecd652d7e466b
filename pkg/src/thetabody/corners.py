"""Convex corners given by oracles: antiblockers, gauges, min-max ratios.

A convex corner is a compact, lower-comprehensive convex subset of the
nonnegative orthant with nonempty interior.  Corners are handled only
through a membership test and a support function, which lets
LP-backed polytopes and SDP-backed theta bodies share the same code.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .solvers import LinearProgram, solve_lp, Status

__all__ = [
    "CornerOracle",
    "RatioValue",
    "max_ratio",
    "antiblocker",
    "gauge",
    "min_max_ratio",
    "check_corner_axioms",
    "check_involution",
    "cutting_plane_abl_support",
    "box_corner",
    "simplex_corner",
    "AxiomReport",
    "InvolutionReport",
]

GAUGE_ITERS = 60


@dataclass
class CornerOracle:
    """Membership/support description of a convex corner in R^n.

    ``member(x, tol)`` decides x in C up to ``tol`` (a negative tol asks for
    a point safely inside).  ``support(w)`` is max <w, x> over C.  The
    optional hooks give exact gauges and maximizers when a backend has them.
    """

    n: int
    member: Callable[[np.ndarray, float], bool]
    support: Callable[[np.ndarray], float]
    tag: str = "CUSTOM"
    gauge_hook: Optional[Callable[[np.ndarray], float]] = None
    support_point: Optional[Callable[[np.ndarray], tuple]] = None  # w -> (value, x)
    extras: dict = field(default_factory=dict)

    def __repr__(self):
        return f"CornerOracle({self.tag}, n={self.n})"


@dataclass
class RatioValue:
    value: float                   # may be +inf
    witness: Optional[np.ndarray] = None

    @property
    def finite(self) -> bool:
        return bool(np.isfinite(self.value))

    def __float__(self):
        return float(self.value)


def max_ratio(w, x) -> float:
    """max_i w_i / x_i with 0/0 = 0 and positive/0 = +inf."""
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    best = 0.0
    for wi, xi in zip(w, x):
        if wi == 0:
            continue
        if xi <= 0:
            return np.inf
        best = max(best, wi / xi)
    return best


def _nonneg(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    return w


def gauge(c: CornerOracle, w, tol: float = 1e-9, interior: bool = False,
          use_hook: bool = True) -> float:
    """min { lam >= 0 : w in lam C }.

    Uses the oracle's exact gauge when it has one; otherwise bisects on
    membership.  With ``interior`` the bisection queries strict-interior
    membership instead of closure membership.
    """
    w = _nonneg(w)
    if not np.any(w > 0):
        return 0.0
    if use_hook and c.gauge_hook is not None and not interior:
        return float(c.gauge_hook(w))
    mtol = -tol if interior else tol
    eps = 1.0 / (2 * c.n)
    hi = float(np.max(w)) / eps
    while not c.member(w / hi, mtol):
        hi *= 2.0
        if hi > 1e15:
            raise ArithmeticError("gauge bracket diverged; oracle is not a corner")
    lo = 0.0
    for _ in range(GAUGE_ITERS):
        mid = 0.5 * (lo + hi)
        if c.member(w / mid, mtol):
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    return hi


def min_max_ratio(c: CornerOracle, w, tol: float = 1e-9) -> RatioValue:
    """min over x in C of max_i w_i/x_i.

    The optimum equals the gauge and is attained at x = w / gauge, which is
    returned as the witness (its ratio is evaluated with the 0/0 = 0
    convention off the support of w).
    """
    w = _nonneg(w)
    if not np.any(w > 0):
        return RatioValue(0.0, np.zeros_like(w))
    g = gauge(c, w, tol)
    if g <= 0:
        return RatioValue(np.inf, None)
    return RatioValue(g, w / g)


def antiblocker(c: CornerOracle, tol: float = 1e-9) -> CornerOracle:
    """abl(C) = {y >= 0 : <y, x> <= 1 for all x in C}."""

    def member(y, t=tol):
        y = np.asarray(y, dtype=float)
        if np.any(y < -abs(t)):
            return False
        return c.support(np.maximum(y, 0.0)) <= 1.0 + t

    def support(w):
        return gauge(c, w, tol)

    def hook(w):
        # gauge of abl(C) is the support function of C
        return c.support(w)

    return CornerOracle(c.n, member, support, tag=f"abl({c.tag})", gauge_hook=hook,
                        extras={"inner": c})


def cutting_plane_abl_support(c: CornerOracle, x, tol: float = 1e-9,
                              max_cuts: int = 500) -> float:
    """max <x, y> over y in abl(C), by Kelley cutting planes.

    Needs ``c.support_point``.  Each round solves an LP over the cuts
    collected so far and asks C for a point violating the candidate y.
    """
    if c.support_point is None:
        raise ValueError("oracle has no support_point hook")
    x = _nonneg(x)
    n = c.n
    eps = 1.0 / (2 * n)
    cuts = [np.full(n, eps)]          # eps*e is in C
    for _ in range(max_cuts):
        lp = LinearProgram(c=x, a=np.array(cuts), senses=["<="] * len(cuts),
                           b=np.ones(len(cuts)), maximize=True)
        rep = solve_lp(lp)
        if rep.status is not Status.OPTIMAL:
            raise ArithmeticError(f"cutting plane LP failed: {rep.status}")
        y = rep.x
        val, v = c.support_point(y)
        if val <= 1.0 + tol:
            return rep.value
        cuts.append(np.asarray(v, dtype=float))
    raise ArithmeticError("cutting planes did not converge")


# --- checks ---------------------------------------------------------------

@dataclass
class AxiomReport:
    ok: bool
    failures: list = field(default_factory=list)   # (axiom, witness)
    checked: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def _boundary_points(c, rng, k, tol):
    pts = []
    for _ in range(k):
        u = rng.exponential(size=c.n) * (rng.random(c.n) < 0.8)
        if not np.any(u > 0):
            u[rng.integers(c.n)] = 1.0
        g = gauge(c, u, tol)
        pts.append(u / g)
    return pts


def check_corner_axioms(c: CornerOracle, samples: int = 50, tol: float = 1e-7,
                        seed: int = 0) -> AxiomReport:
    """Randomized test of the convex-corner axioms for an oracle."""
    rng = np.random.default_rng(seed)
    n = c.n
    fails = []
    counts = dict.fromkeys(["zero", "bounded", "interior", "comprehensive",
                            "convex", "homogeneous"], 0)
    if not c.member(np.zeros(n), tol):
        fails.append(("zero", np.zeros(n)))
    if abs(c.support(np.zeros(n))) > tol:
        fails.append(("support(0)", np.zeros(n)))
    counts["zero"] += 1
    extent = np.array([c.support(np.eye(n)[i]) for i in range(n)])
    if not np.all(np.isfinite(extent)):
        fails.append(("bounded", extent))
    counts["bounded"] += 1
    eps = 1.0 / (2 * n)
    if not c.member(np.full(n, eps), tol):
        fails.append(("interior", np.full(n, eps)))
    counts["interior"] += 1

    members = []
    for b in _boundary_points(c, rng, samples, tol):
        members.append(b * rng.random())
        members.append(b * (1 - 1e-6))
    center = 0.5 * extent
    for x in members:
        if np.any(x > extent + tol):
            fails.append(("bounded", x))
        y = x * rng.random(n)
        counts["comprehensive"] += 1
        if not c.member(y, tol):
            fails.append(("comprehensive", (x, y)))
    for _ in range(samples):
        i, j = rng.integers(len(members), size=2)
        a, b = members[i], members[j]
        counts["convex"] += 1
        if not c.member(0.5 * (a + b), tol):
            fails.append(("convex", (a, b)))
        # reflected pairs probe the centre of the bounding box
        r = 2 * center - a
        if np.all(r >= 0) and c.member(a, tol) and c.member(r, tol):
            counts["convex"] += 1
            if not c.member(0.5 * (a + r), tol):
                fails.append(("convex", (a, r)))
    for _ in range(max(1, samples // 5)):
        w = rng.random(n)
        t = rng.uniform(0.1, 10)
        counts["homogeneous"] += 1
        lhs, rhs = c.support(t * w), t * c.support(w)
        if abs(lhs - rhs) > tol * max(1.0, abs(rhs)) * 10:
            fails.append(("homogeneous", (w, t)))
    return AxiomReport(not fails, fails, counts)


@dataclass
class InvolutionReport:
    ok: bool
    points: int = 0
    directions: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def check_involution(c: CornerOracle, samples: int = 100, tol: float = 1e-7,
                     seed: int = 0, band: float = 1e-4) -> InvolutionReport:
    """Compare C with abl(abl(C)) on sampled points and directions.

    Membership of x in abl(abl(C)) is decided from the support of abl(C)
    at x, computed through the gauge of C, and, when the oracle exposes
    maximizers, independently by cutting planes over abl(C).  Points
    within ``band`` of the boundary are skipped.
    """
    rng = np.random.default_rng(seed)
    a1 = antiblocker(c, tol)
    a2 = antiblocker(a1, tol)
    rep = InvolutionReport(True)
    for _ in range(samples):
        u = rng.exponential(size=c.n) * (rng.random(c.n) < 0.85)
        if not np.any(u > 0):
            u[rng.integers(c.n)] = 1.0
        g = gauge(c, u, tol)
        x = u * rng.uniform(0.3, 1.7) / g
        gx = gauge(c, x, tol)
        if abs(gx - 1.0) < band:
            rep.skipped += 1
            continue
        rep.points += 1
        inside = c.member(x, tol)
        via_abl = a2.member(x, tol)
        verdicts = [inside, via_abl]
        if c.support_point is not None:
            verdicts.append(cutting_plane_abl_support(c, x, tol) <= 1.0 + tol)
        if len(set(verdicts)) != 1:
            rep.failures.append(("member", x, verdicts))
    for _ in range(max(1, samples // 4)):
        w = rng.random(c.n)
        rep.directions += 1
        s0 = c.support(w)
        s2 = gauge(a1, w, tol, use_hook=False)   # bisection over abl(C)
        if abs(s0 - s2) > 10 * tol * max(1.0, s0):
            rep.failures.append(("support", w, (s0, s2)))
    rep.ok = not rep.failures
    return rep


# --- elementary corners -------------------------------------------------------

def box_corner(n: int) -> CornerOracle:
    """[0,1]^n."""

    def member(x, tol=1e-9):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= -abs(tol)) and np.all(x <= 1 + tol))

    def support(w):
        return float(np.sum(np.maximum(w, 0)))

    def point(w):
        x = (np.asarray(w) > 0).astype(float)
        return float(np.asarray(w) @ x), x

    return CornerOracle(n, member, support, "BOX",
                        gauge_hook=lambda w: float(np.max(w)), support_point=point)


def simplex_corner(n: int) -> CornerOracle:
    """{x >= 0 : sum x <= 1}."""

    def member(x, tol=1e-9):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= -abs(tol)) and np.sum(x) <= 1 + tol)

    def support(w):
        return float(max(np.max(w), 0.0))

    def point(w):
        x = np.zeros(n)
        x[int(np.argmax(w))] = 1.0
        return float(np.max(w)), x

    return CornerOracle(n, member, support, "SIMPLEX",
                        gauge_hook=lambda w: float(np.sum(w)), support_point=point)
