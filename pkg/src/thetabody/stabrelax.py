"""STAB, QSTAB and FRAC as corner oracles, the fractional chromatic number,
and certificate checks for their copositive / completely positive theta
body descriptions."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import corners
from .cones import (BaseCone, Verdict, cone_for_variant, cone_member,
                    copositive_verify, cp_verify_factorization, lift,
                    psd_lift_member, schur_lift_member, Variant)
from .graph import (Graph, best_stable_set, indicator, maximal_cliques, maximal_stable_sets,
                    enumerate_stable_sets)
from .solvers import LinearProgram, Status, SolverError, solve_lp

__all__ = [
    "stab_oracle",
    "qstab_oracle",
    "frac_oracle",
    "chi_fractional",
    "ChiResult",
    "frac_theta_body_check",
    "stab_cp_identity_check",
    "qstab_copositive_identity_check",
    "qstab_witness",
    "frac_lift",
    "chi_fractional_copositive_certificate",
    "lp_vertices",
]

POLY_LIMIT = 20


def _guard(g: Graph, limit: int, what: str):
    if g.n > limit:
        raise ValueError(f"{what} is limited to n <= {limit} (got {g.n})")


def _weights(g: Graph, w) -> np.ndarray:
    w = np.ones(g.n) if w is None else np.asarray(w, dtype=float)
    if w.shape != (g.n,) or np.any(w < 0):
        raise ValueError("weights must be a nonnegative vector of length n")
    return w


def _lp(c, rows, b, upper=None) -> tuple:
    """max c^T x over rows x <= b, 0 <= x <= upper; returns (value, x, y)."""
    rep = solve_lp(LinearProgram(c=np.asarray(c, float), a=np.asarray(rows, float),
                                 senses=["<="] * len(rows), b=np.asarray(b, float),
                                 upper=upper, maximize=True))
    if rep.status is not Status.OPTIMAL:
        raise SolverError(f"LP ended with {rep.status.value}", rep)
    return rep.value, rep.x, rep.y


def _inequality_oracle(n, rows, tag, upper=None):
    rows = np.asarray(rows, dtype=float).reshape(-1, n)

    def member(x, tol=1e-9):
        x = np.asarray(x, dtype=float)
        if np.any(x < -abs(tol)):
            return False
        if upper is not None and np.any(x > upper + tol):
            return False
        return bool(rows.size == 0 or np.all(rows @ x <= 1.0 + tol))

    def support_point(w):
        w = np.maximum(np.asarray(w, dtype=float), 0.0)
        if rows.size == 0:
            ub = np.ones(n) if upper is None else upper
            return float(w @ ub), ub.copy()
        val, x, _ = _lp(w, rows, np.ones(len(rows)), upper)
        return val, x

    return corners.CornerOracle(n, member, lambda w: support_point(w)[0], tag,
                                support_point=support_point, extras={"rows": rows})


def stab_oracle(g: Graph) -> corners.CornerOracle:
    """STAB(G): membership by LP over maximal stable sets, support = alpha."""
    _guard(g, POLY_LIMIT, "STAB")
    gens = np.array([indicator(m, g.n) for m in maximal_stable_sets(g)])

    def member(x, tol=1e-9):
        # x <= sum_S l_S chi^S with sum l_S <= 1 (STAB is down-closed)
        x = np.asarray(x, dtype=float)
        if np.any(x < -abs(tol)):
            return False
        k = len(gens)
        a = np.vstack([-gens.T, np.ones((1, k))])
        b = np.concatenate([-(np.maximum(x, 0.0) - abs(tol)), [1.0]])
        rep = solve_lp(LinearProgram(c=np.zeros(k), a=a, senses=["<="] * len(b), b=b))
        return rep.status is Status.OPTIMAL

    def support_point(w):
        w = np.maximum(np.asarray(w, dtype=float), 0.0)
        val, mask = best_stable_set(g, w)
        return val, indicator(mask, g.n)

    return corners.CornerOracle(g.n, member, lambda w: support_point(w)[0], "STAB",
                                support_point=support_point, extras={"generators": gens})


def qstab_oracle(g: Graph) -> corners.CornerOracle:
    """QSTAB(G): nonnegative points satisfying every maximal clique inequality."""
    _guard(g, POLY_LIMIT, "QSTAB")
    rows = [indicator(m, g.n) for m in maximal_cliques(g)]
    return _inequality_oracle(g.n, rows, "QSTAB")


def frac_oracle(g: Graph) -> corners.CornerOracle:
    """FRAC(G): [0,1]^V cut by the edge inequalities."""
    rows = []
    for i, j in sorted(g.edges):
        r = np.zeros(g.n)
        r[i - 1] = r[j - 1] = 1.0
        rows.append(r)
    return _inequality_oracle(g.n, rows, "FRAC", upper=np.ones(g.n))


# --- fractional chromatic number -----------------------------------------------

@dataclass
class ChiResult:
    value: float
    x: np.ndarray                    # optimal point of QSTAB(complement)
    cover: dict                      # stable set mask -> weight (LP dual)
    gap: float

    def __float__(self):
        return float(self.value)


def chi_fractional(g: Graph, w=None, tol: float = 1e-9) -> ChiResult:
    """chi*(G; w) = support of QSTAB(complement of G) at w.

    The LP runs over the maximal cliques of the complement, i.e. the
    maximal stable sets of G; its dual is a fractional stable-set cover.
    """
    _guard(g, POLY_LIMIT, "chi_fractional")
    w = _weights(g, w)
    masks = maximal_stable_sets(g)
    rows = [indicator(m, g.n) for m in masks]
    val, x, y = _lp(w, rows, np.ones(len(rows)))
    cover = {m: float(v) for m, v in zip(masks, y) if v > tol}
    gap = abs(val - float(np.sum(y)))
    covered = np.zeros(g.n)
    for m, v in cover.items():
        covered += v * indicator(m, g.n)
    if np.any(covered < w - 1e3 * tol * (1 + np.max(w))) or np.any(y < -tol):
        raise SolverError("LP dual is not a fractional cover", y)
    return ChiResult(val, x, cover, gap)


def _exact_cover(cover: dict, w: np.ndarray, n: int) -> list:
    """Shrink sets of a fractional cover until it covers w exactly.

    Subsets of stable sets are stable, so the result is still a stable-set
    cover with the same total weight.
    """
    items = [[m, v] for m, v in cover.items() if v > 0]
    for i in range(n):
        bit = 1 << i
        excess = sum(v for m, v in items if m & bit) - w[i]
        k = 0
        while excess > 0 and k < len(items):
            m, v = items[k]
            if m & bit and v > 0:
                a = min(v, excess)
                items[k][1] = v - a
                items.append([m & ~bit, a])
                excess -= a
            k += 1
    merged: dict = {}
    for m, v in items:
        if v > 0:
            merged[m] = merged.get(m, 0.0) + v
    return sorted(merged.items())


@dataclass
class ChiCertificate:
    lam: float
    lp_value: float
    factors: list                    # nonnegative vectors of length n+1
    lifted: np.ndarray               # [[1, sqrt(w)^T], [sqrt(w), lam I - Y]]
    y: np.ndarray
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def chi_fractional_copositive_certificate(g: Graph, w=None,
                                          tol: float = 1e-9) -> ChiCertificate:
    """Feasible (lam, Y) for the completely positive form of chi*(G; w).

    From an exact fractional cover y_S with total lam, the factors
    sqrt(y_S/lam) (+) sqrt(lam y_S) chi^S / sqrt(w) sum to a lifted matrix
    with corner 1, border sqrt(w) and lower block lam I - Y, Y supported on
    the non-edges.  Vertices of zero weight get the extra factor
    0 (+) sqrt(lam) e_i.
    """
    _guard(g, 10, "chi_fractional_copositive_certificate")
    w = _weights(g, w)
    n = g.n
    if not np.any(w > 0):
        z = np.zeros((n + 1, n + 1))
        z[0, 0] = 1.0
        f = [np.eye(n + 1)[0]]
        return ChiCertificate(0.0, 0.0, f, z, np.zeros((n, n)), {"empty": True})
    res = chi_fractional(g, w)
    lam = float(sum(res.cover.values()))
    cover = _exact_cover(res.cover, w, n)
    sw = np.sqrt(w)
    inv = np.where(w > 0, 1.0 / np.where(w > 0, sw, 1.0), 0.0)
    factors = []
    for m, y in cover:
        f = np.zeros(n + 1)
        f[0] = np.sqrt(y / lam)
        f[1:] = np.sqrt(lam * y) * indicator(m, n) * inv
        factors.append(f)
    for i in np.flatnonzero(w == 0):
        f = np.zeros(n + 1)
        f[i + 1] = np.sqrt(lam)
        factors.append(f)
    lifted = np.zeros((n + 1, n + 1))
    lifted[0, 0] = 1.0
    lifted[0, 1:] = lifted[1:, 0] = sw
    built = sum(np.outer(f, f) for f in factors)
    diag_lam = built[1:, 1:].diagonal()
    y = lam * np.eye(n) - built[1:, 1:]
    lifted[1:, 1:] = built[1:, 1:]
    off_e = max((abs(y[i - 1, j - 1]) for i, j in g.edges), default=0.0)
    scale = tol * max(1.0, lam)
    checks = {
        "lp_strong_duality": res.gap <= 1e3 * tol * (1 + lam),
        "factorization": cp_verify_factorization(lifted, factors, scale * 10),
        "border": bool(np.max(np.abs(built[0, 1:] - sw)) <= scale * 10),
        "corner": abs(built[0, 0] - 1.0) <= scale * 10,
        "diagonal_lambda": bool(np.max(np.abs(diag_lam - lam)) <= scale * 10),
        "y_zero_on_edges": off_e <= scale * 10,
        "value_matches_lp": abs(lam - res.value) <= 1e3 * tol * (1 + lam),
    }
    y[np.abs(y) < 1e-15] = 0.0
    return ChiCertificate(lam, res.value, factors, lifted, y, checks)


# --- FRAC as a Schur-lifted theta body --------------------------------------------

def lp_vertices(oracle: corners.CornerOracle, count: int, rng) -> list:
    """Vertices of an LP-backed corner from random objectives (signs mixed)."""
    out = []
    for _ in range(count):
        c = rng.standard_normal(oracle.n)
        rows = oracle.extras["rows"]
        upper = np.ones(oracle.n) if oracle.tag == "FRAC" else None
        if rows.size == 0:
            out.append((c > 0).astype(float))
            continue
        _, x, _ = _lp(c, rows, np.ones(len(rows)), upper)
        out.append(x)
    return out


def frac_lift(g: Graph, x) -> np.ndarray:
    """Lift of a half-integral FRAC point: X_ij = [ij non-edge][x_i + x_j > 1] x_i x_j."""
    x = np.asarray(x, dtype=float)
    big = np.diag(x)
    for i, j in g.non_edges():
        if x[i - 1] + x[j - 1] > 1.0:
            big[i - 1, j - 1] = big[j - 1, i - 1] = x[i - 1] * x[j - 1]
    return lift(x, big)


@dataclass
class FracReport:
    vertices: int
    non_half_integral: list
    rejected_lifts: list
    members_sampled: int
    members_accepted: int
    projection_violations: list

    @property
    def ok(self) -> bool:
        return not (self.non_half_integral or self.rejected_lifts or self.projection_violations)


def frac_theta_body_check(g: Graph, samples: int = 200, tol: float = 1e-9,
                          seed: int = 0) -> FracReport:
    """FRAC(G) against the theta body over the Schur lifting of Q2.

    (a) LP vertices of FRAC are half-integral and their lifts are members
    of the lifted body; (b) random lifted members project into FRAC.
    """
    if not 2 <= g.n <= 14:
        raise ValueError("frac_theta_body_check needs 2 <= n <= 14")
    rng = np.random.default_rng(seed)
    fr = frac_oracle(g)
    a = cone_for_variant(g, Variant.TH)
    verts = lp_vertices(fr, samples, rng) + [np.zeros(g.n)]
    bad_half, bad_lift = [], []
    for x in verts:
        if np.max(np.abs(2 * x - np.round(2 * x))) > tol:
            bad_half.append(x)
            continue
        xh = frac_lift(g, np.round(2 * x) / 2)
        if not (schur_lift_member(BaseCone.QUAD2, xh, tol) and cone_member(a, xh[1:, 1:], tol)):
            bad_lift.append(x)
    accepted, violations = 0, []
    for k in range(samples):
        if k % 2 == 0 and verts:
            # near FRAC: convex combination of vertices, rescaled
            lam = rng.dirichlet(np.ones(len(verts)))
            x = np.clip(lam @ np.array(verts) * rng.uniform(0.6, 1.15), 0, 1)
        else:
            x = rng.random(g.n)
        big = np.zeros((g.n, g.n))
        v = np.sqrt(np.clip(x - x * x, 0, None))
        for i, j in g.non_edges():
            r = rng.uniform(-1, 1)
            big[i - 1, j - 1] = big[j - 1, i - 1] = x[i - 1] * x[j - 1] + r * v[i - 1] * v[j - 1]
        np.fill_diagonal(big, x)
        if schur_lift_member(BaseCone.QUAD2, lift(x, big), 1e-12):
            accepted += 1
            if not fr.member(x, 1e-9):
                violations.append(x)
    return FracReport(len(verts), bad_half, bad_lift, samples, accepted, violations)


# --- STAB via the completely positive cone -------------------------------------------

@dataclass
class StabCpReport:
    stable_sets: int
    failed_lifts: list
    values: list                   # (w, alpha, constructed, upper)
    tol: float

    @property
    def max_error(self) -> float:
        return max((abs(a - c) for _, a, c, _ in self.values), default=0.0)

    @property
    def ok(self) -> bool:
        brackets = all(c <= u + 1e-6 * (1 + u) for _, _, c, u in self.values)
        return not self.failed_lifts and self.max_error <= self.tol and brackets


def stab_cp_identity_check(g: Graph, samples: int = 5, tol: float = 1e-6,
                           seed: int = 0, upper: bool = True) -> StabCpReport:
    """Both directions of STAB(G) = TH(A(E,E), PSD-lift of CP) at certificate level.

    Every stable set gives the rank-one lift (1 + chi^S)(1 + chi^S)^T.  For
    weights w, the optimizer sqrt(u)/|sqrt(u)| with u = w on a heaviest stable
    set reaches alpha(G; w); the doubly nonnegative relaxation bounds the
    program from above.
    """
    _guard(g, 14, "stab_cp_identity_check")
    from .theta import theta3       # local import: theta pulls in the SDP stack
    a = cone_for_variant(g, Variant.TH)
    failed = []
    masks = enumerate_stable_sets(g)
    for m in masks:
        f = np.concatenate([[1.0], indicator(m, g.n)])
        if not psd_lift_member(BaseCone.CP, a, np.outer(f, f), 1e-12, factors=[f[1:]]):
            failed.append(m)
    rng = np.random.default_rng(seed)
    values = []
    for k in range(samples):
        w = np.ones(g.n) if k == 0 else rng.random(g.n)
        alpha, best = best_stable_set(g, w)
        u = w * indicator(best, g.n)
        xbar = np.sqrt(u) / np.linalg.norm(np.sqrt(u)) if np.any(u > 0) else np.eye(g.n)[0]
        x = np.outer(xbar, xbar)
        feasible = (abs(np.trace(x) - 1) <= 1e-12 and cone_member(a, x, 1e-14)
                    and cp_verify_factorization(x, [xbar], 1e-12))
        sw = np.sqrt(w)
        val = float(sw @ x @ sw) if feasible else -np.inf
        up = theta3(g, Variant.TH_PRIME, w)[0] if upper else np.inf
        values.append((w, alpha, val, up))
    return StabCpReport(len(masks), failed, values, tol)


# --- QSTAB via the copositive cone ---------------------------------------------------

def qstab_witness(g: Graph, x) -> np.ndarray:
    """Bounded lift of x: X = D_x(D^-1 + A), A_ij = (1/x_i + 1/x_j)/2 on the
    non-edges inside supp(x).  So X_ii = x_i, X_ij = (x_i + x_j)/2 there and
    0 elsewhere."""
    x = np.asarray(x, dtype=float)
    big = np.diag(x)
    for i, j in g.non_edges():
        if x[i - 1] > 0 and x[j - 1] > 0:
            big[i - 1, j - 1] = big[j - 1, i - 1] = 0.5 * (x[i - 1] + x[j - 1])
    return lift(x, big)


@dataclass
class QstabReport:
    points: int
    verdicts: dict                      # verdict -> count for the witnesses
    refuted: list                       # points whose witness got VERIFIED_NO
    norm_violations: list
    members_sampled: int
    members_certified: int
    clique_violations: list
    inconclusive: int

    def ok(self, strict: bool = False) -> bool:
        hard = self.refuted or self.norm_violations or self.clique_violations
        return not hard and (not strict or self.inconclusive == 0)


def qstab_copositive_identity_check(g: Graph, samples: int = 30, tol: float = 1e-9,
                                    seed: int = 0) -> QstabReport:
    """QSTAB(G) against the theta body over the Schur lifting of COP.

    Extreme points of QSTAB get the explicit bounded witness, whose Schur
    complement X - xx^T must not be refuted as copositive.  Random lifted
    matrices certified copositive must project into QSTAB.
    """
    _guard(g, 10, "qstab_copositive_identity_check")
    rng = np.random.default_rng(seed)
    q = qstab_oracle(g)
    a = cone_for_variant(g, Variant.TH)
    pts = [np.ones(g.n) / max(1, g.n)] + lp_vertices(q, samples, rng)
    verdicts = {v.value: 0 for v in Verdict}
    refuted, norm_bad = [], []
    for x in pts:
        xh = qstab_witness(g, x)
        if np.max(np.abs(xh)) > 1 + tol or not cone_member(a, xh[1:, 1:], tol):
            norm_bad.append(x)
        v = copositive_verify(xh[1:, 1:] - np.outer(x, x), tol)
        verdicts[v.verdict.value] += 1
        if v.verdict is Verdict.NO:
            refuted.append((x, v.witness))
    certified, violations = 0, []
    rows = q.extras["rows"]
    for k in range(samples):
        lam = rng.dirichlet(np.ones(len(pts)))
        x = np.clip(lam @ np.array(pts) * rng.uniform(0.7, 1.2), 0, 1)
        big = np.diag(x)
        for i, j in g.non_edges():
            big[i - 1, j - 1] = big[j - 1, i - 1] = 0.5 * (x[i - 1] + x[j - 1]) * rng.uniform(0.6, 1.4)
        v = copositive_verify(big - np.outer(x, x), tol)
        if v.verdict is Verdict.YES:
            certified += 1
            if rows.size and np.max(rows @ x) > 1 + 1e-7:
                violations.append(x)
    inconclusive = verdicts[Verdict.UNDECIDED.value]
    return QstabReport(len(pts), verdicts, refuted, norm_bad, samples, certified,
                       violations, inconclusive)
