import math

import numpy as np
import pytest

from thetabody import graph as G
from thetabody.linalg import is_psd, lambda_max
from thetabody.solvers import (LinearProgram, SdpProblem, Status, pair_matrix, qp_kkt_residual,
                               solve_lp, solve_qp_nonneg, solve_sdp)
from oracles import odd_cycle_theta


def edge_rows(g):
    rows = []
    for i, j in sorted(g.edges):
        r = np.zeros(g.n)
        r[i - 1] = r[j - 1] = 1
        rows.append(r)
    return np.array(rows)


def test_lp_frac_c5():
    g = G.cycle(5)
    rep = solve_lp(LinearProgram(np.ones(5), edge_rows(g), ["<="] * 5, np.ones(5),
                                 upper=np.ones(5), maximize=True))
    assert rep.status is Status.OPTIMAL
    assert rep.value == pytest.approx(2.5, abs=1e-9)
    assert np.allclose(rep.x, 0.5)


def test_lp_clique_k3_and_box():
    rep = solve_lp(LinearProgram(np.ones(3), np.ones((1, 3)), ["<="], [1.0], maximize=True))
    assert rep.value == pytest.approx(1.0)
    rep = solve_lp(LinearProgram(np.ones(4), np.zeros((0, 4)), [], [], upper=np.ones(4),
                                 maximize=True))
    assert rep.value == pytest.approx(4.0)


def test_lp_infeasible_and_unbounded():
    rep = solve_lp(LinearProgram([1.0], [[1.0], [1.0]], ["<=", ">="], [1.0, 2.0]))
    assert rep.status is Status.INFEASIBLE
    rep = solve_lp(LinearProgram([1.0, 1.0], [[1.0, -1.0]], ["<="], [1.0], maximize=True))
    assert rep.status is Status.UNBOUNDED


def test_lp_rejects_bad_data():
    with pytest.raises(ValueError):
        LinearProgram([1.0], [[1.0]], ["<"], [1.0])
    with pytest.raises(ValueError):
        LinearProgram([1.0], [[np.nan]], ["<="], [1.0])


def test_lp_against_scipy():
    from scipy.optimize import linprog
    rng = np.random.default_rng(17)
    for _ in range(200):
        n, m = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        a = rng.integers(-3, 4, size=(m, n)).astype(float)
        x0 = rng.random(n)
        senses = list(rng.choice(["<=", ">=", "="], size=m, p=[.6, .2, .2]))
        b = a @ x0
        b = np.where(np.array(senses) == "<=", b + rng.random(m),
                     np.where(np.array(senses) == ">=", b - rng.random(m), b))
        upper = np.full(n, 5.0)
        c = rng.standard_normal(n)
        maximize = bool(rng.integers(2))
        rep = solve_lp(LinearProgram(c, a, senses, b, upper=upper, maximize=maximize))
        ub = [(a[k], b[k]) for k in range(m) if senses[k] == "<="]
        ub += [(-a[k], -b[k]) for k in range(m) if senses[k] == ">="]
        eq = [(a[k], b[k]) for k in range(m) if senses[k] == "="]
        ref = linprog(-c if maximize else c,
                      A_ub=np.array([r for r, _ in ub]) if ub else None,
                      b_ub=[v for _, v in ub] if ub else None,
                      A_eq=np.array([r for r, _ in eq]) if eq else None,
                      b_eq=[v for _, v in eq] if eq else None,
                      bounds=[(0, 5)] * n, method="highs")
        assert ref.status == 0
        want = -ref.fun if maximize else ref.fun
        assert rep.status is Status.OPTIMAL
        assert rep.value == pytest.approx(want, abs=1e-7 * (1 + abs(want)))
        assert abs(rep.value - rep.dual_value) <= 1e-9 * (1 + abs(rep.value))


def theta3_problem(g, w):
    n = g.n
    sw = np.sqrt(w)
    signs = [(i - 1, j - 1, "=") for i, j in g.edges]
    return SdpProblem(n, np.outer(sw, sw), eqs=[(np.eye(n), 1.0)], signs=signs)


def test_sdp_rank_one():
    n = 4
    rep = solve_sdp(SdpProblem(n, np.ones((n, n)) / n, eqs=[(np.eye(n), 1.0)]))
    assert rep.status is Status.OPTIMAL
    assert rep.value == pytest.approx(1.0, abs=1e-7)
    assert np.allclose(rep.x, np.ones((n, n)) / n, atol=1e-4)


@pytest.mark.parametrize("n", [5, 7])
def test_sdp_odd_cycles(n):
    rep = solve_sdp(theta3_problem(G.cycle(n), np.ones(n)))
    assert rep.status is Status.OPTIMAL
    assert rep.value == pytest.approx(odd_cycle_theta(n), abs=1e-6)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_sdp_complete(n):
    rep = solve_sdp(theta3_problem(G.complete(n), np.ones(n)))
    assert rep.value == pytest.approx(1.0, abs=1e-7)


def test_sdp_certificates():
    rng = np.random.default_rng(5)
    for _ in range(10):
        g = G.random_graph(int(rng.integers(3, 8)), 0.5, rng)
        rep = solve_sdp(theta3_problem(g, rng.random(g.n)), tol=1e-8)
        assert rep.status is Status.OPTIMAL
        assert is_psd(rep.x, 1e-8) and is_psd(rep.s, 1e-8)
        assert float(np.sum(rep.x * rep.s)) <= 1e-8 * g.n
        assert rep.gap <= 1e-8
        for i, j in g.edges:
            assert abs(rep.x[i - 1, j - 1]) <= 1e-8


def test_sdp_dual_matches_eigenvalue():
    # min lambda with lambda I - C - sum t E_ij PSD: the optimal lambda is the value
    g = G.cycle(5)
    rep = solve_sdp(theta3_problem(g, np.ones(5)))
    y = rep.y[0]
    t = np.zeros((5, 5))
    for (i, j), v in rep.t.items():
        t += v * pair_matrix(5, i, j)
    assert y == pytest.approx(math.sqrt(5), abs=1e-6)
    assert lambda_max(np.ones((5, 5)) + t) == pytest.approx(y, abs=1e-6)


def test_sdp_validates_input():
    with pytest.raises(ValueError):
        SdpProblem(2, np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        SdpProblem(2, np.eye(2), signs=[(0, 2, "=")])


def test_qp_examples():
    x, v = solve_qp_nonneg(np.eye(3), np.ones(3))
    assert np.allclose(x, 1) and v == pytest.approx(3)
    x, v = solve_qp_nonneg(np.eye(3), np.zeros(3))
    assert np.allclose(x, 0) and v == pytest.approx(0)
    x, v = solve_qp_nonneg(2 * np.eye(4), np.ones(4))
    assert np.allclose(x, 0.5) and v == pytest.approx(2)


def test_qp_kkt_random():
    rng = np.random.default_rng(21)
    for _ in range(100):
        n = int(rng.integers(1, 9))
        m = rng.standard_normal((n, n))
        q = m @ m.T + 0.1 * np.eye(n)
        w = rng.standard_normal(n)
        rep = solve_qp_nonneg(q, w)
        assert rep.status is Status.OPTIMAL
        assert np.all(rep.x >= 0)
        assert qp_kkt_residual(q, w, rep.x) <= 1e-8
        # at the optimum the objective equals <w, x>
        assert rep.value == pytest.approx(float(w @ rep.x), abs=1e-8 * (1 + abs(rep.value)))
