import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thetabody import graph as G
from thetabody import linalg as L
from oracles import numpy_spectrum


def test_jacobi_against_numpy():
    rng = np.random.default_rng(7)
    worst_rec = worst_orth = worst_val = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 21))
        a = rng.standard_normal((n, n))
        a = a + a.T
        dec = L.eigen_sym(a)
        scale = 1 + L.max_abs(a)
        worst_rec = max(worst_rec, L.max_abs(dec.reconstruct() - a) / scale)
        worst_orth = max(worst_orth, L.max_abs(dec.vectors.T @ dec.vectors - np.eye(n)))
        worst_val = max(worst_val, L.max_abs(dec.values - numpy_spectrum(a)) / scale)
        assert np.all(np.diff(dec.values) <= 0)
    assert worst_rec <= 1e-10
    assert worst_orth <= 1e-10
    assert worst_val <= 1e-10


def test_c5_spectrum():
    vals = L.eigvalsh(G.cycle(5).adjacency())
    assert vals[0] == pytest.approx(2, abs=1e-12)
    assert vals[-1] == pytest.approx(2 * math.cos(4 * math.pi / 5), abs=1e-12)
    assert vals[-1] == pytest.approx(-1.618034, abs=1e-6)


def test_trivial_spectra():
    assert np.allclose(L.eigvalsh(np.eye(3)), 1)
    vals = L.eigvalsh(np.ones((4, 4)))
    assert np.allclose(vals, [4, 0, 0, 0], atol=1e-12)


def test_eigen_rejects_bad_input():
    with pytest.raises(L.LinalgError):
        L.eigen_sym(np.ones((2, 3)))
    with pytest.raises(L.LinalgError):
        L.eigen_sym(np.array([[np.nan]]))
    with pytest.raises(L.LinalgError):
        L.eigen_sym(np.eye(65))


def test_is_psd_examples():
    assert not L.is_psd([[1, 2], [2, 1]])
    assert L.is_psd(np.zeros((3, 3)))
    assert L.is_psd(np.ones((5, 5)))


def test_psd_factor_examples():
    b = L.psd_factor(np.eye(3))
    assert np.allclose(b.T @ b, np.eye(3))
    b = L.psd_factor(np.ones((2, 2)))
    assert b.shape == (1, 2) and np.allclose(np.abs(b), 1)
    b = L.psd_factor(np.diag([4.0, 9.0]))
    assert np.allclose(np.sort(np.abs(b).sum(axis=0)), [2, 3])
    with pytest.raises(L.LinalgError):
        L.psd_factor([[1, 2], [2, 1]])


def test_psd_factor_random():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(1, 12))
        r = int(rng.integers(1, n + 1))
        m = rng.standard_normal((r, n))
        a = m.T @ m
        b = L.psd_factor(a)
        assert L.max_abs(b.T @ b - a) <= 1e-8 * (1 + L.max_abs(a))


def test_pinv_diag():
    assert np.allclose(L.pinv_diag([2, 0, 5]), [0.5, 0, 0.2])
    assert np.all(L.pinv_diag(np.zeros(3)) == 0)
    assert np.all(L.pinv_diag(np.ones(4)) == 1)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.one_of(st.just(0.0), st.floats(1e-6, 1e6)), min_size=1, max_size=10))
def test_pinv_diag_support_identity(d):
    d = np.array(d)
    assert np.allclose(d * L.pinv_diag(d), (d > 0).astype(float), atol=1e-12)


def test_diag_scale_examples():
    x = np.array([[1.0, 2.0], [2.0, 3.0]])
    assert np.array_equal(L.diag_scale(np.ones(2), x), x)
    assert np.array_equal(L.diag_scale(np.zeros(2), x), np.zeros((2, 2)))
    assert np.array_equal(L.diag_scale([1, 2], np.ones((2, 2))), [[1, 2], [2, 4]])


def test_diag_scale_composition_and_psd():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(1, 10))
        m = rng.standard_normal((n, n))
        x = m @ m.T
        h, k = rng.random(n) * 3, rng.random(n) * 3
        lhs = L.diag_scale(h, L.diag_scale(k, x))
        assert L.max_abs(lhs - L.diag_scale(h * k, x)) <= 1e-14 * (1 + L.max_abs(lhs))
        assert L.is_psd(L.diag_scale(h, x))


def test_symmetrize():
    x = np.array([[1.0, 2.0], [2.0, 5.0]])
    assert np.array_equal(L.symmetrize(x), x)
    e12 = np.zeros((3, 3))
    e12[0, 1] = 1
    s = L.symmetrize(e12)
    assert s[0, 1] == s[1, 0] == 0.5
    a = np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert np.array_equal(L.symmetrize(a), np.zeros((2, 2)))


def test_schur_complement_psd():
    x = np.array([0.3, 0.7])
    xh = np.block([[np.ones((1, 1)), x[None, :]], [x[:, None], np.outer(x, x)]])
    assert L.schur_complement_psd(xh)
    assert not L.schur_complement_psd([[1, 1], [1, 0]])
    assert L.schur_complement_psd([[1, .5, .5], [.5, .5, 0], [.5, 0, .5]])
    with pytest.raises(L.LinalgError):
        L.schur_complement_psd([[0, 1], [1, 1]])
