"""Dense symmetric linear algebra.

The eigensolver is a cyclic Jacobi method.  It is slower than LAPACK but
accurate to working precision on the small matrices used here, and it is
what every certificate check in the package relies on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EigenDecomposition",
    "LinalgError",
    "eigen_sym",
    "eigvalsh",
    "lambda_max",
    "lambda_min",
    "is_psd",
    "psd_factor",
    "pinv_diag",
    "diag_scale",
    "symmetrize",
    "schur_complement_psd",
    "max_abs",
    "PSD_TOL",
]

PSD_TOL = 1e-9
MAX_ORDER = 64
MAX_SWEEPS = 100


class LinalgError(ArithmeticError):
    pass


@dataclass
class EigenDecomposition:
    values: np.ndarray   # descending
    vectors: np.ndarray  # columns, orthonormal

    def reconstruct(self) -> np.ndarray:
        q = self.vectors
        return (q * self.values) @ q.T


def max_abs(a) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _as_sym(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise LinalgError("matrix has non-finite entries")
    return a


def eigen_sym(a) -> EigenDecomposition:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Only the upper triangle is trusted; the input is symmetrized first.
    Eigenvalues are returned in descending order.
    """
    a = _as_sym(a)
    n = a.shape[0]
    if n > MAX_ORDER:
        raise LinalgError(f"order {n} exceeds {MAX_ORDER}")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    if n <= 1:
        return EigenDecomposition(np.diag(a).copy(), v)
    scale = max(max_abs(a), np.finfo(float).tiny)
    iu = np.triu_indices(n, 1)
    for sweep in range(MAX_SWEEPS):
        off = float(np.sqrt(np.sum(a[iu] ** 2)))
        if off <= 1e-17 * scale:
            break
        # threshold pass in early sweeps skips rotations that buy little
        thresh = 0.2 * off / n**2 if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh:
                    continue
                app, aqq = a[p, p], a[q, q]
                if sweep > 3 and abs(apq) < 1e-18 * (abs(app) + abs(aqq) + scale):
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        off = float(np.sqrt(np.sum(a[iu] ** 2)))
        raise LinalgError(f"Jacobi did not converge, off-diagonal norm {off:.3e}")
    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


def eigvalsh(a) -> np.ndarray:
    return eigen_sym(a).values


def lambda_max(a) -> float:
    return float(eigen_sym(a).values[0])


def lambda_min(a) -> float:
    return float(eigen_sym(a).values[-1])


def is_psd(a, tol: float = PSD_TOL) -> bool:
    """lambda_min(a) >= -tol, with tol taken relative to max(1, |a|_max)."""
    a = _as_sym(a)
    if a.size == 0:
        return True
    return lambda_min(a) >= -tol * max(1.0, max_abs(a))


def psd_factor(a, tol: float = PSD_TOL) -> np.ndarray:
    """Return B (r x n) with a = B^T B, via B = Lambda^{1/2} Q^T.

    Eigenvalues in [-tol, 0) are clamped to zero and rows for zero
    eigenvalues are dropped, so B has full row rank.
    """
    dec = eigen_sym(a)
    lam = dec.values
    bound = tol * max(1.0, max_abs(a))
    if lam.size and lam[-1] < -bound:
        raise LinalgError(f"matrix is not PSD: lambda_min = {lam[-1]:.3e}")
    keep = lam > bound * 1e-3 if lam.size else lam.astype(bool)
    lam = np.clip(lam[keep], 0.0, None)
    return np.sqrt(lam)[:, None] * dec.vectors[:, keep].T


def pinv_diag(d) -> np.ndarray:
    """Moore-Penrose pseudoinverse of Diag(d), returned as a vector."""
    d = np.asarray(d, dtype=float)
    out = np.zeros_like(d)
    nz = d != 0
    out[nz] = 1.0 / d[nz]
    return out


def diag_scale(h, x) -> np.ndarray:
    """D_h(X) = Diag(h) X Diag(h)."""
    h = np.asarray(h, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.shape != (h.size, h.size):
        raise LinalgError("scaling vector and matrix orders differ")
    return h[:, None] * x * h[None, :]


def symmetrize(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise LinalgError("symmetrize needs a square matrix")
    return 0.5 * (x + x.T)


def schur_complement_psd(xhat, tol: float = PSD_TOL) -> bool:
    """Is X - x x^T / x00 PSD, for xhat = [[x00, x^T], [x, X]]?"""
    xhat = _as_sym(xhat)
    x00 = xhat[0, 0]
    if x00 <= 0:
        raise LinalgError("schur_complement_psd needs xhat[0,0] > 0")
    x = xhat[1:, 0]
    return is_psd(xhat[1:, 1:] - np.outer(x, x) / x00, tol)
