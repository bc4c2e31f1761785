"""Small dense symmetric eigenproblems and composite Gauss-Legendre quadrature."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def jacobi_eigh(A, tol: float = 1e-14, max_sweeps: int = 64):
    """Eigen-decomposition of a small symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as columns.  ``A`` is symmetrized as ``(A + A.T) / 2`` first.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    if n == 0:
        return np.zeros(0), V
    scale = max(np.max(np.abs(A)), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = math.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # rotate rows/columns p and q
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap, Aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                A[p, q] = A[q, p] = 0.0
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    w = np.diag(A).copy()
    order = np.argsort(w)
    return w[order], V[:, order]


def min_eigen(A):
    """Smallest eigenvalue of a symmetric matrix and a unit eigenvector for it."""
    w, V = jacobi_eigh(A)
    if w.size == 0:
        return math.inf, np.zeros(0)
    return float(w[0]), V[:, 0]


def max_eigen(A) -> float:
    w, _ = jacobi_eigh(A)
    return float(w[-1]) if w.size else 0.0


@lru_cache(maxsize=None)
def _leggauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    # constants must integrate exactly
    w = w * (2.0 / math.fsum(w))
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gl_nodes(a: float, b: float, panels: int = 32, order: int = 8):
    """Nodes and weights of composite Gauss-Legendre on ``[a, b]``."""
    if panels < 1 or order < 1:
        raise ValueError("panels and order must be positive")
    x, w = _leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def integrate(f, a: float, b: float, panels: int = 32, order: int = 8) -> float:
    """Composite Gauss-Legendre integral of a vectorized ``f`` over ``[a, b]``."""
    nodes, weights = gl_nodes(a, b, panels, order)
    return float(np.dot(weights, f(nodes)))
