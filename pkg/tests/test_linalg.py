import math

import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from diffeometric.linalg import gl_nodes, integrate, jacobi_eigh, min_eigen


@settings(max_examples=80, deadline=None)
@given(arrays(float, (5, 5), elements=st.floats(-10, 10)))
def test_jacobi_matches_lapack(A):
    S = 0.5 * (A + A.T)
    w, V = jacobi_eigh(S)
    assert np.allclose(w, np.linalg.eigvalsh(S), atol=1e-9 * (1 + np.abs(S).max()))
    assert np.allclose(V.T @ V, np.eye(5), atol=1e-10)
    assert np.allclose(S @ V, V * w, atol=1e-8 * (1 + np.abs(S).max()))


def test_min_eigen_of_degenerate_diag():
    lam, v = min_eigen(np.diag([1.0, 0.0]))
    assert lam == 0.0 and abs(abs(v[1]) - 1) < 1e-15


def test_empty_matrix():
    w, V = jacobi_eigh(np.zeros((0, 0)))
    assert w.size == 0 and V.shape == (0, 0)


def test_quadrature_constants_and_polynomials():
    nodes, weights = gl_nodes(0.0, 1.0, 1, 8)
    assert math.fsum(weights) == 1.0
    assert abs(integrate(lambda t: t ** 15, 0, 1, 1, 8) - 1 / 16) < 1e-15


def test_quadrature_periodic():
    assert abs(integrate(lambda t: np.cos(t) ** 2, 0, 2 * math.pi) - math.pi) < 1e-13
