import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffeometric.constructions import euclidean, plus_space, point_space, sum_space, y_space
from diffeometric.core import (BoundaryError, ChartDomain, ChartMap, DomainError, Factorization,
                               FactorizationError, SmoothMap, TangentDouble, eval_plot,
                               factorize_map, jacobian, points_equal)

coord = st.floats(-20, 20, allow_nan=False)


def test_identity_plot_value():
    E, _ = euclidean(2)
    p = eval_plot(E, 0, [1, 2])
    assert p.plot_index == 0 and p.coords == (1.0, 2.0)


def test_y_space_glued_region_identifies():
    Y, _ = y_space()
    assert points_equal(Y, eval_plot(Y, 0, 2.0), eval_plot(Y, 1, 2.0))


def test_y_space_doubled_point_stays_apart():
    Y, _ = y_space()
    assert not points_equal(Y, eval_plot(Y, 0, 1.0), eval_plot(Y, 1, 1.0))


def test_plus_space_equality():
    P, _ = plus_space()
    assert points_equal(P, P.point(0, 0.0), P.point(1, 0.0))
    assert not points_equal(P, P.point(0, 1.0), P.point(1, 1.0))


def test_outside_domain_raises():
    dom = ChartDomain.interval(0, 1)
    from diffeometric.core import DiffeoSpace, Plot
    S = DiffeoSpace([Plot(dom)])
    with pytest.raises(DomainError):
        eval_plot(S, 0, 2.0)


def test_canonical_is_lowest_plot():
    Y, _ = y_space()
    p = eval_plot(Y, 1, 3.0)
    assert p.plot_index == 0 and p.coords == (3.0,)


@settings(max_examples=60, deadline=None)
@given(a=coord, b=coord, c=coord, i=st.integers(0, 1), j=st.integers(0, 1), k=st.integers(0, 1))
def test_equality_is_an_equivalence_on_y_space(a, b, c, i, j, k):
    Y, _ = y_space()
    p, q, r = eval_plot(Y, i, a), eval_plot(Y, j, b), eval_plot(Y, k, c)
    assert points_equal(Y, p, p)
    assert points_equal(Y, p, q) == points_equal(Y, q, p)
    if points_equal(Y, p, q) and points_equal(Y, q, r):
        assert points_equal(Y, p, r)


def test_linear_jacobian():
    f = ChartMap.linear(ChartDomain(1), ChartDomain(1), [[2.0]])
    assert np.allclose(jacobian(f, 3.0), [[2.0]])


def test_hand_jacobian_via_finite_differences():
    f = ChartMap(ChartDomain(2), ChartDomain(2), lambda r: np.array([r[0] ** 2, r[0] * r[1]]))
    assert np.allclose(jacobian(f, [1.0, 2.0]), [[2, 0], [2, 1]], atol=1e-8)


def test_identity_jacobian():
    f = ChartMap.identity(ChartDomain(3))
    assert np.array_equal(f.jacobian([0.3, -1, 7]), np.eye(3))


def test_fd_near_boundary_raises():
    f = ChartMap(ChartDomain.interval(0, 1), ChartDomain(1), lambda r: r)
    with pytest.raises(BoundaryError):
        f.fd_jacobian([1e-7])


@settings(max_examples=40, deadline=None)
@given(x=st.floats(-2, 2), y=st.floats(-2, 2))
def test_chain_rule_matches_finite_differences(x, y):
    g = ChartMap(ChartDomain(2), ChartDomain(2), lambda r: np.array([np.sin(r[0]) * r[1], r[0] + r[1] ** 3]),
                 lambda r: np.array([[np.cos(r[0]) * r[1], np.sin(r[0])], [1.0, 3 * r[1] ** 2]]))
    f = ChartMap(ChartDomain(2), ChartDomain(2), lambda r: np.array([np.exp(r[0] / 3), r[0] * r[1]]),
                 lambda r: np.array([[np.exp(r[0] / 3) / 3, 0.0], [r[1], r[0]]]))
    h = g.compose(f)
    fd = ChartMap(ChartDomain(2), ChartDomain(2), lambda r: h(r)).fd_jacobian([x, y])
    assert np.allclose(h.jacobian([x, y]), fd, atol=1e-6 * (1 + np.abs(fd).max()))


def test_tangent_double_make():
    t = TangentDouble.make(0, [1, 2], [3, 4], 5)
    assert t.r == (1.0, 2.0) and t.w == (5.0,)


def test_inclusion_factorizes_globally():
    R1, _ = euclidean(1)
    R2, _ = euclidean(2)
    h = ChartMap(R1.plots[0].domain, R2.plots[0].domain, lambda r: np.array([r[0], 0.0]))
    inc = SmoothMap(R1, R2, lambda k, r: Factorization(math.inf, 0, h))
    fac = factorize_map(inc, 0, [0.0])
    assert math.isinf(fac.radius) and fac.target_plot == 0
    assert np.allclose(fac.h([2.5]), [2.5, 0.0])


def test_quotient_map_factorizes_through_first_copy():
    Y, _ = y_space()
    S, _ = sum_space([euclidean(1), euclidean(1)])
    q = SmoothMap(S, Y, lambda k, r: Factorization(math.inf, k, ChartMap.identity(Y.plots[k].domain)),
                  lambda p: eval_plot(Y, p.plot_index, p.coords))
    fac = factorize_map(q, 0, [5.0])
    assert fac.target_plot == 0


def test_constant_map_to_point():
    E, _ = euclidean(2)
    pt, _ = point_space()
    h = ChartMap(E.plots[0].domain, pt.plots[0].domain, lambda r: np.zeros(0))
    c = SmoothMap(E, pt, lambda k, r: Factorization(math.inf, 0, h))
    assert factorize_map(c, 0, [1.0, -4.0]).target_plot == 0


def test_factorization_checked_against_value():
    E, _ = euclidean(1)
    bad = ChartMap.linear(E.plots[0].domain, E.plots[0].domain, [[2.0]])
    phi = SmoothMap(E, E, lambda k, r: Factorization(1.0, 0, bad), lambda p: p)
    with pytest.raises(FactorizationError):
        factorize_map(phi, 0, [1.0])
