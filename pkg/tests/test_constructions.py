import math

import numpy as np
import pytest

from diffeometric.constructions import (ConstructionError, WarpSpec, axis_glue, adjunction,
                                        embedded_space, euclidean, glue_euclidean, m_space,
                                        plus_space, product, subspace, sum_space, warped_product,
                                        y_space)
from diffeometric.core import ChartDomain, ChartMap, eval_plot, points_equal


def test_euclidean_defaults():
    _, g = euclidean(2)
    assert g(0, [9.0, -3.0], [1, 0], [1, 0]) == 1.0


def test_euclidean_rejects_bad_tensor():
    with pytest.raises(ConstructionError):
        euclidean(2, [[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ConstructionError):
        euclidean(1, [[-1.0]])


def test_product_is_unwarped():
    X, gX = euclidean(1)
    Y, gY = euclidean(1)
    _, g = product(X, gX, Y, gY)
    assert g(0, [0, 0], [1, 0], [1, 0]) == 1.0


def test_warped_exp2x_value():
    X, gX = euclidean(1)
    Y, gY = euclidean(1)
    _, g = warped_product(X, gX, Y, gY, WarpSpec.exp2x(X))
    assert math.isclose(g(0, [1, 5], [0, 1], [0, 1]), math.e ** 2, rel_tol=1e-15)
    assert g(0, [1, 5], [1, 0], [1, 0]) == 1.0


def test_warp_must_be_positive():
    X, gX = euclidean(1)
    Y, gY = euclidean(1)
    with pytest.raises(ConstructionError):
        warped_product(X, gX, Y, gY, WarpSpec([lambda r: r[0]]))


def test_warped_over_glued_base():
    Yx, gYx = y_space()
    R, gR = euclidean(1)
    W, g = warped_product(Yx, gYx, R, gR, WarpSpec.exp2x(Yx))
    assert points_equal(W, eval_plot(W, 0, [2.0, 1.0]), eval_plot(W, 1, [2.0, 1.0]))
    assert not points_equal(W, eval_plot(W, 0, [1.0, 1.0]), eval_plot(W, 1, [1.0, 1.0]))


def test_named_adjunctions_build():
    for build in (y_space, plus_space, m_space):
        S, g = build()
        assert S.n_plots == 2 and len(S.glue_table) == 1


def test_incompatible_metrics_rejected_with_deviation_three():
    with pytest.raises(ConstructionError) as exc:
        glue_euclidean(1, 1, 1.0, math.inf, right_tensor=[[4.0]])
    assert math.isclose(exc.value.deviation, 3.0)
    assert exc.value.worst is not None


def test_point_attachment_ignores_tensors():
    S, _ = glue_euclidean(1, 1, 0.0, 0.0, right_tensor=[[4.0]])
    assert points_equal(S, S.point(0, 0.0), S.point(1, 0.0))


def test_m_space_identification():
    M, g = m_space()
    assert points_equal(M, M.point(0, 3.0), M.point(1, [3.0, 0.0]))
    assert not points_equal(M, M.point(0, 3.0), M.point(1, [3.0, 0.1]))
    assert not points_equal(M, M.point(0, 0.5), M.point(1, [0.5, 0.0]))


def test_adjunction_of_custom_equality_spaces():
    from diffeometric.mapping import mapping_pushout
    N, gN = euclidean(2)
    S, g, iota = mapping_pushout(N, gN)
    const_left = S.point(1, [1.0, 2.0, 0, 0, 0, 0])
    const_right = S.point(3, [1.0, 2.0, 0, 0, 0, 0])
    moving = S.point(3, [1.0, 2.0, 1.0, 0, 0, 0])
    assert points_equal(S, const_left, const_right)
    assert points_equal(S, iota(N.point(0, [1.0, 2.0])), const_right)
    assert not points_equal(S, const_left, moving)


def test_embedded_unit_circle():
    R2, g = euclidean(2)
    ang = ChartMap(ChartDomain(1), R2.plots[0].domain,
                   lambda t: np.array([math.cos(t[0]), math.sin(t[0])]),
                   lambda t: np.array([[-math.sin(t[0])], [math.cos(t[0])]]))
    S, inc = embedded_space(R2, [(0, ang)])
    _, gs = subspace(R2, g, inc)
    assert math.isclose(gs(0, [0.3], 1, 1), 1.0)
    assert points_equal(S, S.point(0, 0.0), S.point(0, 2 * math.pi))


def test_interval_subspace_restricts():
    R, g = euclidean(1)
    inc_map = ChartMap(ChartDomain.interval(0, 1), R.plots[0].domain, lambda t: t, lambda t: np.eye(1))
    S, inc = embedded_space(R, [(0, inc_map)])
    _, gs = subspace(R, g, inc)
    assert gs(0, [0.5], 2.0, 3.0) == 6.0


def test_sum_space():
    S, g = sum_space([euclidean(1), euclidean(1)])
    assert not points_equal(S, S.point(0, 0.0), S.point(1, 0.0))
    single = euclidean(2)
    assert sum_space([single]) is single


def test_axis_glue_at_a_single_point():
    X, gX = euclidean(2)
    Y, gY = euclidean(1)
    S, g = adjunction(X, gX, Y, gY, axis_glue(X, Y, 0.5, 0.5))
    assert points_equal(S, S.point(0, [0.5, 0.0]), S.point(1, 0.5))
