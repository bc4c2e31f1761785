import math

import numpy as np
import pytest

from diffeometric.constructions import (WarpSpec, euclidean, m_space, plus_space, sum_space,
                                        warped_product, y_space)
from diffeometric.core import eval_plot
from diffeometric.distance import (INF, Joint, PathSegment, PathValidationError, PiecewisePath,
                                   SearchConfig, certified_length, concat_paths, lipschitz_pairs,
                                   lipschitz_probe, path_length, pseudodistance_upper, refine_path,
                                   straight_path, transition_graph, validate_path)


def test_straight_segment_length():
    E, g = euclidean(2)
    p = straight_path(E, E.point(0, [0, 0]), E.point(0, [3, 4]))
    assert abs(path_length(p, g) - 5.0) <= 1e-12


def test_constant_path_length():
    E, g = euclidean(2)
    x = E.point(0, [1, 1])
    assert path_length(straight_path(E, x, x), g) == 0.0


def test_circle_polygon_converges_to_two_pi():
    E, g = euclidean(2)
    t = np.linspace(0, 1, 4097)
    ctrl = np.stack([np.cos(2 * math.pi * t), np.sin(2 * math.pi * t)], 1)
    x = E.point(0, [1.0, 0.0])
    p = PiecewisePath([PathSegment(0, ctrl)], [], x, eval_plot(E, 0, ctrl[-1]))
    assert abs(path_length(p, g) - 2 * math.pi) < 1e-5


def test_smoothed_profile_keeps_length():
    E, g = euclidean(2)
    ctrl = np.array([[0, 0], [1, 2], [3, 1], [4, 4.0]])
    p = PiecewisePath([PathSegment(0, ctrl)], [], E.point(0, ctrl[0]), E.point(0, ctrl[-1]))
    assert abs(path_length(p.smoothed(), g) - path_length(p, g)) < 1e-12


def test_refinement_straightens_zigzag():
    E, g = euclidean(2)
    ctrl = np.array([[0, 0], [0.5, 0.1], [0.2, 0.6], [0.9, 0.5], [1, 1.0]])
    p = PiecewisePath([PathSegment(0, ctrl)], [], E.point(0, [0, 0]), E.point(0, [1, 1]))
    before = path_length(p, g)
    after = path_length(refine_path(p, g), g)
    assert after < before and abs(after - math.sqrt(2)) < 1e-6


def test_refinement_fixed_point():
    E, g = euclidean(2)
    p = straight_path(E, E.point(0, [0, 0]), E.point(0, [1, 1]), n_control=5)
    assert abs(path_length(refine_path(p, g), g) - path_length(p, g)) <= 1e-12


def test_plus_space_joint_path_refines_to_five():
    P, g = plus_space()
    a = PathSegment(0, np.array([[-2.0], [-1.0], [0.0]]))
    b = PathSegment(1, np.array([[0.0], [1.5], [3.0]]))
    path = PiecewisePath([a, b], [Joint(0, True, np.zeros(0))], P.point(0, -2.0), P.point(1, 3.0))
    assert abs(path_length(refine_path(path, g), g) - 5.0) < 1e-9


def test_validation_rejects_broken_joint():
    Y, g = y_space()
    a = PathSegment(0, np.array([[0.0], [1.0]]))
    b = PathSegment(1, np.array([[1.0], [0.0]]))
    path = PiecewisePath([a, b], [Joint()], Y.point(0, 0.0), Y.point(1, 0.0))
    with pytest.raises(PathValidationError, match="joint 0"):
        validate_path(Y, path)


def test_transition_graphs():
    E, _ = euclidean(3)
    G = transition_graph(E)
    assert len(G.nodes) == 1 and not G.edges
    Y, _ = y_space()
    G = transition_graph(Y)
    assert len(G.nodes) == 2 and len(G.edges) == 1
    assert np.all(G.edges[0].anchors > 1.0)
    P, _ = plus_space()
    G = transition_graph(P)
    assert len(G.edges) == 1 and G.edges[0].anchors.shape == (1, 0)


def test_euclidean_bound():
    E, g = euclidean(2)
    res = pseudodistance_upper(E, g, E.point(0, [0, 0]), E.point(0, [3, 4]))
    assert 5.0 <= res.bound <= 5.0 + 1e-6
    assert abs(path_length(res.path, g, panels=64) - 5.0) < 1e-8


def test_y_space_schedule():
    Y, g = y_space()
    res = pseudodistance_upper(Y, g, Y.point(0, 1.0), Y.point(1, 1.0), SearchConfig(refinement_levels=6))
    for L, b in enumerate(res.trace, 1):
        assert b <= 2.0 / 2 ** (L - 1) + 1e-6
    assert res.bound <= 0.04
    validate_path(Y, res.path)


def test_sum_space_is_infinite():
    S, g = sum_space([euclidean(1), euclidean(1)])
    res = pseudodistance_upper(S, g, S.point(0, 0.0), S.point(1, 0.0))
    assert res.bound == INF and res.path is None


def test_m_space_bound_above_infimum():
    M, g = m_space()
    res = pseudodistance_upper(M, g, M.point(0, 0.0), M.point(1, [3.0, 4.0]))
    inf = 1 + 2 * math.sqrt(5)
    assert inf <= res.bound <= inf + 0.05


def test_certified_length_rounds_outward():
    E, g = euclidean(2)
    p = straight_path(E, E.point(0, [0, 0]), E.point(0, [3, 4]))
    bound, raw, smooth, witness = certified_length(p, g, SearchConfig())
    assert bound >= max(raw, smooth) and bound >= 5.0


def test_candidates_give_symmetry_and_triangle():
    P, g = plus_space()
    pts = [P.point(0, -2.0), P.point(1, 3.0), P.point(0, 1.5)]
    cfg = SearchConfig(refinement_levels=2)
    d = {}
    for i, x in enumerate(pts):
        for j, y in enumerate(pts):
            if i != j:
                d[i, j] = pseudodistance_upper(P, g, x, y, cfg)
    for (i, j), r in d.items():
        back = pseudodistance_upper(P, g, pts[i], pts[j], cfg, candidates=[d[j, i].path.reversed()])
        assert abs(back.bound - d[j, i].bound) <= 1e-6 or back.bound <= d[j, i].bound
    via = pseudodistance_upper(P, g, pts[0], pts[1], cfg,
                               candidates=[concat_paths(d[0, 2].path, d[2, 1].path)])
    assert via.bound <= d[0, 2].bound + d[2, 1].bound + 1e-6


def test_lipschitz_probe_values():
    E, g = euclidean(2)
    assert lipschitz_probe(g, 0, ([-1, -1], [1, 1])) == 1.0
    R, g4 = euclidean(1, [[4.0]])
    assert lipschitz_probe(g4, 0, ([-1], [1])) == 2.0
    X, gX = euclidean(1)
    W, gW = warped_product(X, gX, X, gX, WarpSpec.exp2x(X))
    assert abs(lipschitz_probe(gW, 0, ([0, -1], [1, 1])) - math.e) < 1e-15


def test_lipschitz_pairs_respect_bound():
    R, g4 = euclidean(1, [[4.0]])
    for r, rp, bound, kd in lipschitz_pairs(g4, 0, ([-1], [1]), 2.0, pair_samples=20):
        assert bound <= kd + 1e-6


def test_threads_do_not_change_result():
    M, g = m_space()
    a = pseudodistance_upper(M, g, M.point(0, 0.0), M.point(1, [3, 4]), SearchConfig(threads=1, refinement_levels=2))
    b = pseudodistance_upper(M, g, M.point(0, 0.0), M.point(1, [3, 4]), SearchConfig(threads=4, refinement_levels=2))
    assert a.trace == b.trace
