"""Acceptance criteria, one test per criterion; each also reports a PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from diffeometric import reproduce
from diffeometric.constructions import (WarpSpec, embedded_space, euclidean, m_space, plus_space,
                                        product, warped_product, y_space)
from diffeometric.core import ChartMap, eval_plot
from diffeometric.distance import (SearchConfig, concat_paths, lipschitz_pairs, lipschitz_probe,
                                   path_length, pseudodistance_upper, straight_path)
from diffeometric.mapping import mapping_distance_lower_bound
from diffeometric.metric import NaturalityPair, check_naturality, definiteness_check, pullback
from diffeometric.spaces import build


def report(key, ok, detail):
    ACCEPTANCE[key] = (bool(ok), detail)
    print(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_1_euclidean_oracle():
    E, g = euclidean(2)
    x, y = E.point(0, [0, 0]), E.point(0, [3, 4])
    t = time.perf_counter()
    res = pseudodistance_upper(E, g, x, y)
    dt = time.perf_counter() - t
    chord = path_length(straight_path(E, x, y), g)
    ok = 5.0 <= res.bound <= 5.0 + 1e-6 and dt <= 10 and abs(chord - 5.0) <= 1e-8
    report(1, ok, f"bound={res.bound!r} chord={chord!r} time={dt:.2f}s")


def test_2_y_space_schedule():
    Y, g = y_space()
    t = time.perf_counter()
    res = pseudodistance_upper(Y, g, Y.point(0, 1.0), Y.point(1, 1.0), SearchConfig(refinement_levels=6))
    dt = time.perf_counter() - t
    monotone = all(b <= a for a, b in zip(res.trace, res.trace[1:]))
    within = all(b <= 2.0 ** (2 - L) + 1e-6 for L, b in enumerate(res.trace, 1))
    ok = monotone and within and res.trace[-1] <= 0.07 and dt <= 30
    report(2, ok, f"trace={[f'{b:.6g}' for b in res.trace]} time={dt:.2f}s")


def test_3_plus_space():
    P, g = plus_space()
    res = pseudodistance_upper(P, g, P.point(0, -2.0), P.point(1, 3.0))
    rng = np.random.default_rng(11)
    cfg = SearchConfig(refinement_levels=2)
    worst = math.inf
    for _ in range(12):
        i, j = rng.integers(0, 2, 2)
        a, b = rng.uniform(-3, 3, 2)
        if i == j:
            true = abs(a - b)
        else:
            true = abs(a) + abs(b)
        if true <= 1e-3:
            continue
        bound = pseudodistance_upper(P, g, P.point(int(i), a), P.point(int(j), b), cfg).bound
        worst = min(worst, bound)
    ok = 5.0 <= res.bound <= 5.0 + 1e-4 and worst > 1e-3
    report(3, ok, f"bound={res.bound!r} smallest distinct-point bound={worst:.6g}")


def test_4_section_pullback():
    t = time.perf_counter()
    out = reproduce.loop_section(samples=100)
    dt = time.perf_counter() - t
    dev = out.records[0]["value"]
    report(4, dev <= 1e-6 and dt <= 5, f"max|s*g - 2pi g_N|={dev:.3g} time={dt:.2f}s")


@pytest.mark.xfail(strict=True, reason="the claimed identity c*g = g_vee fails with the dtheta volume form")
def test_5_concatenation_isometry():
    t = time.perf_counter()
    out = reproduce.concatenation(samples=50)
    dt = time.perf_counter() - t
    plain, weighted = out.records[0]["value"], out.records[1]["value"]
    report(5, plain <= 1e-6 and dt <= 20,
           f"relative deviation={plain:.3g} (pinch-density variant {weighted:.3g}) time={dt:.2f}s")


def test_6_mapping_space_distance_bounds():
    LN, g = build({"primitive": "loopspace", "n": 2, "degree": 1})
    trig = LN.n_plots - 1
    p = eval_plot(LN, trig, [0, 0, 0, 0, 0, 0])
    q = eval_plot(LN, trig, [1, 0, 0, 0, 0, 0])
    lower = mapping_distance_lower_bound(LN.loop(p), LN.loop(q))
    cfg = SearchConfig(control_points_per_segment=2, refinement_levels=1)
    upper = pseudodistance_upper(LN, g, p, q, cfg).bound
    target = math.sqrt(2 * math.pi)
    ok = abs(lower - target) <= 1e-9 and upper <= target + 1e-3 and lower <= upper
    report(6, ok, f"lower={lower!r} upper={upper!r} sqrt(2pi)={target!r}")


def test_7_warped_product():
    X, gX = euclidean(1)
    Y, gY = euclidean(1)
    W, gW = warped_product(X, gX, Y, gY, WarpSpec.exp2x(X))
    rep = definiteness_check(gW, per_axis=9, windows={0: ([-1.0, -5.0], [1.0, 5.0])})
    floor = min(1.0, math.exp(-2.0)) - 1e-9
    _, g1 = warped_product(X, gX, Y, gY, WarpSpec.constant(X, 1.0))
    _, gP = product(X, gX, Y, gY)
    rng = np.random.default_rng(0)
    exact = all(g1(0, r, v, w) == gP(0, r, v, w)
                for r, v, w in (rng.uniform(-5, 5, (3, 2)) for _ in range(1000)))
    ok = rep.verdict == "definite" and rep.min_eigenvalue >= floor and exact
    report(7, ok, f"verdict={rep.verdict} min eigenvalue={rep.min_eigenvalue:.6g} f=1 exact={exact}")


def _naturality_100():
    X, g = euclidean(2, lambda r: np.array([[2 + math.sin(r[0]), 0.2 * math.cos(r[1])],
                                            [0.2 * math.cos(r[1]), 1.5 + r[0] ** 2]]))
    dom = X.plots[0].domain
    rng = np.random.default_rng(8)
    charts, pairs = [(0, ChartMap.identity(dom))], []
    for k in range(100):
        A, b, c = rng.normal(size=(2, 2)), rng.normal(size=2), rng.uniform(-0.3, 0.3, 2)
        val = lambda r, A=A, b=b, c=c: A @ r + b + c * np.sin(r)
        jac = lambda r, A=A, c=c: A + np.diag(c * np.cos(r))
        charts.append((0, ChartMap(dom, dom, val)))
        pairs.append(NaturalityPair(k + 1, 0, ChartMap(dom, dom, val, jac)))
    S, inc = embedded_space(X, charts)
    return check_naturality(pullback(inc, g), pairs, samples=1, seed=8)


def _bilinearity():
    _, g = euclidean(3, lambda r: np.eye(3) * (1 + r[0] ** 2) + 0.1 * np.outer(r, r))
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(200):
        r, v, w, u = rng.normal(size=(4, 3))
        a, b = rng.normal(size=2)
        sym = abs(g(0, r, v, w) - g(0, r, w, v))
        lin = abs(g(0, r, a * v + b * u, w) - a * g(0, r, v, w) - b * g(0, r, u, w))
        scale = max(1.0, abs(g(0, r, v, w)), abs(g(0, r, u, w)))
        worst = max(worst, sym, lin / scale)
    return worst


def _bounds_consistency():
    worst_sym, worst_tri = 0.0, 0.0
    cfg = SearchConfig(refinement_levels=2)
    for S, g, pts in [(*plus_space(), [(0, -2.0), (1, 3.0), (0, 1.0)]),
                      (*y_space(), [(0, 0.5), (1, 0.5), (0, 3.0)]),
                      (*m_space(), [(0, 0.0), (1, [3.0, 4.0]), (1, [2.0, -1.0])])]:
        P = [S.point(i, c) for i, c in pts]
        d = {(i, j): pseudodistance_upper(S, g, P[i], P[j], cfg)
             for i in range(3) for j in range(3) if i != j}
        for (i, j), r in d.items():
            # each direction competes with the reversal of the other
            fwd = pseudodistance_upper(S, g, P[i], P[j], cfg, candidates=[d[j, i].path.reversed()])
            bwd = pseudodistance_upper(S, g, P[j], P[i], cfg, candidates=[fwd.path.reversed()])
            worst_sym = max(worst_sym, abs(fwd.bound - bwd.bound))
        for i, j, k in [(0, 1, 2), (0, 2, 1), (1, 2, 0)]:
            via = pseudodistance_upper(S, g, P[i], P[k], cfg,
                                       candidates=[concat_paths(d[i, j].path, d[j, k].path)])
            worst_tri = max(worst_tri, via.bound - (d[i, j].bound + d[j, k].bound))
    return worst_sym, worst_tri


def _lipschitz():
    X, gX = euclidean(1)
    W, gW = warped_product(X, gX, X, gX, WarpSpec.exp2x(X))
    cases = [(euclidean(2)[1], ([-2, -2], [2, 2]), 1.0),
             (euclidean(1, [[4.0]])[1], ([-2], [2]), 2.0),
             (gW, ([0, -1], [1, 1]), math.e)]
    worst = -math.inf
    for g, region, expect in cases:
        k = lipschitz_probe(g, 0, region)
        assert abs(k - expect) <= 1e-12
        for _, _, bound, kd in lipschitz_pairs(g, 0, region, k, pair_samples=200):
            worst = max(worst, bound - kd)
    return worst


def test_8_property_suites():
    nat = _naturality_100()
    bil = _bilinearity()
    sym, tri = _bounds_consistency()
    lip = _lipschitz()
    ok = (nat.samples == 100 and nat.max_deviation <= 1e-4 and bil <= 1e-10
          and sym <= 1e-6 and tri <= 1e-6 and lip <= 1e-6)
    report(8, ok, f"naturality={nat.max_deviation:.3g} bilinear/symmetric={bil:.3g} "
                  f"symmetry={sym:.3g} triangle excess={tri:.3g} lipschitz excess={lip:.3g}")
