"""Named worked examples, each returning a JSON-ready record and a pass flag."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import constructions as C
from .distance import SearchConfig, pseudodistance_upper
from .mapping import (TWO_PI, LoopSpace, concatenate, mapping_metric_eval, mapping_pushout,
                      pinch_density, polynomial_wedge_family, section_s, trig_family,
                      wedge_metric_eval)
from .metric import definiteness_check, pullback


@dataclass
class Outcome:
    """A finished example: JSON records, optional CSV trace rows, and whether it met its tolerance."""

    passed: bool
    records: list
    rows: list = field(default_factory=list)
    witness: Optional[dict] = None


def _record(op, inputs, value, tolerance, **extra):
    return {"op": op, "inputs": inputs, "value": value, "tolerance": tolerance, **extra}


def _distance(space, g, x, y, levels, seed, name):
    cfg = SearchConfig(refinement_levels=levels, seed=seed)
    res = pseudodistance_upper(space, g, x, y, cfg)
    rows = [(k + 1, b, f"{name}-L{k + 1}") for k, b in enumerate(res.trace)]
    witness = {"paths": [{"path_id": f"{name}-L{k + 1}",
                          "path": None if p is None else p.to_json()}
                         for k, p in enumerate(res.level_paths)]}
    return res, rows, witness


def euclidean(levels=5, seed=0, tol=1e-6):
    E, g = C.euclidean(2)
    res, rows, wit = _distance(E, g, E.point(0, [0.0, 0.0]), E.point(0, [3.0, 4.0]), levels, seed,
                               "euclidean")
    ok = 5.0 <= res.bound <= 5.0 + tol
    rec = _record("pseudodistance_upper", {"space": "R2", "from": [0, 0], "to": [3, 4]},
                  res.bound, tol, expected=5.0, passed=ok)
    return Outcome(ok, [rec], rows, wit)


def y_space(levels=6, seed=0, tol=1e-6):
    Y, g = C.y_space()
    res, rows, wit = _distance(Y, g, Y.point(0, 1.0), Y.point(1, 1.0), levels, seed, "y-space")
    schedule = [2.0 ** (2 - L) + tol for L in range(1, levels + 1)]
    monotone = all(b <= a for a, b in zip(res.trace, res.trace[1:]))
    ok = monotone and all(b <= s for b, s in zip(res.trace, schedule))
    rec = _record("pseudodistance_upper", {"space": "Y", "from": "1:1", "to": "2:1"},
                  res.bound, tol, expected=0.0, trace=res.trace, schedule=schedule,
                  monotone=monotone, passed=ok)
    return Outcome(ok, [rec], rows, wit)


def plus_space(levels=5, seed=0, tol=1e-4):
    P, g = C.plus_space()
    res, rows, wit = _distance(P, g, P.point(0, -2.0), P.point(1, 3.0), levels, seed, "plus-space")
    ok = 5.0 <= res.bound <= 5.0 + tol
    rec = _record("pseudodistance_upper", {"space": "+", "from": "1:-2", "to": "2:3"},
                  res.bound, tol, expected=5.0, passed=ok)
    return Outcome(ok, [rec], rows, wit)


def m_space(levels=5, seed=0, tol=0.05):
    M, g = C.m_space()
    res, rows, wit = _distance(M, g, M.point(0, 0.0), M.point(1, [3.0, 4.0]), levels, seed,
                               "m-space")
    inf = 1.0 + 2.0 * math.sqrt(5.0)
    ok = inf - 1e-9 <= res.bound <= inf + tol
    rec = _record("pseudodistance_upper", {"space": "M", "from": "1:0", "to": "2:3,4"},
                  res.bound, tol, expected=inf, passed=ok)
    return Outcome(ok, [rec], rows, wit)


def loop_section(samples=100, seed=0, tol=1e-6):
    N, gN = C.euclidean(2)
    LN = LoopSpace(N, gN, [trig_family(N, 1)])
    pulled = pullback(section_s(N, LN=LN), LN.metric)
    rng = np.random.default_rng(seed)
    dev = 0.0
    for _ in range(samples):
        r, v, w = rng.uniform(-5, 5, 2), rng.normal(size=2), rng.normal(size=2)
        dev = max(dev, abs(pulled(0, r, v, w) - TWO_PI * gN(0, r, v, w)))
    ok = dev <= tol
    rec = _record("section_pullback", {"N": "R2", "samples": samples, "seed": seed},
                  dev, tol, quantity="max |s*g - 2pi g_N|", passed=ok)
    return Outcome(ok, [rec])


def concatenation(samples=50, seed=0, tol=1e-6):
    """Compares ``g(c∘P)`` with ``g_∨(P)`` for random polynomial wedge families.

    The comparison with plain ``dθ`` is the claimed identity; the second record
    weights ``dθ`` by the pinch density, which is the identity that actually holds.
    """
    N, gN = C.euclidean(2)
    rng = np.random.default_rng(seed)
    plain, weighted = 0.0, 0.0
    for _ in range(samples):
        P = polynomial_wedge_family(N, rng)
        cP = concatenate(P)
        r, v, w = rng.uniform(-1, 1, 2), rng.normal(size=2), rng.normal(size=2)
        ref = wedge_metric_eval(gN, P, r, v, w)
        scale = math.sqrt(wedge_metric_eval(gN, P, r, v, v) * wedge_metric_eval(gN, P, r, w, w))
        scale = max(scale, 1e-300)
        plain = max(plain, abs(mapping_metric_eval(gN, cP, r, v, w) - ref) / scale)
        weighted = max(weighted, abs(mapping_metric_eval(gN, cP, r, v, w, density=pinch_density)
                                     - ref) / scale)
    ok = plain <= tol
    recs = [
        _record("concatenation_isometry", {"N": "R2", "samples": samples, "seed": seed,
                                           "volume": "dtheta"},
                plain, tol, quantity="max relative |g(cP) - g_vee(P)|", passed=ok),
        _record("concatenation_isometry", {"N": "R2", "samples": samples, "seed": seed,
                                           "volume": "pinch density b'(theta mod pi) dtheta"},
                weighted, tol, quantity="max relative |g(cP) - g_vee(P)|", passed=weighted <= tol),
    ]
    return Outcome(ok, recs)


def warped(samples=1000, seed=0, tol=1e-9):
    X, gX = C.euclidean(1)
    Y, gY = C.euclidean(1)
    W, gW = C.warped_product(X, gX, Y, gY, C.WarpSpec.exp2x(X))
    rep = definiteness_check(gW, per_axis=9, windows={0: ([-1.0, -5.0], [1.0, 5.0])})
    floor = min(1.0, math.exp(-2.0)) - tol
    definite = rep.verdict == "definite" and rep.min_eigenvalue >= floor
    W1, g1 = C.warped_product(X, gX, Y, gY, C.WarpSpec.constant(X, 1.0))
    P, gP = C.product(X, gX, Y, gY)
    rng = np.random.default_rng(seed)
    dev = 0.0
    for _ in range(samples):
        r, v, w = rng.uniform(-5, 5, 2), rng.normal(size=2), rng.normal(size=2)
        dev = max(dev, abs(g1(0, r, v, w) - gP(0, r, v, w)))
    ok = definite and dev == 0.0
    recs = [
        _record("definiteness_check", {"space": "R x_{exp(2x)} R", "window_x": [-1, 1]},
                rep.min_eigenvalue, floor, verdict=rep.verdict, quantity="min Gram eigenvalue",
                passed=definite),
        _record("warped_equals_product", {"f": "1", "samples": samples, "seed": seed},
                dev, 0.0, passed=dev == 0.0),
    ]
    return Outcome(ok, recs)


def wedge_sum_of_mapping_spaces(samples=100, seed=0, tol=1e-6):
    """``LN ⊔_N LN'`` for N = R^2: the injection pulls the glued metric back to ``2π g_N``,
    the glued metric is definite on a grid, and unequal circle volumes are refused."""
    N, gN = C.euclidean(2)
    space, g, iota = mapping_pushout(N, gN)
    pulled = pullback(iota, g)
    rng = np.random.default_rng(seed)
    dev = 0.0
    for _ in range(samples):
        r, v, w = rng.uniform(-5, 5, 2), rng.normal(size=2), rng.normal(size=2)
        dev = max(dev, abs(pulled(0, r, v, w) - TWO_PI * gN(0, r, v, w)))
    rep = definiteness_check(g, per_axis=3, half_width=2.0)
    try:
        mapping_pushout(N, gN, volume_right=2.0 * TWO_PI)
        refused, gap = False, 0.0
    except C.ConstructionError as exc:
        refused, gap = True, exc.deviation
    ok = dev <= tol and rep.verdict == "definite" and refused
    recs = [
        _record("injection_pullback", {"N": "R2", "samples": samples, "seed": seed},
                dev, tol, quantity="max |iota*g - 2pi g_N|", passed=dev <= tol),
        _record("definiteness_check", {"space": "LN u_N LN'", "per_axis": 3, "half_width": 2.0},
                rep.min_eigenvalue, rep.tol, verdict=rep.verdict,
                passed=rep.verdict == "definite"),
        _record("compatibility", {"volumes": [TWO_PI, 2.0 * TWO_PI]}, gap, C.COMPAT_TOL,
                refused=refused, passed=refused),
    ]
    return Outcome(ok, recs)


TARGETS: dict[str, Callable[..., Outcome]] = {
    "euclidean": euclidean,
    "y-space": y_space,
    "plus-space": plus_space,
    "m-space": m_space,
    "loop-section": loop_section,
    "concatenation": concatenation,
    "warped": warped,
    "wedge-sum-of-mapping-spaces": wedge_sum_of_mapping_spaces,
}

DISTANCE_TARGETS = {"euclidean", "y-space", "plus-space", "m-space"}
