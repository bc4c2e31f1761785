"""Weak Riemannian metrics given plot-wise, with pullback and numerical checks."""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (ChartMap, DiffeoError, DiffeoSpace, FactorizationError, SmoothMap,
                   TangentDouble, UsageError, as_vector, eval_plot, factorize_map,
                   points_equal)
from .linalg import max_eigen, min_eigen

DEFINITE_TOL = 1e-8


class PullbackError(DiffeoError):
    pass


class PreconditionError(DiffeoError):
    pass


class WeakMetric:
    """A symmetric positive 2-tensor field on each generating plot of a space.

    ``fields[i]`` maps a point ``r`` of plot ``i``'s domain to its Gram matrix.
    ``batch_fields[i]``, when given, maps an ``(m, dim)`` array to ``(m, dim, dim)``.
    """

    def __init__(self, space: DiffeoSpace, fields: Sequence[Callable],
                 batch_fields: Optional[Sequence[Optional[Callable]]] = None, name: str = ""):
        if len(fields) != space.n_plots:
            raise ValueError("one tensor field per generating plot is required")
        self.space = space
        self.fields = list(fields)
        self.batch_fields = list(batch_fields) if batch_fields is not None else [None] * len(fields)
        self.name = name

    @property
    def space_id(self) -> int:
        return self.space.id

    def gram(self, plot_index: int, r) -> np.ndarray:
        if not 0 <= plot_index < len(self.fields):
            raise UsageError(f"unknown plot index {plot_index}")
        dim = self.space.plots[plot_index].domain.dim
        r = as_vector(r) if dim else np.zeros(0)
        return np.asarray(self.fields[plot_index](r), dtype=float).reshape(dim, dim)

    def grams(self, plot_index: int, R) -> np.ndarray:
        """Gram matrices at each row of ``R``."""
        dim = self.space.plots[plot_index].domain.dim
        R = np.asarray(R, dtype=float).reshape(-1, dim)
        batch = self.batch_fields[plot_index]
        if batch is not None:
            return np.asarray(batch(R), dtype=float).reshape(len(R), dim, dim)
        return np.array([self.gram(plot_index, r) for r in R]).reshape(len(R), dim, dim)

    def __call__(self, plot_index: int, r, v, w) -> float:
        G = self.gram(plot_index, r)
        v, w = np.atleast_1d(np.asarray(v, float)), np.atleast_1d(np.asarray(w, float))
        # a + b == b + a in IEEE arithmetic, so this is exactly symmetric in (v, w)
        return 0.5 * (float(v @ G @ w) + float(w @ G @ v))

    def scaled(self, c: float) -> "WeakMetric":
        return WeakMetric(self.space, [lambda r, f=f: c * f(r) for f in self.fields],
                          [None if b is None else (lambda R, b=b: c * b(R)) for b in self.batch_fields],
                          name=f"{c}·{self.name}")


def metric_eval(g: WeakMetric, t: TangentDouble) -> float:
    """Value ``g(P)_r(v, w)`` for a tangent double ``[P, r, v, w]``."""
    if not 0 <= t.plot_index < g.space.n_plots:
        raise UsageError(f"unknown plot index {t.plot_index}")
    return g(t.plot_index, t.r, t.v, t.w)


class _FactorizationCache:
    """Factorizations per plot, reused inside their certified balls."""

    def __init__(self):
        self._lock = threading.Lock()
        self._entries: dict = {}

    def lookup(self, plot_index, r):
        with self._lock:
            for center, fac in self._entries.get(plot_index, ()):
                if np.linalg.norm(r - center) < fac.radius:
                    return fac
        return None

    def insert(self, plot_index, r, fac):
        with self._lock:
            self._entries.setdefault(plot_index, []).append((r.copy(), fac))


def pullback(phi: SmoothMap, g_Y: WeakMetric, verify: bool = True) -> WeakMetric:
    """Pullback metric ``phi* g_Y`` on ``phi.source``.

    At ``r`` in plot ``P`` the factorization ``phi∘P = Q∘h`` gives
    ``(phi* g)(P)_r = Jh(r)^T g_Y(Q)_{h(r)} Jh(r)``.
    """
    if phi.target is not g_Y.space:
        raise UsageError("map does not target the metric's space")
    cache = _FactorizationCache()

    def field_for(i):
        def field(r):
            fac = cache.lookup(i, r)
            if fac is None:
                try:
                    fac = factorize_map(phi, i, r) if verify else phi.raw_factorize(i, r)
                except FactorizationError as exc:
                    raise PullbackError(f"plot {i}, r={list(r)}: {exc}") from exc
                if fac is None:
                    raise PullbackError(f"plot {i}, r={list(r)}: no factorization")
                cache.insert(i, r, fac)
            J = fac.h.jacobian(r)
            return J.T @ g_Y.gram(fac.target_plot, fac.h(r)) @ J
        return field

    return WeakMetric(phi.source, [field_for(i) for i in range(phi.source.n_plots)],
                      name=f"{phi.name}*{g_Y.name}")


def _random_unit(rng, n):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v) if n else v


@dataclass
class CheckReport:
    """Outcome of a sampled comparison: ``passed`` iff ``max_deviation <= tol``."""

    name: str
    max_deviation: float
    tol: float
    samples: int
    worst: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol

    def to_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed, "max_deviation": self.max_deviation,
                "tol": self.tol, "samples": self.samples, "worst": self.worst}


@dataclass(frozen=True)
class NaturalityPair:
    """Generating plots ``P`` and ``Q`` with ``Q ∘ f = P`` on ``f``'s source."""

    P: int
    Q: int
    f: ChartMap


def check_naturality(g: WeakMetric, pairs: Sequence[NaturalityPair], samples: int = 20,
                     tol: float = 1e-4, seed: int = 0, half_width: float = 5.0) -> CheckReport:
    """Max of ``|g(P)_r(v,w) - g(Q)_{f(r)}(Jf v, Jf w)|`` over sampled ``(r, v, w)``."""
    rng = np.random.default_rng(seed)
    space = g.space
    worst, dev, n = None, 0.0, 0
    for k, pair in enumerate(pairs):
        dom = pair.f.source
        for r in dom.sample(rng, samples, half_width=half_width):
            fr = pair.f(r)
            if not points_equal(space, eval_plot(space, pair.P, r), eval_plot(space, pair.Q, fr)):
                raise PreconditionError(f"pair {k}: Q∘f != P at r={list(r)}")
            v, w = rng.normal(size=dom.dim), rng.normal(size=dom.dim)
            J = pair.f.jacobian(r)
            lhs = g(pair.P, r, v, w)
            rhs = g(pair.Q, fr, J @ v, J @ w)
            d = abs(lhs - rhs)
            n += 1
            if d > dev or worst is None:
                dev = max(dev, d)
                worst = {"pair": k, "r": r.tolist(), "v": v.tolist(), "w": w.tolist(),
                         "lhs": lhs, "rhs": rhs}
    return CheckReport("naturality", dev, tol, n, worst)


@dataclass
class DefinitenessReport:
    verdict: str
    witnesses: list = field(default_factory=list)
    grid: dict = field(default_factory=dict)
    tol: float = DEFINITE_TOL
    min_eigenvalue: float = math.inf

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "witnesses": self.witnesses, "grid": self.grid,
                "tol": self.tol, "min_eigenvalue": self.min_eigenvalue}


def definiteness_check(g: WeakMetric, per_axis: int = 9, half_width: float = 5.0,
                       tol: float = DEFINITE_TOL, plots: Optional[Sequence[int]] = None,
                       windows: Optional[dict] = None) -> DefinitenessReport:
    """Check that every Gram matrix on a grid has smallest eigenvalue above ``tol``.

    ``windows`` optionally maps a plot index to explicit ``(lower, upper)`` grid
    bounds; otherwise the domain box is clipped to ``[-half_width, half_width]``.
    A "definite" verdict only speaks for the grid.
    """
    plots = range(g.space.n_plots) if plots is None else plots
    witnesses, lam_min, failed = [], math.inf, False
    for i in plots:
        dom = g.space.plots[i].domain
        if windows and i in windows:
            lo, hi = (np.atleast_1d(np.asarray(x, float)) for x in windows[i])
            axes = [np.linspace(a, b, per_axis) for a, b in zip(lo, hi)]
            pts = np.array(np.meshgrid(*axes, indexing="ij")).reshape(dom.dim, -1).T
            pts = np.array([p for p in pts if dom.contains(p)]).reshape(-1, dom.dim)
        else:
            pts = dom.grid(per_axis, half_width)
        if dom.dim == 0:
            continue
        for r in pts:
            try:
                lam, vec = min_eigen(g.gram(i, r))
            except (DiffeoError, FloatingPointError, ValueError, np.linalg.LinAlgError):
                failed = True
                continue
            if not math.isfinite(lam):
                failed = True
                continue
            lam_min = min(lam_min, lam)
            if lam <= tol:
                witnesses.append({"plot": i, "r": r.tolist(), "v": vec.tolist(),
                                  "min_eigenvalue": lam})
    grid = {"per_axis": per_axis, "half_width": half_width, "plots": list(plots)}
    if windows:
        grid["windows"] = {str(k): [list(np.atleast_1d(v[0])), list(np.atleast_1d(v[1]))]
                           for k, v in windows.items()}
    if witnesses:
        verdict = "indefinite"
    elif failed:
        verdict = "inconclusive"
    else:
        verdict = "definite"
    return DefinitenessReport(verdict, witnesses, grid, tol, lam_min)


def isometry_check(phi: SmoothMap, g_X: WeakMetric, g_Y: WeakMetric, samples: int = 50,
                   tol: float = 1e-8, seed: int = 0, half_width: float = 5.0) -> CheckReport:
    """Compare ``phi* g_Y`` with ``g_X`` at random tangent doubles."""
    if g_X.space is not phi.source:
        raise UsageError("g_X must live on the map's source")
    pulled = pullback(phi, g_Y)
    rng = np.random.default_rng(seed)
    dev, worst, n = 0.0, None, 0
    for i, plot in enumerate(phi.source.plots):
        dim = plot.domain.dim
        if dim == 0:
            continue
        for r in plot.domain.sample(rng, samples, half_width=half_width):
            v, w = rng.normal(size=dim), rng.normal(size=dim)
            a, b = pulled(i, r, v, w), g_X(i, r, v, w)
            n += 1
            if abs(a - b) >= dev:
                dev = abs(a - b)
                worst = {"plot": i, "r": r.tolist(), "v": v.tolist(), "w": w.tolist(),
                         "pullback": a, "metric": b}
    return CheckReport("isometry", dev, tol, n, worst)


def operator_norm_bound(g: WeakMetric, plot_index: int, r) -> float:
    """``sup_{|v|=1} g(P)_r(v, v)``, the largest Gram eigenvalue."""
    return max_eigen(g.gram(plot_index, r))
