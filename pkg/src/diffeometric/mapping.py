"""Metrics on the loop space C^∞(S¹, N) and on C^∞(S¹ ∨ S¹, N).

Loops and loop families are handled at chart level: every loop of a family
takes values in a single generating plot ``n_plot`` of N.  Integrals over the
circle use composite Gauss-Legendre in θ ∈ [0, 2π] with ``dθ`` as volume form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (FD_STEP, ChartDomain, ChartMap, DiffeoError, DiffeoSpace, Factorization,
                   Plot, Point, SmoothMap, as_vector, eval_plot, points_equal, sample_ball)
from .linalg import gl_nodes
from .metric import WeakMetric

TWO_PI = 2.0 * math.pi
PANELS = 32
ORDER = 8


class MappingError(DiffeoError):
    pass


class IncoherentBasepoint(DiffeoError):
    pass


def _nodes(panels=PANELS, order=ORDER, a=0.0, b=TWO_PI):
    return gl_nodes(a, b, panels, order)


class MappingPlot:
    """A plot of C^∞(S¹, N) given by its adjoint ``(r, θ) -> chart coords in N``.

    ``adjoint(r, thetas)`` returns an array of shape ``(len(thetas), n)`` of
    coordinates in N's plot ``n_plot``.  ``d_adjoint(r, thetas)``, if given,
    returns the r-Jacobians, shape ``(len(thetas), n, dim)``.
    """

    def __init__(self, domain: ChartDomain, N: DiffeoSpace, adjoint: Callable,
                 d_adjoint: Optional[Callable] = None, n_plot: int = 0,
                 h: float = FD_STEP, name: str = ""):
        self.domain = domain
        self.N = N
        self.n_plot = n_plot
        self._adjoint = adjoint
        self._d_adjoint = d_adjoint
        self.h = h
        self.name = name

    @property
    def n(self) -> int:
        return self.N.plots[self.n_plot].domain.dim

    def values(self, r, thetas) -> np.ndarray:
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        r = as_vector(r) if self.domain.dim else np.zeros(0)
        return np.asarray(self._adjoint(r, thetas), dtype=float).reshape(len(thetas), self.n)

    def jacobians(self, r, thetas) -> np.ndarray:
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        r = as_vector(r) if self.domain.dim else np.zeros(0)
        d = self.domain.dim
        if self._d_adjoint is not None:
            return np.asarray(self._d_adjoint(r, thetas), dtype=float).reshape(len(thetas), self.n, d)
        J = np.empty((len(thetas), self.n, d))
        for k in range(d):
            e = np.zeros(d)
            e[k] = self.h
            J[:, :, k] = (self.values(r + e, thetas) - self.values(r - e, thetas)) / (2 * self.h)
        return J

    def loop(self, r) -> "LoopPoint":
        return LoopPoint(self.N, lambda th: self.values(r, th), self.n_plot, check=False)

    def ev(self, theta: float) -> ChartMap:
        """The chart map of ``ev_θ ∘ P`` through N's plot ``n_plot``."""
        target = self.N.plots[self.n_plot].domain
        return ChartMap(self.domain, target, lambda r: self.values(r, [theta])[0],
                        lambda r: self.jacobians(r, [theta])[0], name=f"ev_{theta:.4g}∘{self.name}")


@dataclass
class LoopPoint:
    """A smooth loop in N, given chart-wise as ``value(thetas) -> (m, n)`` coordinates."""

    N: DiffeoSpace
    value: Callable
    n_plot: int = 0
    check: bool = True

    def __post_init__(self):
        if not self.check:
            return
        th = np.linspace(0.0, TWO_PI, 17)
        vals = self(th)
        dom = self.N.plots[self.n_plot].domain
        if not all(dom.contains(x) for x in vals):
            raise MappingError("loop leaves the chart of N")
        delta = 1e-6
        if np.max(np.abs(self(np.array([TWO_PI - delta]))[0] - vals[0])) > 1e-4:
            raise MappingError("loop is not closed: value(2π-δ) is far from value(0)")
        # second differences of a smooth loop are O(step^2)
        step = 1e-3
        probe = np.linspace(0.1, TWO_PI - 0.1, 7)
        second = self(probe + step) - 2 * self(probe) + self(probe - step)
        if not np.all(np.isfinite(second)) or np.max(np.abs(second)) > 1e2 * step:
            raise MappingError("loop failed the finite-difference smoothness probe")

    def __call__(self, thetas) -> np.ndarray:
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        n = self.N.plots[self.n_plot].domain.dim
        return np.asarray(self.value(thetas), dtype=float).reshape(len(thetas), n)

    def point(self, theta: float) -> Point:
        return eval_plot(self.N, self.n_plot, self([theta])[0])


def _node_grams(g_N: WeakMetric, P: MappingPlot, X: np.ndarray, thetas) -> np.ndarray:
    dom = P.N.plots[P.n_plot].domain
    for x, th in zip(X, thetas):
        if not dom.contains(x):
            raise MappingError(f"ev_θ∘{P.name or 'P'} leaves N's chart at θ={th:.6g}")
    return g_N.grams(P.n_plot, X)


def mapping_gram(g_N: WeakMetric, P: MappingPlot, r, panels: int = PANELS, order: int = ORDER,
                 density: Optional[Callable] = None) -> np.ndarray:
    """Gram matrix of the loop-space metric at ``r``: ``∫ Jθᵀ G_N Jθ dθ``.

    ``density`` multiplies the volume form ``dθ`` pointwise.
    """
    thetas, weights = _nodes(panels, order)
    if density is not None:
        weights = weights * density(thetas)
    X = P.values(r, thetas)
    J = P.jacobians(r, thetas)
    G = _node_grams(g_N, P, X, thetas)
    out = np.einsum("k,kia,kij,kjb->ab", weights, J, G, J)
    return 0.5 * (out + out.T)


def mapping_metric_eval(g_N: WeakMetric, P: MappingPlot, r, v, w, panels: int = PANELS,
                        order: int = ORDER, density: Optional[Callable] = None) -> float:
    """``∫₀^{2π} g_N(ev_θ∘P)_r(v, w) dθ``."""
    G = mapping_gram(g_N, P, r, panels, order, density)
    v, w = np.atleast_1d(np.asarray(v, float)), np.atleast_1d(np.asarray(w, float))
    return 0.5 * (float(v @ G @ w) + float(w @ G @ v))


class LoopSpace(DiffeoSpace):
    """C^∞(S¹, N) through a finite family of mapping plots.

    The first ``N.n_plots`` plots are the section composites ``s∘Q``; registered
    families follow.  Loops are compared at ``n_probe`` equally spaced angles.
    """

    def __init__(self, N: DiffeoSpace, g_N: WeakMetric, families: Sequence[MappingPlot] = (),
                 name: str = "LN", n_probe: int = 64, panels: int = PANELS, order: int = ORDER):
        self.base = N
        self.base_metric = g_N
        sections = [constant_family(N, q) for q in range(N.n_plots)]
        self.families = sections + list(families)
        self.panels, self.order = panels, order
        probe = np.linspace(0.0, TWO_PI, n_probe, endpoint=False)

        def equality(p, q):
            P, Q = self.families[p.plot_index], self.families[q.plot_index]
            xs, ys = P.values(p.coords, probe), Q.values(q.coords, probe)
            return all(points_equal(N, eval_plot(N, P.n_plot, x), eval_plot(N, Q.n_plot, y))
                       for x, y in zip(xs, ys))

        super().__init__([Plot(F.domain, F.name) for F in self.families], equality=equality, name=name)
        self.metric = WeakMetric(
            self, [lambda r, F=F: mapping_gram(g_N, F, r, panels, order) for F in self.families],
            name=f"L({g_N.name})")

    def loop(self, p: Point) -> LoopPoint:
        return self.families[p.plot_index].loop(p.coords)


def loop_space(N: DiffeoSpace, g_N: WeakMetric, families: Sequence[MappingPlot] = (), **kw):
    LN = LoopSpace(N, g_N, families, **kw)
    return LN, LN.metric


def constant_family(N: DiffeoSpace, q: int) -> MappingPlot:
    """``s∘Q``: the loop family ``r -> (θ -> Q(r))``."""
    dom = N.plots[q].domain
    n = dom.dim

    def adjoint(r, th):
        return np.broadcast_to(r, (len(th), n))

    def d_adjoint(r, th):
        return np.broadcast_to(np.eye(n), (len(th), n, n))

    return MappingPlot(dom, N, adjoint, d_adjoint, n_plot=q, name=f"s∘{N.plots[q].name or q}")


def section_s(N: DiffeoSpace, g_N: Optional[WeakMetric] = None,
              LN: Optional[LoopSpace] = None) -> SmoothMap:
    """The section ``s(y)(θ) = y`` as a smooth map N -> LN (LN built if not given)."""
    if LN is None:
        if g_N is None:
            raise ValueError("either g_N or LN is required")
        LN = LoopSpace(N, g_N)

    def factorize(q, r):
        return Factorization(math.inf, q, ChartMap.identity(N.plots[q].domain))

    def value(p):
        return Point(LN.id, p.plot_index, p.coords)

    return SmoothMap(N, LN, factorize, value, name="s")


def evaluation(LN: LoopSpace, theta: float) -> SmoothMap:
    """``ev_θ``: LN -> N."""
    def factorize(k, r):
        F = LN.families[k]
        return Factorization(math.inf, F.n_plot, F.ev(theta))

    def value(p):
        F = LN.families[p.plot_index]
        return eval_plot(LN.base, F.n_plot, F.values(p.coords, [theta])[0])

    return SmoothMap(LN, LN.base, factorize, value, name=f"ev_{theta:g}")


# -- bump function and concatenation ----------------------------------------------------

def _phi(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _dphi(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos]) / t[pos] ** 2
    return out


def smoothstep(t):
    """``ψ(t) = φ(t) / (φ(t) + φ(1-t))`` with ``φ(t) = exp(-1/t)`` for t > 0; C^∞, 0 on t≤0, 1 on t≥1."""
    t = np.asarray(t, dtype=float)
    a, b = _phi(t), _phi(1.0 - t)
    return a / (a + b)


def smoothstep_prime(t):
    t = np.asarray(t, dtype=float)
    a, b = _phi(t), _phi(1.0 - t)
    da, db = _dphi(t), _dphi(1.0 - t)
    return (da * b + a * db) / (a + b) ** 2


def bump_b(s):
    """Monotone smooth ``b: R -> [0, 2π]``, 0 for s ≤ π/4, 2π for s ≥ 3π/4, b(π/2) = π."""
    out = TWO_PI * smoothstep((np.asarray(s, dtype=float) - math.pi / 4) / (math.pi / 2))
    return float(out) if np.ndim(out) == 0 else out


def bump_b_prime(s):
    out = 4.0 * smoothstep_prime((np.asarray(s, dtype=float) - math.pi / 4) / (math.pi / 2))
    return float(out) if np.ndim(out) == 0 else out


def pinch_density(thetas):
    """Density of ``p*(dθ)`` for the pinch map ``p: S¹ -> S¹ ∨ S¹``: ``b'(θ mod π)``."""
    return bump_b_prime(np.mod(np.asarray(thetas, dtype=float), math.pi))


@dataclass
class WedgePlot:
    """A plot of C^∞(S¹∨S¹, N) as a pair of loop families with a common basepoint."""

    left: MappingPlot
    right: MappingPlot
    samples: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.left.domain.dim != self.right.domain.dim or self.left.n_plot != self.right.n_plot:
            raise IncoherentBasepoint("wedge components must share domain and chart")
        rng = np.random.default_rng(self.seed)
        for r in self.left.domain.sample(rng, self.samples, half_width=2.0):
            a, b = self.left.values(r, [0.0])[0], self.right.values(r, [0.0])[0]
            if np.max(np.abs(a - b), initial=0.0) > 1e-9:
                raise IncoherentBasepoint(f"left(0) != right(0) at r={r.tolist()}")

    @property
    def domain(self):
        return self.left.domain


def concatenate(P: WedgePlot) -> MappingPlot:
    """``c∘P``: θ ∈ [0,π] runs the left loop at ``b(θ)``, θ ∈ [π,2π] the right loop at ``b(θ-π)``."""
    L, R = P.left, P.right

    def split(th):
        th = np.mod(np.asarray(th, dtype=float), TWO_PI)
        first = th <= math.pi
        return first, np.where(first, bump_b(th), bump_b(th - math.pi))

    def adjoint(r, th):
        first, s = split(th)
        out = np.empty((len(s), L.n))
        if first.any():
            out[first] = L.values(r, s[first])
        if (~first).any():
            out[~first] = R.values(r, s[~first])
        return out

    def d_adjoint(r, th):
        first, s = split(th)
        out = np.empty((len(s), L.n, L.domain.dim))
        if first.any():
            out[first] = L.jacobians(r, s[first])
        if (~first).any():
            out[~first] = R.jacobians(r, s[~first])
        return out

    return MappingPlot(L.domain, L.N, adjoint, d_adjoint, n_plot=L.n_plot,
                       name=f"c({L.name},{R.name})")


def wedge_metric_eval(g_N: WeakMetric, P: WedgePlot, r, v, w, convention: str = "vee",
                      panels: int = PANELS, order: int = ORDER) -> float:
    """Wedge metric ``g(P_left) + g(P_right)``.

    ``convention="pullback"`` adds the basepoint term ``g_N(ev_0∘P)_r(v, w)``,
    i.e. the metric induced from ``N × LN × LN``.
    """
    val = (mapping_metric_eval(g_N, P.left, r, v, w, panels, order)
           + mapping_metric_eval(g_N, P.right, r, v, w, panels, order))
    if convention == "pullback":
        J = P.left.jacobians(r, [0.0])[0]
        x = P.left.values(r, [0.0])[0]
        v, w = np.atleast_1d(np.asarray(v, float)), np.atleast_1d(np.asarray(w, float))
        val += g_N(P.left.n_plot, x, J @ v, J @ w)
    elif convention != "vee":
        raise ValueError(f"unknown wedge convention {convention!r}")
    return val


def wedge_gram(g_N: WeakMetric, P: WedgePlot, r, panels: int = PANELS, order: int = ORDER):
    return mapping_gram(g_N, P.left, r, panels, order) + mapping_gram(g_N, P.right, r, panels, order)


# -- condition (E) --------------------------------------------------------------------------

def identity_recognizer(tol: float = 1e-9, n_check: int = 16):
    """Accepts ``h`` on a ball when it is the identity of the chart there."""
    def recognize(h: ChartMap, center, radius) -> bool:
        if h.source.dim != h.target.dim:
            return False
        rng = np.random.default_rng(0)
        return all(np.max(np.abs(h(x) - x), initial=0.0) <= tol
                   for x in sample_ball(h.source, center, radius, n_check, rng))
    return recognize


def always_recognizer(h, center, radius) -> bool:
    return True


@dataclass
class ConditionEReport:
    passed: bool
    certified: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def to_dict(self):
        return {"passed": self.passed, "certified": self.certified, "failures": self.failures}


def condition_E_check(P: MappingPlot, recognizer: Callable, theta_grid, r_grid,
                      radii: Sequence[float] = tuple(2.0 ** -k for k in range(11))) -> ConditionEReport:
    """For each (r, θ), find the largest radius in ``radii`` on which ``recognizer``
    accepts ``ev_θ∘P`` restricted to the ball about r."""
    certified, failures = [], []
    for r in np.asarray(r_grid, dtype=float).reshape(-1, P.domain.dim):
        for th in np.atleast_1d(np.asarray(theta_grid, dtype=float)):
            h = P.ev(float(th))
            rho = next((rad for rad in sorted(radii, reverse=True) if recognizer(h, r, rad)), None)
            entry = {"r": r.tolist(), "theta": float(th)}
            if rho is None:
                failures.append(entry)
            else:
                certified.append({**entry, "radius": rho})
    return ConditionEReport(not failures, certified, failures)


# -- wedge maps and their conversions ---------------------------------------------------------

@dataclass
class WedgePoint:
    """A pair of loops ``(γ₁, γ₂)`` with ``γ₁(0) = γ₂(0)``."""

    left: LoopPoint
    right: LoopPoint
    tol: float = 1e-9

    def __post_init__(self):
        a, b = self.left([0.0])[0], self.right([0.0])[0]
        if self.left.n_plot != self.right.n_plot or np.max(np.abs(a - b), initial=0.0) > self.tol:
            raise IncoherentBasepoint(f"basepoints differ: {a.tolist()} vs {b.tolist()}")


class WedgeMap:
    """A map S¹ ∨ S¹ -> N, called as ``gamma(branch, thetas)`` with branch 'left' or 'right'."""

    def __init__(self, fn: Callable, N: DiffeoSpace, n_plot: int = 0, tol: float = 1e-9):
        self.fn = fn
        self.N = N
        self.n_plot = n_plot
        a, b = self("left", [0.0])[0], self("right", [0.0])[0]
        if np.max(np.abs(a - b), initial=0.0) > tol:
            raise IncoherentBasepoint("the two branches disagree at the wedge point")

    def __call__(self, branch: str, thetas) -> np.ndarray:
        if branch not in ("left", "right"):
            raise ValueError(f"unknown branch {branch!r}")
        thetas = np.mod(np.atleast_1d(np.asarray(thetas, dtype=float)), TWO_PI)
        n = self.N.plots[self.n_plot].domain.dim
        return np.asarray(self.fn(branch, thetas), dtype=float).reshape(len(thetas), n)


def l_convert(gamma: WedgeMap) -> WedgePoint:
    """``γ ↦ (γ∘i, γ∘j)``."""
    return WedgePoint(LoopPoint(gamma.N, lambda th: gamma("left", th), gamma.n_plot),
                      LoopPoint(gamma.N, lambda th: gamma("right", th), gamma.n_plot))


def nu_convert(z: WedgePoint) -> WedgeMap:
    """Inverse of :func:`l_convert`: glue two coherent loops along their basepoint."""
    def fn(branch, th):
        return z.left(th) if branch == "left" else z.right(th)
    return WedgeMap(fn, z.left.N, z.left.n_plot, tol=z.tol)


# -- distance lower bound ------------------------------------------------------------------------

def euclidean_distance(x, y):
    return np.linalg.norm(np.asarray(x) - np.asarray(y), axis=-1)


def mapping_distance_lower_bound(f0: LoopPoint, f1: LoopPoint, d_N: Callable = euclidean_distance,
                                 panels: int = PANELS, order: int = ORDER) -> float:
    """``vol(S¹)^{-1/2} ∫ d_N(f0(θ), f1(θ)) dθ``, a lower bound on the loop-space distance.

    ``d_N`` must be the (closed-form) distance of N in the chart both loops use.
    """
    thetas, weights = _nodes(panels, order)
    return float(np.dot(weights, d_N(f0(thetas), f1(thetas)))) / math.sqrt(TWO_PI)


# -- built-in loop families into R^n --------------------------------------------------------------

def trig_basis(degree: int, thetas, based: bool = False) -> np.ndarray:
    """Columns ``1, cos kθ, sin kθ`` (k = 1..degree); ``based`` uses ``cos kθ - 1`` so
    every non-constant column vanishes at θ = 0."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    cols = [np.ones_like(thetas)]
    for k in range(1, degree + 1):
        cols.append(np.cos(k * thetas) - (1.0 if based else 0.0))
        cols.append(np.sin(k * thetas))
    return np.stack(cols, axis=1)


def trig_family(N: DiffeoSpace, degree: int, based: bool = False, n_plot: int = 0) -> MappingPlot:
    """Trigonometric loops of the given degree; coordinates are the coefficient vectors.

    ``r`` has length ``n (2 degree + 1)`` laid out as ``r[k*n:(k+1)*n]`` for basis column k.
    """
    n = N.plots[n_plot].domain.dim
    m = 2 * degree + 1

    def adjoint(r, th):
        return trig_basis(degree, th, based) @ r.reshape(m, n)

    def d_adjoint(r, th):
        B = trig_basis(degree, th, based)
        return np.einsum("tk,ij->tikj", B, np.eye(n)).reshape(len(th), n, m * n)

    return MappingPlot(ChartDomain(m * n), N, adjoint, d_adjoint, n_plot=n_plot,
                       name=f"trig{degree}{'b' if based else ''}")


def named_family(name: str, N: DiffeoSpace, **params) -> MappingPlot:
    """Loop families for R^2 by name: ``constant``, ``circle_scale``, ``figure``."""
    center = np.asarray(params.get("center", np.zeros(2)), dtype=float)
    dom = ChartDomain(1)
    if name == "constant":
        y = np.asarray(params.get("y", center), dtype=float)
        return MappingPlot(dom, N, lambda r, th: np.broadcast_to(y, (len(th), 2)),
                           lambda r, th: np.zeros((len(th), 2, 1)), name="constant")
    if name == "circle_scale":
        return MappingPlot(dom, N,
                           lambda r, th: center + r[0] * np.stack([np.cos(th), np.sin(th)], 1),
                           lambda r, th: np.stack([np.cos(th), np.sin(th)], 1)[:, :, None],
                           name="circle_scale")
    if name == "figure":
        shape = lambda th: np.stack([np.sin(th), np.sin(th) * np.cos(th)], 1)
        return MappingPlot(dom, N, lambda r, th: center + r[0] * shape(th),
                           lambda r, th: shape(th)[:, :, None], name="figure")
    raise ValueError(f"unknown loop family {name!r}")


class WedgeLoopSpace(DiffeoSpace):
    """C^∞(S¹∨S¹, R^n) through based trigonometric loops sharing a basepoint.

    Coordinates: basepoint c (n), then the non-constant coefficients of the left
    loop, then those of the right loop.
    """

    def __init__(self, N: DiffeoSpace, g_N: WeakMetric, degree: int = 1,
                 convention: str = "vee", name: str = "L(S1vS1)"):
        n = N.plots[0].domain.dim
        m = 2 * degree
        D = n + 2 * m * n
        self.base, self.base_metric, self.degree = N, g_N, degree
        fam = trig_family(N, degree, based=True)
        self.left = MappingPlot(ChartDomain(D), N, lambda r, th: fam.values(self._side(r, 0), th),
                                lambda r, th: fam.jacobians(self._side(r, 0), th) @ self._sel(0),
                                name="left")
        self.right = MappingPlot(ChartDomain(D), N, lambda r, th: fam.values(self._side(r, 1), th),
                                 lambda r, th: fam.jacobians(self._side(r, 1), th) @ self._sel(1),
                                 name="right")
        self._n, self._m = n, m
        self.wedge = WedgePlot(self.left, self.right)
        super().__init__([Plot(ChartDomain(D), "wedge_trig")], name=name)
        self.metric = WeakMetric(self, [self._gram_fn(convention)], name=f"g_∨({g_N.name})")

    def _side(self, r, k):
        n, m = self._n, self._m
        return np.concatenate([r[:n], r[n + k * m * n: n + (k + 1) * m * n]])

    def _sel(self, k):
        n, m = self._n, self._m
        D = n + 2 * m * n
        S = np.zeros((n + m * n, D))
        S[:n, :n] = np.eye(n)
        S[n:, n + k * m * n: n + (k + 1) * m * n] = np.eye(m * n)
        return S

    def _gram_fn(self, convention):
        def fld(r):
            G = wedge_gram(self.base_metric, self.wedge, r)
            if convention == "pullback":
                J = self.left.jacobians(r, [0.0])[0]
                G = G + J.T @ self.base_metric.gram(0, self.left.values(r, [0.0])[0]) @ J
            return G
        return fld


# -- gluing two loop spaces along the constant loops ---------------------------------------------

def _constant_locator(LN: LoopSpace, tol: float = 1e-9, n_probe: int = 16):
    probe = np.linspace(0.0, TWO_PI, n_probe, endpoint=False)

    def locate(plot, x):
        F = LN.families[plot]
        vals = F.values(as_vector(x), probe)
        if np.max(np.abs(vals - vals[0]), initial=0.0) > tol:
            return None
        return F.n_plot, vals[0]
    return locate


def mapping_pushout(N: DiffeoSpace, g_N: WeakMetric, degree: int = 1, volume_right: float = TWO_PI,
                    tol_compat: Optional[float] = None):
    """``LN ⊔_N LN'`` glued along the sections ``s: N -> LN`` and ``s': N -> LN'``.

    ``LN'`` carries its loop metric rescaled by ``volume_right / 2π``, i.e. the
    loop metric for a circle of that total volume; the sections are compatible
    exactly when both volumes agree.  Returns ``(space, metric, iota)`` with
    ``iota: N -> space`` the canonical injection through the left copy.
    """
    from .constructions import COMPAT_TOL, GlueSpec, adjunction

    L1 = LoopSpace(N, g_N, [trig_family(N, degree)], name="LN")
    L2 = LoopSpace(N, g_N, [trig_family(N, degree)], name="LN'")
    g1, g2 = L1.metric, L2.metric.scaled(volume_right / TWO_PI)
    s1, s2 = section_s(N, LN=L1), section_s(N, LN=L2)
    spec = GlueSpec(N, s1, s2, _constant_locator(L1), _constant_locator(L2),
                    COMPAT_TOL if tol_compat is None else tol_compat)
    space, metric = adjunction(L1, g1, L2, g2, spec, name="LN⊔_N LN'")

    def factorize(q, r):
        return Factorization(math.inf, q, ChartMap.identity(N.plots[q].domain))

    iota = SmoothMap(N, space, factorize, lambda p: Point(space.id, p.plot_index, p.coords),
                     name="iota")
    return space, metric, iota


def polynomial_wedge_family(N: DiffeoSpace, rng, degree: int = 2, poly_degree: int = 2,
                            dim: int = 2, scale: float = 1.0) -> WedgePlot:
    """A random wedge plot whose loop coefficients are polynomials in ``r``.

    Both components share the constant coefficient (the basepoint), so they are
    coherent by construction.  Monomials are ``r^α`` with ``|α| <= poly_degree``.
    """
    n = N.plots[0].domain.dim
    alphas = [a for a in np.ndindex(*(poly_degree + 1,) * dim) if sum(a) <= poly_degree]
    E = np.array(alphas, dtype=float)
    m = 2 * degree + 1
    base = rng.normal(scale=scale, size=(len(alphas), n))
    sides = [rng.normal(scale=scale, size=(len(alphas), m - 1, n)) for _ in range(2)]

    def mono(r):
        return np.prod(r[None, :] ** E, axis=1)

    def dmono(r):
        out = np.zeros((len(alphas), dim))
        for k in range(dim):
            e = E.copy()
            coef = e[:, k].copy()
            e[:, k] = np.maximum(e[:, k] - 1.0, 0.0)
            out[:, k] = coef * np.prod(r[None, :] ** e, axis=1)
        return out

    def family(C, label):
        def coeffs(r):
            u = mono(r)
            return np.vstack([u @ base, np.einsum("a,akn->kn", u, C)])

        def adjoint(r, th):
            return trig_basis(degree, th, based=True) @ coeffs(r)

        def d_adjoint(r, th):
            du = dmono(r)
            dC = np.vstack([np.einsum("ad,an->nd", du, base)[None],
                            np.einsum("ad,akn->knd", du, C)])
            return np.einsum("tk,knd->tnd", trig_basis(degree, th, based=True), dC)

        return MappingPlot(ChartDomain(dim), N, adjoint, d_adjoint, name=label)

    return WedgePlot(family(sides[0], "poly_left"), family(sides[1], "poly_right"))
