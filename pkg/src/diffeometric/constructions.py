"""Builders for weak Riemannian diffeological spaces.

Every builder returns ``(space, metric)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (EPS_EQ, ChartDomain, ChartMap, DiffeoError, DiffeoSpace, Factorization,
                   GlueRecord, Plot, Point, SmoothMap, UsageError, as_vector, eval_plot,
                   points_equal)
from .metric import WeakMetric, pullback

COMPAT_TOL = 1e-9


class ConstructionError(DiffeoError):
    def __init__(self, message, deviation: float = math.nan, worst=None):
        super().__init__(message)
        self.deviation = deviation
        self.worst = worst


def _as_tensor_field(tensor, n):
    if tensor is None:
        G = np.eye(n)
    elif callable(tensor):
        return tensor, None
    else:
        G = np.asarray(tensor, dtype=float).reshape(n, n)
    G = G.copy()
    G.setflags(write=False)
    return (lambda r: G), (lambda R: np.broadcast_to(G, (len(R), n, n)))


def _check_tensor(field, domain, rng, samples=32, half_width=5.0):
    for r in domain.sample(rng, samples, half_width=half_width):
        G = np.asarray(field(r), dtype=float)
        if not np.allclose(G, G.T, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(G)))):
            raise ConstructionError(f"tensor is not symmetric at r={r.tolist()}")
        if np.linalg.eigvalsh(0.5 * (G + G.T))[0] < -1e-12:
            raise ConstructionError(f"tensor is not positive at r={r.tolist()}")


def euclidean(n: int, tensor=None, name: Optional[str] = None, seed: int = 0):
    """R^n with its identity plot; ``tensor`` is a constant matrix or a field ``r -> matrix``."""
    dom = ChartDomain(n)
    space = DiffeoSpace([Plot(dom, f"id_R{n}")], name=name or f"R{n}")
    fld, batch = _as_tensor_field(tensor, n)
    _check_tensor(fld, dom, np.random.default_rng(seed))
    return space, WeakMetric(space, [fld], [batch], name="euclidean" if tensor is None else "tensor")


def point_space(name: str = "pt"):
    """The one-point space R^0."""
    space = DiffeoSpace([Plot(ChartDomain(0), "pt")], name=name)
    return space, WeakMetric(space, [lambda r: np.zeros((0, 0))], name="zero")


def _product_domain(dx: ChartDomain, dy: ChartDomain) -> ChartDomain:
    m = dx.dim
    membership = None
    if dx.membership is not None or dy.membership is not None:
        def membership(r):
            return dx.contains(r[:m]) and dy.contains(r[m:])
    return ChartDomain(dx.dim + dy.dim, dx.lower + dy.lower, dx.upper + dy.upper, membership)


def _product_map(f: ChartMap, g: ChartMap) -> ChartMap:
    m, n = f.source.dim, f.target.dim

    def value(r):
        return np.concatenate([f(r[:m]), g(r[m:])])

    def jac(r):
        J = np.zeros((n + g.target.dim, m + g.source.dim))
        J[:n, :m] = f.jacobian(r[:m])
        J[n:, m:] = g.jacobian(r[m:])
        return J

    return ChartMap(_product_domain(f.source, g.source), _product_domain(f.target, g.target),
                    value, jac, h=min(f.h, g.h), name=f"{f.name}×{g.name}")


def _product_space(X: DiffeoSpace, Y: DiffeoSpace, name: str) -> DiffeoSpace:
    nY = Y.n_plots
    plots = [Plot(_product_domain(p.domain, q.domain), f"({p.name},{q.name})")
             for p in X.plots for q in Y.plots]
    records = []
    for rec in X.glue_table:
        for j, q in enumerate(Y.plots):
            records.append(_lift_record(rec, q.domain, left=True, a=rec.a * nY + j, b=rec.b * nY + j))
    for rec in Y.glue_table:
        for i, p in enumerate(X.plots):
            records.append(_lift_record(rec, p.domain, left=False, a=i * nY + rec.a, b=i * nY + rec.b))

    def equality(p, q):
        (i1, x1, y1), (i2, x2, y2) = split(p), split(q)
        return (points_equal(X, Point(X.id, i1 // nY, x1), Point(X.id, i2 // nY, x2))
                and points_equal(Y, Point(Y.id, i1 % nY, y1), Point(Y.id, i2 % nY, y2)))

    def split(p):
        m = X.plots[p.plot_index // nY].domain.dim
        return p.plot_index, tuple(p.coords[:m]), tuple(p.coords[m:])

    return DiffeoSpace(plots, records, equality=equality, name=name)


def _lift_record(rec: GlueRecord, other: ChartDomain, left: bool, a: int, b: int) -> GlueRecord:
    ident = ChartMap.identity(other)
    k = rec.param_domain.dim
    if left:
        m_a = rec.embed_a.target.dim
        m_b = rec.embed_b.target.dim
        ea, eb = _product_map(rec.embed_a, ident), _product_map(rec.embed_b, ident)
        pdom = _product_domain(rec.param_domain, other)

        def loc(locate, m):
            def f(x):
                t = locate(x[:m])
                return None if t is None else np.concatenate([as_vector(t) if k else np.zeros(0), x[m:]])
            return f
        return GlueRecord(a, b, pdom, ea, eb, loc(rec.locate_a, m_a), loc(rec.locate_b, m_b), rec.name)
    m = other.dim
    ea, eb = _product_map(ident, rec.embed_a), _product_map(ident, rec.embed_b)
    pdom = _product_domain(other, rec.param_domain)

    def loc(locate):
        def f(x):
            t = locate(x[m:])
            return None if t is None else np.concatenate([x[:m], as_vector(t) if k else np.zeros(0)])
        return f
    return GlueRecord(a, b, pdom, ea, eb, loc(rec.locate_a), loc(rec.locate_b), rec.name)


@dataclass
class WarpSpec:
    """Positive warping function on X, one smooth function per generating plot of X."""

    by_plot: Sequence[Callable]
    name: str = "f"

    @classmethod
    def constant(cls, space: DiffeoSpace, c: float = 1.0) -> "WarpSpec":
        return cls([lambda r: c] * space.n_plots, name=f"const{c:g}")

    @classmethod
    def exp2x(cls, space: DiffeoSpace) -> "WarpSpec":
        """``f = exp(2 x)`` with ``x`` the first chart coordinate."""
        return cls([lambda r: math.exp(2.0 * r[0])] * space.n_plots, name="exp2x")

    def __call__(self, plot_index: int, r) -> float:
        return float(self.by_plot[plot_index](r))


def _check_warp(X: DiffeoSpace, f: WarpSpec, rng, samples=32, half_width=5.0):
    if len(f.by_plot) != X.n_plots:
        raise ConstructionError("warp function needs one entry per generating plot of X")
    for i, p in enumerate(X.plots):
        for r in p.domain.sample(rng, samples, half_width=half_width):
            if not f(i, r) > 0:
                raise ConstructionError(f"warp function is not positive at plot {i}, r={r.tolist()}")
    for rec in X.glue_table:
        if rec.param_domain.dim == 0:
            ts = [np.zeros(0)]
        else:
            ts = rec.param_domain.sample(rng, samples, half_width=half_width)
        for t in ts:
            fa, fb = f(rec.a, rec.embed_a(t)), f(rec.b, rec.embed_b(t))
            if abs(fa - fb) > 1e-9 * max(1.0, abs(fa)):
                raise ConstructionError(f"warp function disagrees across glue record {rec.name!r}")


def warped_product(X: DiffeoSpace, g_X: WeakMetric, Y: DiffeoSpace, g_Y: WeakMetric,
                   f: WarpSpec, seed: int = 0, name: Optional[str] = None):
    """Product space with metric ``g_X(v1, w1) + f(x) g_Y(v2, w2)`` on pair plots."""
    _check_warp(X, f, np.random.default_rng(seed))
    nY = Y.n_plots
    space = _product_space(X, Y, name or f"{X.name}x_{f.name}{Y.name}")

    def field_for(k):
        i, j = divmod(k, nY)
        m = X.plots[i].domain.dim

        def fld(r):
            Gx, Gy = g_X.gram(i, r[:m]), g_Y.gram(j, r[m:])
            n = Gy.shape[0]
            G = np.zeros((m + n, m + n))
            G[:m, :m] = Gx
            G[m:, m:] = f(i, r[:m]) * Gy
            return G
        return fld

    fields = [field_for(k) for k in range(space.n_plots)]
    return space, WeakMetric(space, fields, name=f"{g_X.name}+{f.name}·{g_Y.name}")


def product(X, g_X, Y, g_Y, name: Optional[str] = None):
    """Product metric ``g_X ⊕ g_Y`` (the warped product with ``f = 1``)."""
    return warped_product(X, g_X, Y, g_Y, WarpSpec.constant(X, 1.0), name=name or f"{X.name}x{Y.name}")


@dataclass
class GlueSpec:
    """Attaching data ``X <-i- A -j-> Y`` for an adjunction space.

    ``i`` and ``j`` must factor globally through single generating plots on each
    plot of ``A``.  ``locate_x(x_plot, coords)`` returns ``(a_plot, t)`` with
    ``i(A_plot(t)) = X_plot(coords)``, or ``None`` off ``i(A)``; likewise ``locate_y``.
    """

    A: DiffeoSpace
    i: SmoothMap
    j: SmoothMap
    locate_x: Callable
    locate_y: Callable
    tol_compat: float = COMPAT_TOL
    samples: int = 50
    half_width: float = 5.0


def _global_factor(phi: SmoothMap, k: int) -> Factorization:
    dom = phi.source.plots[k].domain
    r0 = dom.sample(np.random.default_rng(0), 1, half_width=5.0)[0]
    fac = phi.raw_factorize(k, r0)
    if fac is None or not math.isinf(fac.radius):
        raise ConstructionError(f"{phi.name}: plot {k} of A must factor globally through one plot")
    return fac


def check_compatibility(spec: GlueSpec, g_X: WeakMetric, g_Y: WeakMetric, seed: int = 0):
    """Worst spectral-norm gap between ``i* g_X`` and ``j* g_Y`` on sampled points of A."""
    pi, pj = pullback(spec.i, g_X), pullback(spec.j, g_Y)
    rng = np.random.default_rng(seed)
    dev, worst = 0.0, None
    for k, plot in enumerate(spec.A.plots):
        if plot.domain.dim == 0:
            continue
        for r in plot.domain.sample(rng, spec.samples, half_width=spec.half_width):
            D = pi.gram(k, r) - pj.gram(k, r)
            gap = float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (D + D.T)))))
            if gap >= dev:
                dev = gap
                w, V = np.linalg.eigh(0.5 * (D + D.T))
                v = V[:, np.argmax(np.abs(w))]
                worst = {"plot": k, "r": r.tolist(), "v": v.tolist(), "w": v.tolist(),
                         "i*g_X": float(v @ pi.gram(k, r) @ v), "j*g_Y": float(v @ pj.gram(k, r) @ v)}
    return dev, worst


def adjunction(X: DiffeoSpace, g_X: WeakMetric, Y: DiffeoSpace, g_Y: WeakMetric,
               spec: GlueSpec, name: Optional[str] = None, seed: int = 0):
    """Adjunction space ``X ⊔_A Y`` with the glued metric.

    Plots of the result are X's plots followed by Y's (shifted by ``X.n_plots``);
    each remembers its side, so the metric delegates to ``g_X`` or ``g_Y``.
    """
    if spec.i.target is not X or spec.j.target is not Y:
        raise UsageError("attaching maps must target X and Y")
    dev, worst = check_compatibility(spec, g_X, g_Y, seed)
    if dev > spec.tol_compat:
        raise ConstructionError(
            f"metrics disagree on A: deviation {dev:.6g} > {spec.tol_compat:g} at {worst}",
            deviation=dev, worst=worst)
    nX = X.n_plots
    records = list(X.glue_table) + [rec.shifted(nX, nX) for rec in Y.glue_table]
    for k, plot in enumerate(spec.A.plots):
        fi, fj = _global_factor(spec.i, k), _global_factor(spec.j, k)

        def loc(locate, side_plot, k=k):
            def f(x):
                hit = locate(side_plot, x)
                if hit is None or hit[0] != k:
                    return None
                return as_vector(hit[1]) if plot.domain.dim else np.zeros(0)
            return f

        records.append(GlueRecord(fi.target_plot, nX + fj.target_plot, plot.domain, fi.h, fj.h,
                                  loc(spec.locate_x, fi.target_plot),
                                  loc(spec.locate_y, fj.target_plot),
                                  name=f"A{k}"))
    equality = None
    if X._equality is not None or Y._equality is not None:
        equality = _pushout_equality(X, Y, spec, nX)
    space = DiffeoSpace(X.plots + Y.plots, records, equality=equality,
                        name=name or f"{X.name}⊔_A{Y.name}")
    metric = WeakMetric(space, g_X.fields + g_Y.fields, g_X.batch_fields + g_Y.batch_fields,
                        name=f"{g_X.name}⊔{g_Y.name}")
    return space, metric


def _pushout_equality(X: DiffeoSpace, Y: DiffeoSpace, spec: GlueSpec, nX: int):
    # i and j are inductions, so same-side points are identified only by their own
    # space and cross-side points only through A
    def local(p):
        if p.plot_index < nX:
            return 0, X, Point(X.id, p.plot_index, p.coords)
        return 1, Y, Point(Y.id, p.plot_index - nX, p.coords)

    def in_A(side, S, p):
        locate = spec.locate_x if side == 0 else spec.locate_y
        for idx, x in S.representatives(p):
            hit = locate(idx, x)
            if hit is not None:
                return eval_plot(spec.A, hit[0], hit[1])
        return None

    def equality(p, q):
        (sp, Sp, lp), (sq, Sq, lq) = local(p), local(q)
        if sp == sq:
            return points_equal(Sp, lp, lq)
        a, b = in_A(sp, Sp, lp), in_A(sq, Sq, lq)
        return a is not None and b is not None and points_equal(spec.A, a, b)

    return equality


def embedded_space(X: DiffeoSpace, charts: Sequence, name: str = "sub"):
    """A space generated by plots of ``X``, with equality inherited from ``X``.

    ``charts`` is a list of ``(target_plot, h)`` with ``h`` a ChartMap into the
    domain of ``X``'s plot ``target_plot``.  Returns ``(space, inclusion)``.
    """
    charts = list(charts)

    def image(p: Point) -> Point:
        q, h = charts[p.plot_index]
        return eval_plot(X, q, h(p.coords))

    def equality(p, q):
        return points_equal(X, image(p), image(q))

    space = DiffeoSpace([Plot(h.source, f"{name}{k}") for k, (q, h) in enumerate(charts)],
                        equality=equality, name=name)

    def factorize(k, r):
        q, h = charts[k]
        return Factorization(math.inf, q, h)

    return space, SmoothMap(space, X, factorize, image, name=f"incl_{name}")


def subspace(X: DiffeoSpace, g_X: WeakMetric, inclusion: SmoothMap):
    """The inclusion's source with the pulled-back metric ``inclusion* g_X``."""
    if inclusion.target is not X:
        raise UsageError("inclusion must target X")
    return inclusion.source, pullback(inclusion, g_X)


def sum_space(parts: Sequence, name: Optional[str] = None):
    """Disjoint union of ``[(space, metric), ...]``."""
    parts = list(parts)
    if len(parts) == 1:
        return parts[0]
    plots, records, fields, batches, comps, offsets = [], [], [], [], [], []
    for c, (S, g) in enumerate(parts):
        off = len(plots)
        offsets.append(off)
        plots += S.plots
        records += [rec.shifted(off, off) for rec in S.glue_table]
        fields += g.fields
        batches += g.batch_fields
        comps += [c] * S.n_plots

    def local(p):
        c = comps[p.plot_index]
        S = parts[c][0]
        return c, Point(S.id, p.plot_index - offsets[c], p.coords)

    def equality(p, q):
        (c1, p1), (c2, q1) = local(p), local(q)
        return c1 == c2 and points_equal(parts[c1][0], p1, q1)

    space = DiffeoSpace(plots, records, equality=equality,
                        name=name or "⊔".join(S.name for S, _ in parts), components=comps)
    return space, WeakMetric(space, fields, batches, name="sum")


# -- attaching along a coordinate interval ------------------------------------------------

def axis_glue(X: DiffeoSpace, Y: DiffeoSpace, a: float, b: float, x_plot: int = 0,
              y_plot: int = 0, tol_compat: float = COMPAT_TOL) -> GlueSpec:
    """Attach along ``A = (a, b)`` embedded in both charts as ``t -> (t, 0, ..., 0)``.

    ``a == b`` attaches the single point ``(a, 0, ..., 0)``.
    """
    mX, mY = X.plots[x_plot].domain.dim, Y.plots[y_plot].domain.dim
    if a == b:
        A_dom = ChartDomain(0)
        embed = lambda m: ChartMap(A_dom, ChartDomain(m), lambda t: np.eye(m)[0] * a,
                                   lambda t: np.zeros((m, 0)), name="pt")

        def locate(target_plot, m):
            def f(plot, x):
                if plot != target_plot:
                    return None
                x = as_vector(x)
                ok = abs(x[0] - a) <= EPS_EQ and np.all(np.abs(x[1:]) <= EPS_EQ)
                return (0, np.zeros(0)) if ok else None
            return f
    else:
        A_dom = ChartDomain.interval(a, b)
        embed = lambda m: ChartMap(A_dom, ChartDomain(m), lambda t: np.eye(m)[0] * t[0],
                                   lambda t: np.eye(m)[:, :1], name="axis")

        def locate(target_plot, m):
            def f(plot, x):
                if plot != target_plot:
                    return None
                x = as_vector(x)
                if np.any(np.abs(x[1:]) > EPS_EQ) or not (a < x[0] < b):
                    return None
                return 0, x[:1]
            return f

    A = DiffeoSpace([Plot(A_dom, "A")], name=f"A({a},{b})")
    ei, ej = embed(mX), embed(mY)
    i = SmoothMap(A, X, lambda k, r: Factorization(math.inf, x_plot, ei),
                  lambda p: eval_plot(X, x_plot, ei(p.coords)), name="i")
    j = SmoothMap(A, Y, lambda k, r: Factorization(math.inf, y_plot, ej),
                  lambda p: eval_plot(Y, y_plot, ej(p.coords)), name="j")
    return GlueSpec(A, i, j, locate(x_plot, mX), locate(y_plot, mY), tol_compat)


def glue_euclidean(m: int, n: int, a: float, b: float, left_tensor=None, right_tensor=None,
                   name: Optional[str] = None, tol_compat: float = COMPAT_TOL):
    """``R^m ⊔_{(a,b)} R^n`` glued along the first axis."""
    X, gX = euclidean(m, left_tensor, name=f"R{m}_1")
    Y, gY = euclidean(n, right_tensor, name=f"R{n}_2")
    spec = axis_glue(X, Y, a, b, tol_compat=tol_compat)
    return adjunction(X, gX, Y, gY, spec, name=name)


def y_space():
    """``R_1 ⊔_{(1,∞)} R_2`` with the standard metric on both copies."""
    return glue_euclidean(1, 1, 1.0, math.inf, name="Y")


def plus_space():
    """``R_1 ⊔_{0} R_2``, two lines crossing at their origins."""
    return glue_euclidean(1, 1, 0.0, 0.0, name="+")


def m_space():
    """``R ⊔_{(1,∞)} R^2``, a half-line of R^2 identified with (1,∞) ⊂ R."""
    return glue_euclidean(1, 2, 1.0, math.inf, name="M")
