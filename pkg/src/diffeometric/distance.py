"""Paths, their lengths, and certified upper bounds on the path-length pseudodistance.

A path is a chain of segments, each a control polygon inside one generating
plot.  Consecutive segments meet at a joint; a joint that sits in a glue region
is parametrized by the record's attaching chart and may slide during
optimization.  Upper bounds are always lengths of stored witness paths.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import DiffeoSpace, Point, eval_plot, points_equal
from .linalg import gl_nodes, max_eigen
from .mapping import smoothstep, smoothstep_prime
from .metric import WeakMetric

INF = math.inf
# relative outward rounding of reported upper bounds (absorbs summation rounding)
BOUND_ROUNDING = 1e-13


class PathValidationError(ValueError):
    pass


@dataclass
class PathSegment:
    """Control polygon ``control`` (shape (k, dim), k >= 2) in generating plot ``plot_index``.

    With ``smooth`` set, each polygon edge is traversed with the C^∞ step
    ``ψ`` as time profile, so the velocity and all its derivatives vanish at
    every vertex and the segment is a smooth curve.
    """

    plot_index: int
    control: np.ndarray
    smooth: bool = False

    def __post_init__(self):
        self.control = np.asarray(self.control, dtype=float)
        if self.control.ndim != 2 or len(self.control) < 2:
            raise ValueError("a segment needs at least two control points")

    @property
    def dim(self) -> int:
        return self.control.shape[1]

    @property
    def start(self) -> np.ndarray:
        return self.control[0]

    @property
    def end(self) -> np.ndarray:
        return self.control[-1]

    def curve(self, t) -> np.ndarray:
        """Position at local parameter ``t ∈ [0, 1]``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        n_edges = len(self.control) - 1
        s = np.clip(t, 0.0, 1.0) * n_edges
        k = np.minimum(s.astype(int), n_edges - 1)
        u = s - k
        if self.smooth:
            u = smoothstep(u)
        return self.control[k] + u[:, None] * (self.control[k + 1] - self.control[k])

    def velocity(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        n_edges = len(self.control) - 1
        s = np.clip(t, 0.0, 1.0) * n_edges
        k = np.minimum(s.astype(int), n_edges - 1)
        rate = np.full_like(s, float(n_edges))
        if self.smooth:
            rate = rate * smoothstep_prime(s - k)
        return rate[:, None] * (self.control[k + 1] - self.control[k])

    def reversed(self) -> "PathSegment":
        return PathSegment(self.plot_index, self.control[::-1].copy(), self.smooth)


@dataclass
class Joint:
    """Junction between two segments.

    ``record`` indexes the space's glue table (``None`` for a fixed joint whose
    two sides are only known to be equal points).  ``forward`` means the path
    crosses from ``record.a`` to ``record.b``; ``param`` is the attaching-chart
    coordinate of the junction.
    """

    record: Optional[int] = None
    forward: bool = True
    param: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def reversed(self) -> "Joint":
        return Joint(self.record, not self.forward, self.param.copy())


@dataclass
class PiecewisePath:
    segments: list
    joints: list
    start: Point
    end: Point

    def __post_init__(self):
        if len(self.joints) != len(self.segments) - 1:
            raise ValueError("need exactly one joint between consecutive segments")

    def reversed(self) -> "PiecewisePath":
        return PiecewisePath([s.reversed() for s in self.segments[::-1]],
                             [j.reversed() for j in self.joints[::-1]], self.end, self.start)

    def smoothed(self) -> "PiecewisePath":
        return replace(self, segments=[replace(s, smooth=True) for s in self.segments])

    def to_json(self) -> dict:
        return {"segments": [{"plot": s.plot_index, "control": s.control.tolist(), "smooth": s.smooth}
                             for s in self.segments],
                "joints": [{"record": j.record, "forward": j.forward, "param": j.param.tolist()}
                           for j in self.joints]}


def concat_paths(first: PiecewisePath, second: PiecewisePath) -> PiecewisePath:
    """Run ``first`` then ``second``; the junction is a fixed joint."""
    return PiecewisePath(first.segments + second.segments, first.joints + [Joint()] + second.joints,
                         first.start, second.end)


def straight_path(space: DiffeoSpace, x: Point, y: Point, n_control: int = 2) -> PiecewisePath:
    """Single-chart chord from ``x`` to ``y`` (both represented in the same plot)."""
    if x.plot_index != y.plot_index:
        raise PathValidationError("a chord needs both endpoints in one plot")
    ctrl = np.linspace(x.r, y.r, max(n_control, 2))
    return PiecewisePath([PathSegment(x.plot_index, ctrl)], [], x, y)


def _edge_in_domain(dom, a, b, n_probe=8) -> bool:
    if dom.membership is None:
        return dom.contains(a) and dom.contains(b)
    return all(dom.contains(a + s * (b - a)) for s in np.linspace(0.0, 1.0, n_probe))


def validate_path(space: DiffeoSpace, path: PiecewisePath) -> None:
    """Raise :class:`PathValidationError` naming the first broken joint or segment."""
    for k, seg in enumerate(path.segments):
        dom = space.plot(seg.plot_index).domain
        if seg.dim != dom.dim:
            raise PathValidationError(f"segment {k}: dimension {seg.dim} != plot dimension {dom.dim}")
        for a, b in zip(seg.control[:-1], seg.control[1:]):
            if not _edge_in_domain(dom, a, b):
                raise PathValidationError(f"segment {k} leaves the domain of plot {seg.plot_index}")
    first, last = path.segments[0], path.segments[-1]
    if not points_equal(space, eval_plot(space, first.plot_index, first.start), path.start):
        raise PathValidationError("path does not start at the declared start point")
    if not points_equal(space, eval_plot(space, last.plot_index, last.end), path.end):
        raise PathValidationError("path does not end at the declared end point")
    for k, (s0, s1) in enumerate(zip(path.segments[:-1], path.segments[1:])):
        p = eval_plot(space, s0.plot_index, s0.end)
        q = eval_plot(space, s1.plot_index, s1.start)
        if not points_equal(space, p, q):
            raise PathValidationError(f"joint {k}: {p} != {q}")


def _edge_lengths(g: WeakMetric, seg: PathSegment, panels: int, order: int,
                  edges: Optional[Sequence[int]] = None) -> np.ndarray:
    """Metric length of each polygon edge, by composite Gauss-Legendre on [0, 1]."""
    ctrl = seg.control
    idx = np.arange(len(ctrl) - 1) if edges is None else np.asarray(edges, dtype=int)
    if seg.dim == 0 or len(idx) == 0:
        return np.zeros(len(idx))
    u, wts = gl_nodes(0.0, 1.0, panels, order)
    prof = smoothstep(u) if seg.smooth else u
    rate = smoothstep_prime(u) if seg.smooth else np.ones_like(u)
    D = ctrl[idx + 1] - ctrl[idx]                                   # (e, d)
    X = ctrl[idx][:, None, :] + prof[None, :, None] * D[:, None, :]  # (e, q, d)
    G = g.grams(seg.plot_index, X.reshape(-1, seg.dim)).reshape(len(idx), len(u), seg.dim, seg.dim)
    quad = np.einsum("ei,eqij,ej->eq", D, G, D)
    speed = rate[None, :] * np.sqrt(np.maximum(quad, 0.0))
    return speed @ wts


def path_length(path: PiecewisePath, g: WeakMetric, panels: int = 32, order: int = 8,
                validate: bool = True) -> float:
    """``Σ_k ∫ g(P_k)(c_k', c_k')^{1/2} dt`` over all segments."""
    if validate:
        validate_path(g.space, path)
    return float(sum(math.fsum(_edge_lengths(g, s, panels, order)) for s in path.segments))


# -- transition graph -----------------------------------------------------------------------------

@dataclass
class TransitionEdge:
    a: int
    b: int
    record: int
    anchors: np.ndarray


@dataclass
class TransitionGraph:
    nodes: list
    edges: list

    def neighbours(self, plot: int):
        """``(next_plot, record_index, forward)`` for every edge touching ``plot``."""
        for e in self.edges:
            if e.a == plot:
                yield e.b, e.record, True
            if e.b == plot:
                yield e.a, e.record, False


def _param_window(dom, window: float, margin: float):
    lo, hi = dom.window(window)
    width = hi - lo
    m = np.minimum(margin, 0.25 * width)
    return lo + m, hi - m


def sample_anchors(dom, n: int, window: float = 10.0, margin: float = 0.0,
                   rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Anchor parameters in an attaching chart, kept ``margin`` inside its box."""
    if dom.dim == 0:
        return np.zeros((1, 0))
    lo, hi = _param_window(dom, window, margin)
    if dom.dim == 1:
        pts = np.linspace(lo[0], hi[0], max(n, 2))[:, None]
    else:
        rng = rng or np.random.default_rng(0)
        corners = np.array(np.meshgrid(*zip(lo, hi), indexing="ij")).reshape(dom.dim, -1).T
        pts = np.vstack([corners, rng.uniform(lo, hi, size=(n, dom.dim))])
    return np.array([p for p in pts if dom.contains(p)]).reshape(-1, dom.dim)


def transition_graph(space: DiffeoSpace, n_anchors: int = 16, window: float = 10.0,
                     margin: float = 0.0, seed: int = 0) -> TransitionGraph:
    """Plots as nodes, glue records as edges carrying sampled anchor parameters."""
    rng = np.random.default_rng(seed)
    edges = [TransitionEdge(rec.a, rec.b, k, sample_anchors(rec.param_domain, n_anchors, window,
                                                             margin, rng))
             for k, rec in enumerate(space.glue_table)]
    return TransitionGraph(list(range(space.n_plots)), edges)


# -- search --------------------------------------------------------------------------------------

@dataclass
class SearchConfig:
    control_points_per_segment: int = 8
    refinement_levels: int = 5
    anchor_samples_per_glue_region: int = 16
    max_charts: int = 4
    step_decays: int = 12
    decay: float = 0.5
    initial_step: Optional[float] = None
    max_sweeps: int = 40
    panels: int = 32
    order: int = 8
    opt_panels: int = 1
    opt_order: int = 8
    margin0: float = 1.0
    window: float = 10.0
    seed: int = 0
    smooth: bool = True
    threads: Optional[int] = None

    def __post_init__(self):
        counts = (self.control_points_per_segment, self.refinement_levels,
                  self.anchor_samples_per_glue_region, self.max_charts, self.panels, self.order,
                  self.opt_panels, self.opt_order)
        if min(counts) < 1:
            raise ValueError("all SearchConfig counts must be >= 1")

    def margin(self, level: int) -> float:
        """Distance kept from the boundary of open glue regions at ``level`` (halves per level)."""
        return self.margin0 * 2.0 ** (-level)

    def workers(self) -> int:
        if self.threads is not None:
            return max(1, self.threads)
        return max(1, int(os.environ.get("DIFFEO_THREADS", "1")))


@dataclass
class DistanceResult:
    bound: float
    path: Optional[PiecewisePath]
    trace: list
    raw_length: float = INF
    smooth_length: float = INF
    level_paths: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"bound": "inf" if math.isinf(self.bound) else self.bound,
                "trace": ["inf" if math.isinf(b) else b for b in self.trace],
                "path": None if self.path is None else self.path.to_json()}


class _Optimizer:
    """Coordinate descent over interior control points and sliding joints."""

    def __init__(self, g: WeakMetric, path: PiecewisePath, cfg: SearchConfig, margin: float):
        self.g, self.cfg, self.margin = g, cfg, margin
        self.space = g.space
        self.segs = [PathSegment(s.plot_index, s.control.copy(), False) for s in path.segments]
        self.joints = [Joint(j.record, j.forward, np.array(j.param, dtype=float)) for j in path.joints]
        self.start, self.end = path.start, path.end
        self.lengths = [self._edges(k) for k in range(len(self.segs))]

    def _edges(self, k, idx=None):
        return _edge_lengths(self.g, self.segs[k], self.cfg.opt_panels, self.cfg.opt_order, idx)

    def total(self) -> float:
        return float(sum(l.sum() for l in self.lengths))

    def path(self) -> PiecewisePath:
        return PiecewisePath([PathSegment(s.plot_index, s.control.copy()) for s in self.segs],
                             [Joint(j.record, j.forward, j.param.copy()) for j in self.joints],
                             self.start, self.end)

    def _ok_edges(self, k, idx):
        seg = self.segs[k]
        dom = self.space.plots[seg.plot_index].domain
        return all(_edge_in_domain(dom, seg.control[i], seg.control[i + 1]) for i in idx)

    def _try_control(self, k, i, axis, delta) -> bool:
        seg = self.segs[k]
        old = seg.control[i, axis]
        seg.control[i, axis] = old + delta
        idx = [i - 1, i]
        if self._ok_edges(k, idx):
            new = self._edges(k, idx)
            if new.sum() < self.lengths[k][idx].sum() - 1e-15:
                self.lengths[k][idx] = new
                return True
        seg.control[i, axis] = old
        return False

    def _joint_ends(self, m, t):
        rec = self.space.glue_table[self.joints[m].record]
        e_src, e_dst = (rec.embed_a, rec.embed_b) if self.joints[m].forward else (rec.embed_b, rec.embed_a)
        return e_src(t), e_dst(t)

    def _param_ok(self, m, t) -> bool:
        dom = self.space.glue_table[self.joints[m].record].param_domain
        if not dom.contains(t):
            return False
        lo, hi = _param_window(dom, np.inf, self.margin)
        return bool(np.all(t >= lo - 1e-15) and np.all(t <= hi + 1e-15))

    def _try_joint(self, m, axis, delta) -> bool:
        j = self.joints[m]
        t = j.param.copy()
        t[axis] += delta
        if not self._param_ok(m, t):
            return False
        left, right = self.segs[m], self.segs[m + 1]
        a_old, b_old = left.control[-1].copy(), right.control[0].copy()
        a_new, b_new = self._joint_ends(m, t)
        left.control[-1], right.control[0] = a_new, b_new
        il, ir = [len(left.control) - 2], [0]
        if self._ok_edges(m, il) and self._ok_edges(m + 1, ir):
            nl, nr = self._edges(m, il), self._edges(m + 1, ir)
            if nl.sum() + nr.sum() < self.lengths[m][il].sum() + self.lengths[m + 1][ir].sum() - 1e-15:
                self.lengths[m][il], self.lengths[m + 1][ir] = nl, nr
                j.param = t
                return True
        left.control[-1], right.control[0] = a_old, b_old
        return False

    def run(self):
        cfg = self.cfg
        moves = [("c", k, i, a) for k, s in enumerate(self.segs)
                 for i in range(1, len(s.control) - 1) for a in range(s.dim)]
        moves += [("j", m, None, a) for m, j in enumerate(self.joints)
                  if j.record is not None for a in range(len(j.param))]
        if not moves:
            return
        step = cfg.initial_step
        if step is None:
            spans = [np.max(np.abs(s.control[-1] - s.control[0]), initial=0.0) for s in self.segs]
            step = 0.25 * max(max(spans, default=0.0), 1e-3)
        for _ in range(cfg.step_decays + 1):
            for _ in range(cfg.max_sweeps):
                improved = False
                for kind, k, i, a in moves:
                    for delta in (step, -step):
                        ok = self._try_control(k, i, a, delta) if kind == "c" else self._try_joint(k, a, delta)
                        if ok:
                            improved = True
                            break
                if not improved:
                    break
            step *= cfg.decay


def refine_path(path: PiecewisePath, g: WeakMetric, cfg: Optional[SearchConfig] = None,
                margin: float = 0.0) -> PiecewisePath:
    """Shorten ``path`` by coordinate descent; never returns a longer path."""
    cfg = cfg or SearchConfig()
    validate_path(g.space, path)
    before = path_length(path, g, cfg.panels, cfg.order, validate=False)
    opt = _Optimizer(g, path, cfg, margin)
    opt.run()
    out = opt.path()
    validate_path(g.space, out)
    if path_length(out, g, cfg.panels, cfg.order, validate=False) <= before + 1e-12:
        return out
    return path


def _walks(graph: TransitionGraph, start: int, end: int, max_charts: int):
    """Chart sequences from ``start`` to ``end`` with at most ``max_charts`` charts.

    Each step is ``(next_plot, record, forward)``; a record is never crossed
    straight back.
    """
    out = []
    stack = [(start, [])]
    while stack:
        plot, steps = stack.pop()
        if plot == end:
            out.append(steps)
        if len(steps) + 1 >= max_charts:
            continue
        for nxt, rec, fwd in graph.neighbours(plot):
            if steps and steps[-1][1] == rec and steps[-1][2] != fwd:
                continue
            stack.append((nxt, steps + [(nxt, rec, fwd)]))
    out.sort(key=lambda s: (len(s), [(p, r, not f) for p, r, f in s]))
    return out


def _chord_length(g, plot, a, b, cfg) -> float:
    dom = g.space.plots[plot].domain
    if not _edge_in_domain(dom, a, b):
        return INF
    seg = PathSegment(plot, np.vstack([a, b]))
    return float(_edge_lengths(g, seg, cfg.opt_panels, cfg.opt_order).sum())


def _seed_path(g: WeakMetric, x: Point, xr, y: Point, yr, steps, cfg: SearchConfig, margin: float,
               rng) -> Optional[PiecewisePath]:
    """Initial path along ``steps``, joints chosen among anchors by dynamic programming."""
    space = g.space
    plots = [xr[0]] + [s[0] for s in steps]
    # per joint: list of (param, coords on the leaving side, coords on the entering side)
    options = []
    for (nxt, rec_i, fwd) in steps:
        rec = space.glue_table[rec_i]
        e_src, e_dst = (rec.embed_a, rec.embed_b) if fwd else (rec.embed_b, rec.embed_a)
        anchors = sample_anchors(rec.param_domain, cfg.anchor_samples_per_glue_region,
                                 cfg.window, margin, rng)
        options.append([(t, e_src(t), e_dst(t)) for t in anchors])
    # dynamic programming over anchor choices
    entries = [(0.0, None, xr[1])]   # (cost, back-pointer, entry coords in current plot)
    layers = []
    for k, opts in enumerate(options):
        layer = []
        for t, a_src, a_dst in opts:
            best = (INF, None)
            for ei, (cost, _, entry) in enumerate(entries):
                if math.isinf(cost):
                    continue
                c = cost + _chord_length(g, plots[k], entry, a_src, cfg)
                if c < best[0]:
                    best = (c, ei)
            layer.append((best[0], best[1], a_dst))
        layers.append(layer)
        entries = layer
    finals = [cost + _chord_length(g, plots[-1], entry, yr[1], cfg) for cost, _, entry in entries]
    if not finals or math.isinf(min(finals)):
        return None
    choice = int(np.argmin(finals))
    picks = []
    for k in range(len(layers) - 1, -1, -1):
        picks.append(choice)
        choice = layers[k][choice][1]
    picks.reverse()
    n_ctrl = cfg.control_points_per_segment
    segs, joints = [], []
    entry = xr[1]
    for k, (step, pick) in enumerate(zip(steps, picks)):
        t, a_src, a_dst = options[k][pick]
        segs.append(PathSegment(plots[k], np.linspace(entry, a_src, max(n_ctrl, 2))))
        joints.append(Joint(step[1], step[2], np.array(t, dtype=float)))
        entry = a_dst
    segs.append(PathSegment(plots[-1], np.linspace(entry, yr[1], max(n_ctrl, 2))))
    return PiecewisePath(segs, joints, x, y)


def _optimize(g, path, cfg, margin):
    opt = _Optimizer(g, path, cfg, margin)
    opt.run()
    return opt.total(), opt.path()


def pseudodistance_upper(space: DiffeoSpace, g: WeakMetric, x: Point, y: Point,
                         cfg: Optional[SearchConfig] = None,
                         candidates: Sequence[PiecewisePath] = ()) -> DistanceResult:
    """Upper bounds on ``d(x, y) = inf ℓ(γ)``, one per refinement level.

    ``candidates`` are extra witness paths from ``x`` to ``y`` (for example the
    reversal of a path from ``y`` to ``x``, or a concatenation through a third
    point); they compete with the enumerated chart sequences.  The bound is
    ``inf`` when no chart sequence joins ``x`` to ``y``.
    """
    cfg = cfg or SearchConfig()
    if g.space is not space:
        raise ValueError("metric does not belong to the space")
    rng = np.random.default_rng(cfg.seed)
    x_reps = space.representatives(x)
    y_reps = space.representatives(y)
    graph = transition_graph(space, 0)
    jobs = []
    for xr in x_reps:
        for yr in y_reps:
            for steps in _walks(graph, xr[0], yr[0], cfg.max_charts):
                jobs.append((xr, yr, steps))
    extra = []
    for c in candidates:
        validate_path(space, c)
        if not (points_equal(space, c.start, x) and points_equal(space, c.end, y)):
            raise PathValidationError("candidate path does not join x to y")
        extra.append(PiecewisePath(c.segments, c.joints, x, y))
    if not jobs and not extra:
        return DistanceResult(INF, None, [INF] * cfg.refinement_levels)

    best, best_path, trace, level_paths = None, None, [], []
    for level in range(1, cfg.refinement_levels + 1):
        margin = cfg.margin(level)
        seeds = []
        for xr, yr, steps in jobs:
            p = _seed_path(g, x, xr, y, yr, steps, cfg, margin, rng)
            if p is not None:
                seeds.append(p)
        seeds += extra
        if best_path is not None:
            seeds.append(best_path)
        with ThreadPoolExecutor(max_workers=cfg.workers()) as pool:
            results = list(pool.map(lambda p: _optimize(g, p, cfg, margin), seeds))
        # reduction in seed order keeps the choice deterministic
        for _, p in results:
            cand = certified_length(p, g, cfg)
            if best is None or cand[0] < best[0]:
                best, best_path = cand, p
        trace.append(INF if best is None else best[0])
        level_paths.append(None if best is None else best[3])
    if best_path is None:
        return DistanceResult(INF, None, trace, level_paths=level_paths)
    validate_path(space, best[3])
    bound, raw, smooth_len, witness = best
    return DistanceResult(bound, witness, trace, raw, smooth_len, level_paths)


def certified_length(path: PiecewisePath, g: WeakMetric, cfg: SearchConfig):
    """``(bound, raw, smoothed, witness)`` for a polygon path.

    The witness is the smoothed path when ``cfg.smooth`` is set.  Both
    quadratures estimate the same length; the bound is the larger one,
    rounded outward by ``BOUND_ROUNDING``.
    """
    raw = path_length(path, g, cfg.panels, cfg.order, validate=False)
    witness, smooth_len = path, raw
    if cfg.smooth:
        witness = path.smoothed()
        smooth_len = path_length(witness, g, cfg.panels, cfg.order, validate=False)
    return max(raw, smooth_len) * (1.0 + BOUND_ROUNDING), raw, smooth_len, witness


# -- Lipschitz probe -----------------------------------------------------------------------------

def lipschitz_probe(g: WeakMetric, plot_index: int, region, pair_samples: int = 200,
                    per_axis: int = 9, seed: int = 0) -> float:
    """``k = max sqrt(g(P)_r(v, v))`` over unit ``v`` and sampled ``r`` in the box ``region``.

    ``region`` is ``(lower, upper)``.  The grid includes the box corners; a
    further ``pair_samples`` random points are added.
    """
    lo, hi = (np.atleast_1d(np.asarray(b, dtype=float)) for b in region)
    dom = g.space.plot(plot_index).domain
    axes = [np.linspace(a, b, per_axis) for a, b in zip(lo, hi)]
    grid = np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(lo), -1).T
    rng = np.random.default_rng(seed)
    pts = np.vstack([grid, rng.uniform(lo, hi, size=(pair_samples, len(lo)))])
    k2 = max(max_eigen(g.gram(plot_index, r)) for r in pts if dom.contains(r))
    return math.sqrt(max(k2, 0.0))


def lipschitz_pairs(g: WeakMetric, plot_index: int, region, k_hat: float, pair_samples: int = 200,
                    cfg: Optional[SearchConfig] = None, seed: int = 0) -> list:
    """For random pairs in ``region``: ``(r, r', bound, k_hat |r - r'|)``."""
    cfg = cfg or SearchConfig(control_points_per_segment=2, refinement_levels=1)
    lo, hi = (np.atleast_1d(np.asarray(b, dtype=float)) for b in region)
    rng = np.random.default_rng(seed)
    space = g.space
    out = []
    for _ in range(pair_samples):
        r, rp = rng.uniform(lo, hi), rng.uniform(lo, hi)
        res = pseudodistance_upper(space, g, eval_plot(space, plot_index, r),
                                   eval_plot(space, plot_index, rp), cfg,
                                   candidates=[_raw_chord(space, plot_index, r, rp)])
        out.append((r, rp, res.bound, k_hat * float(np.linalg.norm(r - rp))))
    return out


def _raw_chord(space, plot_index, r, rp) -> PiecewisePath:
    seg = PathSegment(plot_index, np.vstack([r, rp]))
    return PiecewisePath([seg], [], eval_plot(space, plot_index, r), eval_plot(space, plot_index, rp))
