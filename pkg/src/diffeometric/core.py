"""Chart domains, plots, points, chart maps and smooth maps.

A diffeological space is handled through a generating family of plots.  Each
generating plot is a chart domain; a point of the space is a representative
``(plot_index, coords)``.  Quotients and gluings are described by a table of
identification records, and point equality is the transitive closure of that
table at coordinate tolerance ``EPS_EQ``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

EPS_EQ = 1e-9
FD_STEP = 1e-5

_space_ids = itertools.count()


class DiffeoError(Exception):
    """Base class for errors raised by this package."""


class DomainError(DiffeoError):
    pass


class BoundaryError(DiffeoError):
    pass


class UsageError(DiffeoError):
    pass


class FactorizationError(DiffeoError):
    pass


def as_vector(r) -> np.ndarray:
    return np.atleast_1d(np.asarray(r, dtype=float)).reshape(-1)


@dataclass(frozen=True)
class ChartDomain:
    """Open box in R^dim, optionally refined by a membership predicate."""

    dim: int
    lower: tuple = None
    upper: tuple = None
    membership: Optional[Callable[[np.ndarray], bool]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("dimension must be nonnegative")
        lo = (-math.inf,) * self.dim if self.lower is None else tuple(float(x) for x in self.lower)
        hi = (math.inf,) * self.dim if self.upper is None else tuple(float(x) for x in self.upper)
        if len(lo) != self.dim or len(hi) != self.dim:
            raise ValueError("box bounds must have one entry per axis")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError("box bounds must satisfy lower < upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def euclidean(cls, n: int) -> "ChartDomain":
        return cls(n)

    @classmethod
    def interval(cls, a: float, b: float) -> "ChartDomain":
        return cls(1, (a,), (b,))

    def contains(self, r) -> bool:
        r = as_vector(r) if self.dim else np.zeros(0)
        if r.shape != (self.dim,):
            return False
        lo, hi = np.array(self.lower), np.array(self.upper)
        if not (np.all(r > lo) and np.all(r < hi)):
            return False
        return True if self.membership is None else bool(self.membership(r))

    def boundary_distance(self, r) -> float:
        """Distance from ``r`` to the box boundary (the predicate is ignored)."""
        if self.dim == 0:
            return math.inf
        r = as_vector(r)
        return float(min(np.min(r - np.array(self.lower)), np.min(np.array(self.upper) - r)))

    def window(self, half_width: float, margin: float = 0.0):
        """Finite box obtained by clipping to ``[-half_width, half_width]`` and shrinking by ``margin``."""
        lo = np.maximum(np.array(self.lower), -half_width) + margin
        hi = np.minimum(np.array(self.upper), half_width) - margin
        return lo, hi

    def sample(self, rng: np.random.Generator, n: int, half_width: float = 5.0,
               margin: float = 0.0, max_tries: int = 100) -> np.ndarray:
        """Uniform rejection samples from the (windowed) domain, shape (n, dim)."""
        if self.dim == 0:
            return np.zeros((n, 0))
        lo, hi = self.window(half_width, margin)
        out = []
        for _ in range(max_tries):
            cand = rng.uniform(lo, hi, size=(n, self.dim))
            out.extend(c for c in cand if self.contains(c))
            if len(out) >= n:
                return np.array(out[:n])
        raise DomainError("could not sample the domain; window does not meet it")

    def grid(self, per_axis: int, half_width: float = 5.0, margin: float = 0.0) -> np.ndarray:
        """Tensor grid over the windowed box, filtered by membership."""
        if self.dim == 0:
            return np.zeros((1, 0))
        lo, hi = self.window(half_width, margin)
        axes = [np.linspace(a, b, per_axis) for a, b in zip(lo, hi)]
        pts = np.array(list(itertools.product(*axes)))
        return np.array([p for p in pts if self.contains(p)]).reshape(-1, self.dim)


@dataclass(frozen=True)
class Point:
    """A point of a space, given by a representative in one generating plot."""

    space_id: int
    plot_index: Optional[int]
    coords: tuple = ()
    label: Optional[str] = None

    @property
    def r(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)

    def __repr__(self):
        if self.label is not None:
            return f"Point({self.label!r})"
        return f"Point(plot={self.plot_index}, coords={list(self.coords)})"


@dataclass(frozen=True)
class Plot:
    """A generating plot: the chart domain it parametrizes from, plus a name."""

    domain: ChartDomain
    name: str = ""


class ChartMap:
    """A smooth map between chart domains with analytic or finite-difference Jacobian."""

    def __init__(self, source: ChartDomain, target: ChartDomain, value: Callable,
                 jacobian: Optional[Callable] = None, h: float = FD_STEP, name: str = ""):
        self.source = source
        self.target = target
        self._value = value
        self._jacobian = jacobian
        self.h = h
        self.name = name

    @property
    def analytic(self) -> bool:
        return self._jacobian is not None

    def __call__(self, r) -> np.ndarray:
        out = np.asarray(self._value(as_vector(r) if self.source.dim else np.zeros(0)), dtype=float)
        return out.reshape(self.target.dim)

    def jacobian(self, r) -> np.ndarray:
        r = as_vector(r) if self.source.dim else np.zeros(0)
        shape = (self.target.dim, self.source.dim)
        if self._jacobian is not None:
            return np.asarray(self._jacobian(r), dtype=float).reshape(shape)
        return self.fd_jacobian(r)

    def fd_jacobian(self, r) -> np.ndarray:
        r = as_vector(r) if self.source.dim else np.zeros(0)
        h = self.h
        if self.source.boundary_distance(r) <= h:
            raise BoundaryError(f"point {r} is within h={h} of the domain boundary")
        J = np.empty((self.target.dim, self.source.dim))
        for k in range(self.source.dim):
            e = np.zeros(self.source.dim)
            e[k] = h
            J[:, k] = (self(r + e) - self(r - e)) / (2 * h)
        return J

    def compose(self, inner: "ChartMap") -> "ChartMap":
        """``self ∘ inner``; analytic Jacobian by the chain rule when both are analytic."""
        jac = None
        if self.analytic and inner.analytic:
            def jac(r):
                return self.jacobian(inner(r)) @ inner.jacobian(r)
        return ChartMap(inner.source, self.target, lambda r: self(inner(r)), jac,
                        h=min(self.h, inner.h), name=f"{self.name}∘{inner.name}")

    @classmethod
    def identity(cls, domain: ChartDomain) -> "ChartMap":
        n = domain.dim
        return cls(domain, domain, lambda r: r, lambda r: np.eye(n), name="id")

    @classmethod
    def linear(cls, source: ChartDomain, target: ChartDomain, A, b=None, name="affine") -> "ChartMap":
        A = np.asarray(A, dtype=float).reshape(target.dim, source.dim)
        b = np.zeros(target.dim) if b is None else as_vector(b)
        return cls(source, target, lambda r: A @ r + b, lambda r: A, name=name)


def jacobian(map: ChartMap, r) -> np.ndarray:
    """Jacobian matrix of a chart map at ``r``, shape (target.dim, source.dim)."""
    return map.jacobian(r)


@dataclass(frozen=True)
class TangentDouble:
    """Representative (plot, r, v, w) of an element of the second tangent bundle."""

    plot_index: int
    r: tuple
    v: tuple
    w: tuple

    @classmethod
    def make(cls, plot_index, r, v, w) -> "TangentDouble":
        return cls(plot_index, tuple(np.atleast_1d(np.asarray(r, float)).tolist()),
                   tuple(np.atleast_1d(np.asarray(v, float)).tolist()),
                   tuple(np.atleast_1d(np.asarray(w, float)).tolist()))


@dataclass(frozen=True)
class GlueRecord:
    """Identification of a region of plot ``a`` with a region of plot ``b``.

    The glued set is parametrized by ``param_domain`` (the chart of the attaching
    space A).  ``embed_a``/``embed_b`` send a parameter to coordinates in the two
    plots, and ``locate_a``/``locate_b`` invert them, returning ``None`` when the
    coordinates are not in the glued region.
    """

    a: int
    b: int
    param_domain: ChartDomain
    embed_a: ChartMap
    embed_b: ChartMap
    locate_a: Callable = field(compare=False)
    locate_b: Callable = field(compare=False)
    name: str = ""

    def transfer(self, plot_index: int, coords: np.ndarray):
        """Yield the representatives reachable from ``(plot_index, coords)`` through this record."""
        if plot_index == self.a:
            t = self.locate_a(coords)
            if t is not None and self.param_domain.contains(t):
                yield self.b, self.embed_b(t)
        if plot_index == self.b:
            t = self.locate_b(coords)
            if t is not None and self.param_domain.contains(t):
                yield self.a, self.embed_a(t)

    def shifted(self, da: int, db: int) -> "GlueRecord":
        return GlueRecord(self.a + da, self.b + db, self.param_domain, self.embed_a,
                          self.embed_b, self.locate_a, self.locate_b, self.name)


class DiffeoSpace:
    """A diffeological space given by a generating family and an equality relation.

    Equality defaults to the transitive closure of ``glue_table``.  Spaces whose
    equality is inherited from an ambient space (subspaces, mapping spaces)
    pass ``equality`` instead.
    """

    def __init__(self, plots: Sequence[Plot], glue_table: Sequence[GlueRecord] = (),
                 equality: Optional[Callable] = None, name: str = "", eps_eq: float = EPS_EQ,
                 components: Optional[Sequence[int]] = None):
        self.id = next(_space_ids)
        self.plots = list(plots)
        self.glue_table = list(glue_table)
        self._equality = equality
        self.name = name
        self.eps_eq = eps_eq
        # sum spaces remember which summand each plot belongs to
        self.components = list(components) if components is not None else [0] * len(self.plots)
        for rec in self.glue_table:
            if not (0 <= rec.a < len(self.plots) and 0 <= rec.b < len(self.plots)):
                raise ValueError(f"glue record {rec.name!r} references an unknown plot")

    def __repr__(self):
        return f"DiffeoSpace({self.name!r}, plots={len(self.plots)}, glue={len(self.glue_table)})"

    @property
    def n_plots(self) -> int:
        return len(self.plots)

    def plot(self, index: int) -> Plot:
        if not 0 <= index < len(self.plots):
            raise UsageError(f"unknown plot index {index} for {self.name!r}")
        return self.plots[index]

    def point(self, plot_index: int, coords) -> Point:
        return eval_plot(self, plot_index, coords)

    def representatives(self, p: Point) -> list:
        """All representatives of ``p`` reachable through the glue table (including p's own)."""
        start = (p.plot_index, np.array(p.coords, dtype=float))
        seen = [start]
        frontier = [start]
        while frontier:
            nxt = []
            for idx, x in frontier:
                for rec in self.glue_table:
                    for j, y in rec.transfer(idx, x):
                        if not any(k == j and _close(y, z, self.eps_eq) for k, z in seen):
                            seen.append((j, y))
                            nxt.append((j, y))
            frontier = nxt
        return seen

    def canonical(self, plot_index: int, coords) -> tuple:
        reps = self.representatives(Point(self.id, plot_index, tuple(as_vector(coords).tolist())
                                          if self.plots[plot_index].domain.dim else ()))
        idx, x = min(reps, key=lambda rep: (rep[0], tuple(rep[1])))
        return idx, x

    def equal(self, p: Point, q: Point) -> bool:
        return points_equal(self, p, q)


def _close(x, y, eps) -> bool:
    x, y = np.asarray(x, float), np.asarray(y, float)
    return x.shape == y.shape and (x.size == 0 or float(np.max(np.abs(x - y))) <= eps)


def eval_plot(space: DiffeoSpace, plot_index: int, r) -> Point:
    """Value of a generating plot at ``r``, normalized to the lowest-index representative."""
    plot = space.plot(plot_index)
    r = as_vector(r) if plot.domain.dim else np.zeros(0)
    if not plot.domain.contains(r):
        raise DomainError(f"{r} is outside the domain of plot {plot_index} of {space.name!r}")
    if space.glue_table:
        plot_index, r = space.canonical(plot_index, r)
    return Point(space.id, plot_index, tuple(float(x) for x in r))


def points_equal(space: DiffeoSpace, p: Point, q: Point) -> bool:
    if p.space_id != space.id or q.space_id != space.id:
        raise UsageError("points do not belong to this space")
    if p.label is not None or q.label is not None:
        return p.label == q.label and p.plot_index == q.plot_index and _close(p.coords, q.coords, space.eps_eq)
    if space._equality is not None:
        return bool(space._equality(p, q))
    if p.plot_index == q.plot_index and _close(p.coords, q.coords, space.eps_eq):
        return True
    q_r = np.array(q.coords, dtype=float)
    return any(idx == q.plot_index and _close(x, q_r, space.eps_eq)
               for idx, x in space.representatives(p))


@dataclass(frozen=True)
class Factorization:
    """Local factorization φ∘P = Q∘h on the ball of ``radius`` about the query point."""

    radius: float
    target_plot: int
    h: ChartMap


class SmoothMap:
    """A smooth map between spaces, with a local factorization oracle.

    ``value`` maps points to points and is used as the independent check of the
    factorizations returned by ``factorize``.
    """

    def __init__(self, source: DiffeoSpace, target: DiffeoSpace,
                 factorize: Callable[[int, np.ndarray], Optional[Factorization]],
                 value: Optional[Callable[[Point], Point]] = None, name: str = ""):
        self.source = source
        self.target = target
        self._factorize = factorize
        self._value = value
        self.name = name

    def raw_factorize(self, plot_index: int, r) -> Optional[Factorization]:
        return self._factorize(plot_index, r)

    def __call__(self, p: Point) -> Point:
        if self._value is not None:
            return self._value(p)
        fac = self._factorize(p.plot_index, p.r)
        if fac is None:
            raise FactorizationError(f"{self.name}: no factorization at {p}")
        return eval_plot(self.target, fac.target_plot, fac.h(p.r))

    @classmethod
    def identity(cls, space: DiffeoSpace) -> "SmoothMap":
        def fac(i, r):
            return Factorization(math.inf, i, ChartMap.identity(space.plots[i].domain))
        return cls(space, space, fac, lambda p: p, name="id")

    def compose(self, inner: "SmoothMap") -> "SmoothMap":
        """``self ∘ inner``."""
        if inner.target is not self.source:
            raise UsageError("maps are not composable")

        def fac(i, r):
            f1 = inner.raw_factorize(i, r)
            if f1 is None:
                return None
            f2 = self.raw_factorize(f1.target_plot, f1.h(r))
            if f2 is None:
                return None
            # radius of the composite is only known to be positive; keep the inner one
            # when the outer factorization is global
            radius = f1.radius if math.isinf(f2.radius) else min(f1.radius, f2.radius / 10)
            return Factorization(radius, f2.target_plot, f2.h.compose(f1.h))

        value = None
        if self._value is not None and inner._value is not None:
            value = lambda p: self._value(inner._value(p))
        return SmoothMap(inner.source, self.target, fac, value, name=f"{self.name}∘{inner.name}")


def sample_ball(domain: ChartDomain, center, radius: float, n: int,
                rng: np.random.Generator) -> np.ndarray:
    """Points of ``domain`` in the ball about ``center`` (radius capped at 1)."""
    center = as_vector(center) if domain.dim else np.zeros(0)
    if domain.dim == 0:
        return np.zeros((n, 0))
    rho = min(radius, 1.0)
    out = [center]
    tries = 0
    while len(out) < n and tries < 100 * n:
        tries += 1
        u = rng.normal(size=domain.dim)
        u *= rng.uniform() ** (1.0 / domain.dim) * rho / np.linalg.norm(u)
        c = center + 0.999 * u
        if domain.contains(c):
            out.append(c)
    return np.array(out)


def factorize_map(phi: SmoothMap, plot_index: int, r, n_check: int = 25,
                  rng: Optional[np.random.Generator] = None) -> Factorization:
    """Local factorization of ``phi ∘ P`` through a generating plot of the target.

    The returned factorization is checked at ``n_check`` points of its ball
    against ``phi``'s pointwise value.
    """
    dom = phi.source.plot(plot_index).domain
    r = as_vector(r) if dom.dim else np.zeros(0)
    if not dom.contains(r):
        raise DomainError(f"{r} is outside plot {plot_index}")
    fac = phi.raw_factorize(plot_index, r)
    if fac is None:
        raise FactorizationError(f"{phi.name or 'map'}: no factorization of plot {plot_index} at {r}")
    if phi._value is None:
        return fac
    rng = rng or np.random.default_rng(0)
    for rp in sample_ball(dom, r, fac.radius, n_check, rng):
        lhs = phi(eval_plot(phi.source, plot_index, rp))
        rhs = eval_plot(phi.target, fac.target_plot, fac.h(rp))
        if not points_equal(phi.target, lhs, rhs):
            raise FactorizationError(
                f"{phi.name or 'map'}: factorization of plot {plot_index} at {r} "
                f"disagrees at {rp}: {lhs} != {rhs}")
    return fac
