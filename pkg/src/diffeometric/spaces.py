"""Build spaces from JSON descriptions and parse point addresses."""
from __future__ import annotations

import json
import math

import numpy as np

from . import constructions as C
from .core import DiffeoSpace, Point, eval_plot
from .mapping import LoopSpace, WedgeLoopSpace, trig_family


class SpecError(ValueError):
    """A space description that parses as JSON but is not a valid space."""


def _num(x, what):
    if x == "inf":
        return math.inf
    if x == "-inf":
        return -math.inf
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return float(x)
    raise SpecError(f"{what}: expected a number or 'inf', got {x!r}")


def _int(doc, key, default=None):
    val = doc.get(key, default)
    if not isinstance(val, int) or isinstance(val, bool) or val < 0:
        raise SpecError(f"{key!r} must be a nonnegative integer, got {val!r}")
    return val


def _tensor(doc, n):
    if "tensor" in doc:
        try:
            T = np.asarray(doc["tensor"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise SpecError(f"bad tensor: {exc}") from exc
        if T.shape != (n, n):
            raise SpecError(f"tensor must be {n}x{n}")
        return T
    if "scale" in doc:
        return _num(doc["scale"], "scale") * np.eye(n)
    return None


_DEFAULT_LINE = {"primitive": "euclidean", "n": 1}


def build(doc) -> tuple:
    """``(space, metric)`` from a parsed JSON description."""
    if not isinstance(doc, dict) or "primitive" not in doc:
        raise SpecError("a space description is an object with a 'primitive' key")
    kind = doc["primitive"]
    try:
        if kind == "euclidean":
            n = _int(doc, "n", 1)
            return C.euclidean(n, _tensor(doc, n), name=doc.get("name"))
        if kind == "glue":
            left, right = doc.get("left", _DEFAULT_LINE), doc.get("right", _DEFAULT_LINE)
            for side in (left, right):
                if not isinstance(side, dict) or side.get("primitive") != "euclidean":
                    raise SpecError("glue sides must be euclidean primitives")
            if "point" in doc:
                a = b = _num(doc["point"], "point")
            else:
                iv = doc.get("interval")
                if not isinstance(iv, list) or len(iv) != 2:
                    raise SpecError("glue needs 'interval': [a, b] or 'point': a")
                a, b = _num(iv[0], "interval"), _num(iv[1], "interval")
            m, n = _int(left, "n", 1), _int(right, "n", 1)
            return C.glue_euclidean(m, n, a, b, _tensor(left, m), _tensor(right, n),
                                    name=doc.get("name"))
        if kind in ("product", "warped"):
            X, gX = build(doc.get("left", _DEFAULT_LINE))
            Y, gY = build(doc.get("right", _DEFAULT_LINE))
            if kind == "product":
                return C.product(X, gX, Y, gY, name=doc.get("name"))
            f = doc.get("f", "const1")
            if f == "exp2x":
                warp = C.WarpSpec.exp2x(X)
            elif f == "const1":
                warp = C.WarpSpec.constant(X, 1.0)
            else:
                raise SpecError(f"unknown warp function {f!r} (expected 'exp2x' or 'const1')")
            return C.warped_product(X, gX, Y, gY, warp, name=doc.get("name"))
        if kind == "sum":
            parts = doc.get("parts")
            if not isinstance(parts, list) or not parts:
                raise SpecError("sum needs a nonempty 'parts' list")
            return C.sum_space([build(p) for p in parts], name=doc.get("name"))
        if kind == "loopspace":
            N, gN = C.euclidean(_int(doc, "n", 2))
            LN = LoopSpace(N, gN, [trig_family(N, _int(doc, "degree", 1))],
                           panels=_int(doc, "panels", 32))
            return LN, LN.metric
        if kind == "wedge_loopspace":
            N, gN = C.euclidean(_int(doc, "n", 2))
            W = WedgeLoopSpace(N, gN, _int(doc, "degree", 1), doc.get("convention", "vee"))
            return W, W.metric
    except C.ConstructionError as exc:
        raise SpecError(str(exc)) from exc
    raise SpecError(f"unknown primitive {kind!r}")


def loads(text: str) -> tuple:
    """Parse and build; JSON syntax errors propagate as ``json.JSONDecodeError``."""
    return build(json.loads(text))


def load(path) -> tuple:
    with open(path) as fh:
        return loads(fh.read())


def parse_point(space: DiffeoSpace, text: str) -> Point:
    """``"x1,x2,..."`` (plot 1) or ``"b:x1,..."`` for the ``b``-th plot, 1-based like ``[1_2]``."""
    text = text.strip()
    branch = 1
    if ":" in text:
        head, text = text.split(":", 1)
        try:
            branch = int(head)
        except ValueError as exc:
            raise SpecError(f"bad branch {head!r}") from exc
    if not 1 <= branch <= space.n_plots:
        raise SpecError(f"branch {branch} out of range 1..{space.n_plots}")
    dim = space.plots[branch - 1].domain.dim
    try:
        coords = [float(c) for c in text.split(",")] if text else []
    except ValueError as exc:
        raise SpecError(f"bad coordinates {text!r}") from exc
    if len(coords) != dim:
        raise SpecError(f"plot {branch} needs {dim} coordinates, got {len(coords)}")
    try:
        return eval_plot(space, branch - 1, coords)
    except Exception as exc:
        raise SpecError(str(exc)) from exc
