"""``diffeometric`` command line: distances, metric checks and the named examples.

Exit status is 0 on success, 1 when a check fails and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import reproduce as R
from .constructions import euclidean
from .core import (FD_STEP, ChartDomain, ChartMap, DiffeoError, Factorization, SmoothMap,
                   as_vector)
from .distance import SearchConfig, pseudodistance_upper
from .mapping import (condition_E_check, constant_family, identity_recognizer,
                      always_recognizer, named_family)
from .metric import NaturalityPair, check_naturality, definiteness_check, isometry_check
from .spaces import SpecError, load, parse_point

OK, CHECK_FAILED, USAGE = 0, 1, 2


class UsageFailure(Exception):
    """Raised inside a command to exit with status 2."""


# -- output ------------------------------------------------------------------------------------

def _fmt(x) -> str:
    return "inf" if math.isinf(x) and x > 0 else format(x, ".17g")


def _jsonable(obj):
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def _dump_json(payload, path, stdout):
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _write_csv(rows, path, stdout):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["level", "bound", "path_id"])
    for level, bound, pid in rows:
        w.writerow([level, _fmt(bound), pid])
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        stdout.write(buf.getvalue())


def _params(items):
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageFailure(f"--param expects key=value, got {item!r}")
        try:
            nums = [float(x) for x in val.split(",")]
        except ValueError:
            raise UsageFailure(f"--param {key}: not numeric: {val!r}") from None
        out[key] = nums[0] if len(nums) == 1 else np.array(nums)
    return out


def _space(args):
    if not args.space:
        raise UsageFailure("--space is required")
    return load(args.space)


# -- commands ----------------------------------------------------------------------------------

def cmd_distance(args, stdout):
    space, g = _space(args)
    if args.from_ is None or args.to is None:
        raise UsageFailure("--from and --to are required")
    x, y = parse_point(space, args.from_), parse_point(space, args.to)
    cfg = SearchConfig(refinement_levels=args.levels or 5, seed=args.seed)
    res = pseudodistance_upper(space, g, x, y, cfg)
    rows = [(k + 1, b, f"L{k + 1}") for k, b in enumerate(res.trace)]
    _write_csv(rows, args.out, stdout)
    if args.json:
        paths = [{"path_id": f"L{k + 1}", "path": None if p is None else p.to_json()}
                 for k, p in enumerate(res.level_paths)]
        _dump_json({"op": "pseudodistance_upper",
                    "inputs": {"space": args.space, "from": args.from_, "to": args.to,
                               "levels": cfg.refinement_levels, "seed": args.seed},
                    "value": res.bound, "tolerance": None, "paths": paths}, args.json, stdout)
    return OK


def cmd_definiteness(args, stdout):
    space, g = _space(args)
    kw = {} if args.tol is None else {"tol": args.tol}
    rep = definiteness_check(g, per_axis=args.per_axis, half_width=args.half_width, **kw)
    _dump_json({"op": "definiteness_check", "inputs": {"space": args.space},
                "value": rep.verdict, "tolerance": rep.tol, **rep.to_dict()}, args.json, stdout)
    return OK if rep.verdict == "definite" else CHECK_FAILED


def _builtin_map(space, name, params):
    if name == "identity":
        return SmoothMap(space, space, lambda k, r: Factorization(
            math.inf, k, ChartMap.identity(space.plots[k].domain)), lambda p: p, name="id")
    dom = space.plots[0].domain
    if space.n_plots != 1 or dom.lower != (-math.inf,) * dom.dim or dom.upper != (math.inf,) * dom.dim:
        raise UsageFailure(f"map {name!r} needs a single-chart space on all of R^n")
    n = dom.dim
    if name == "translate":
        c = np.broadcast_to(np.asarray(params.get("c", 1.0), float), (n,))
        A, b = np.eye(n), c
    elif name == "scale":
        A, b = float(params.get("s", 2.0)) * np.eye(n), np.zeros(n)
    elif name == "rotate":
        if n != 2:
            raise UsageFailure("rotate needs a 2-dimensional space")
        a = float(params.get("angle", math.pi / 4))
        A, b = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]]), np.zeros(2)
    else:
        raise UsageFailure(f"unknown map {name!r}")
    h = ChartMap(dom, dom, lambda r: A @ r + b, lambda r: A, name=name)
    return SmoothMap(space, space, lambda k, r: Factorization(math.inf, 0, h),
                     lambda p: space.point(0, h(p.coords)), name=name)


def cmd_isometry(args, stdout):
    space, g = _space(args)
    phi = _builtin_map(space, args.map, _params(args.param))
    tol = 1e-8 if args.tol is None else args.tol
    rep = isometry_check(phi, g, g, samples=args.samples, tol=tol, seed=args.seed)
    _dump_json({"op": "isometry_check", "inputs": {"space": args.space, "map": args.map},
                "value": rep.max_deviation, "tolerance": tol, **rep.to_dict()}, args.json, stdout)
    return OK if rep.passed else CHECK_FAILED


def _transition(rec, space):
    """``f`` with ``Q∘f = P`` on the glued region of an open record, or None."""
    dom_a = space.plots[rec.a].domain
    if rec.param_domain.dim == 0 or rec.param_domain.dim != dom_a.dim:
        return None

    def located(x):
        t = rec.locate_a(x)
        return t if t is not None and rec.param_domain.contains(t) else None

    def inside(x):
        # keep a finite-difference stencil inside the region
        steps = 2.0 * FD_STEP * np.eye(dom_a.dim)
        return all(located(x + s) is not None and located(x - s) is not None for s in steps) \
            and located(x) is not None

    src = ChartDomain(dom_a.dim, dom_a.lower, dom_a.upper, membership=inside)
    return ChartMap(src, space.plots[rec.b].domain, lambda x: rec.embed_b(located(as_vector(x))),
                    name=rec.name or "transition")


def naturality_pairs(space):
    """Identity self-pairs for every plot plus one pair per open glue record."""
    pairs = [NaturalityPair(k, k, ChartMap.identity(p.domain)) for k, p in enumerate(space.plots)
             if p.domain.dim]
    for rec in space.glue_table:
        f = _transition(rec, space)
        if f is not None:
            pairs.append(NaturalityPair(rec.a, rec.b, f))
    return pairs


def cmd_naturality(args, stdout):
    space, g = _space(args)
    tol = 1e-4 if args.tol is None else args.tol
    rep = check_naturality(g, naturality_pairs(space), samples=args.samples, tol=tol, seed=args.seed)
    _dump_json({"op": "check_naturality", "inputs": {"space": args.space},
                "value": rep.max_deviation, "tolerance": tol, **rep.to_dict()}, args.json, stdout)
    return OK if rep.passed else CHECK_FAILED


def cmd_condition_e(args, stdout):
    N, _ = euclidean(2)
    params = _params(args.param)
    if args.family == "section":
        P = constant_family(N, 0)
    else:
        try:
            P = named_family(args.family, N, **params)
        except ValueError as exc:
            raise UsageFailure(str(exc)) from None
    tol = 1e-9 if args.tol is None else args.tol
    rec = identity_recognizer(tol) if args.recognizer == "identity" else always_recognizer
    rng = np.random.default_rng(args.seed)
    r_grid = P.domain.sample(rng, args.samples, half_width=2.0)
    thetas = np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False)
    rep = condition_E_check(P, rec, thetas, r_grid)
    _dump_json({"op": "condition_E_check",
                "inputs": {"family": args.family, "recognizer": args.recognizer,
                           "params": {k: np.atleast_1d(v).tolist() for k, v in params.items()}},
                "value": rep.passed, "tolerance": tol, **rep.to_dict()}, args.json, stdout)
    return OK if rep.passed else CHECK_FAILED


def cmd_reproduce(args, stdout):
    target = R.TARGETS[args.name]
    kw = {"seed": args.seed}
    if args.levels is not None:
        if args.name not in R.DISTANCE_TARGETS:
            raise UsageFailure(f"--levels does not apply to {args.name}")
        kw["levels"] = args.levels
    if args.tol is not None:
        kw["tol"] = args.tol
    out = target(**kw)
    payload = {"target": args.name, "passed": out.passed, "records": out.records}
    if out.witness:
        payload.update(out.witness)
    if out.rows:
        _write_csv(out.rows, args.out, stdout)
        if args.json:
            _dump_json(payload, args.json, stdout)
    else:
        _dump_json(payload, args.json or args.out, stdout)
    return OK if out.passed else CHECK_FAILED


# -- parser ------------------------------------------------------------------------------------

def _common(p, space=True):
    if space:
        p.add_argument("--space", help="JSON space description")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", help="output file (CSV for distances)")
    p.add_argument("--json", help="write JSON records to this file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="diffeometric", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distance", help="certified upper bounds on the pseudodistance")
    _common(p)
    p.add_argument("--from", dest="from_", help="point as x1,x2,... or branch:x1,...")
    p.add_argument("--to")
    p.add_argument("--levels", type=int, default=None)
    p.set_defaults(run=cmd_distance)

    p = sub.add_parser("check-definiteness", help="grid test of Gram positivity")
    _common(p)
    p.add_argument("--per-axis", type=int, default=9)
    p.add_argument("--half-width", type=float, default=5.0)
    p.set_defaults(run=cmd_definiteness)

    p = sub.add_parser("check-isometry", help="compare f*g with g for a built-in map")
    _common(p)
    p.add_argument("--map", default="identity", choices=["identity", "translate", "scale", "rotate"])
    p.add_argument("--param", action="append", help="key=value (c, s or angle)")
    p.add_argument("--samples", type=int, default=50)
    p.set_defaults(run=cmd_isometry)

    p = sub.add_parser("check-naturality", help="naturality across glue transitions")
    _common(p)
    p.add_argument("--samples", type=int, default=20)
    p.set_defaults(run=cmd_naturality)

    p = sub.add_parser("check-condition-e", help="condition (E) for a loop family into R^2")
    _common(p, space=False)
    p.add_argument("--family", default="section",
                   choices=["section", "constant", "circle_scale", "figure"])
    p.add_argument("--recognizer", default="identity", choices=["identity", "all"])
    p.add_argument("--param", action="append", help="key=value (y, center)")
    p.add_argument("--samples", type=int, default=5)
    p.set_defaults(run=cmd_condition_e)

    p = sub.add_parser("reproduce", help="run a named worked example")
    p.add_argument("name", choices=sorted(R.TARGETS))
    _common(p, space=False)
    p.add_argument("--levels", type=int, default=None)
    p.set_defaults(run=cmd_reproduce)
    return ap


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    if getattr(args, "levels", None) is not None and args.levels < 1:
        stderr.write("error: --levels must be at least 1\n")
        return USAGE
    try:
        return args.run(args, stdout)
    except json.JSONDecodeError as exc:
        stderr.write(f"error: {args.space}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}\n")
    except OSError as exc:
        stderr.write(f"error: {exc}\n")
    except (SpecError, UsageFailure) as exc:
        stderr.write(f"error: {exc}\n")
    except DiffeoError as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
    return USAGE


if __name__ == "__main__":
    sys.exit(main())
