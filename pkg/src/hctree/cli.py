"""Command-line interface: ``hctree <command> [flags]``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional, Sequence

from .activity import FiniteSupport, ModelParams, critical_activity, parse_activity
from .bgfield import (
    BGParams,
    DepthCapped,
    RegimeError,
    ScanCheckFailed,
    bg_field,
    bg_root_value,
    constant_field,
    scan_t,
    uniform_grid,
)
from .dynamics import NotConverged, classify_orbit, fixed_point_data
from .gibbs import brute_force_marginal, sample_configuration, vertex_marginal
from .pathcodes import PathCode, parse_t
from .verify import SUITES, run_suite

CONFIG_KEYS = {"k", "norm", "activity", "t", "tol", "depth", "grid", "count", "seed", "format",
               "alpha0", "vertex", "method"}
DEFAULTS = {"tol": 1e-10, "count": 100_000, "seed": 0, "format": "json", "grid": 257}


class UsageError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with default values for the flags")
    p.add_argument("--k", type=int)
    p.add_argument("--norm", type=float, help="total activity (used when --activity is absent)")
    p.add_argument("--activity", help="geom:c=<c>,q=<q> or finite:<j>=<v>,...")
    p.add_argument("--t", help="path code: p/q or d:<digits>")
    p.add_argument("--tol", type=float)
    p.add_argument("--depth", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=("json", "csv"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hctree", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("critical", "critical total activity for branching k"),
        ("fixpoints", "fixed point, 2-cycle and contraction data"),
        ("orbit", "classify the orbit of a starting multiplier"),
        ("bg-root", "root multiplier z0(t) of the path-indexed law"),
        ("bg-scan", "z0 on a uniform grid of t"),
        ("marginal", "single-site marginal of the induced Gibbs measure"),
        ("sample", "draw configurations (JSON lines)"),
    ):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        if name == "orbit":
            p.add_argument("--alpha0", type=float)
        if name == "marginal":
            p.add_argument("--vertex", help="digit string of the target vertex (default: root)")
            p.add_argument("--method", choices=("closed", "brute"))
    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--inject-fault", action="append", default=[], choices=("theta",),
                   help="corrupt a computed quantity to exercise failure reporting")
    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    values: dict = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(data) - CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    for key, v in DEFAULTS.items():
        values.setdefault(key, v)
    return values


def _need(cfg: dict, key: str):
    if cfg.get(key) is None:
        raise UsageError(f"--{key} is required")
    return cfg[key]


def _model(cfg: dict) -> ModelParams:
    k = _need(cfg, "k")
    if k < 2:
        raise UsageError("--k must be >= 2")
    if cfg.get("activity"):
        act = parse_activity(str(cfg["activity"]))
    elif cfg.get("norm") is not None:
        act = FiniteSupport({1: float(cfg["norm"])})
    else:
        raise UsageError("--activity or --norm is required")
    return ModelParams(k, act)


def _bg_params(cfg: dict) -> BGParams:
    model = _model(cfg)
    fp = fixed_point_data(model.norm, model.k)
    kwargs = {"tol": float(cfg["tol"])}
    if cfg.get("depth") is not None:
        kwargs["max_depth"] = int(cfg["depth"])
    return BGParams(model, fp, **kwargs)


def _emit(obj, out) -> None:
    out.write(json.dumps(obj) + "\n")


def cmd_critical(cfg: dict, out) -> int:
    k = _need(cfg, "k")
    if k < 2:
        raise UsageError("--k must be >= 2")
    _emit({"k": k, "lambda_cr": critical_activity(k)}, out)
    return 0


def cmd_fixpoints(cfg: dict, out) -> int:
    if cfg.get("norm") is not None:
        k = _need(cfg, "k")
        if k < 2:
            raise UsageError("--k must be >= 2")
        norm = float(cfg["norm"])
    else:
        model = _model(cfg)
        k, norm = model.k, model.norm
    _emit(fixed_point_data(norm, k).to_json(), out)
    return 0


def cmd_orbit(cfg: dict, out) -> int:
    model = _model(cfg)
    r = classify_orbit(float(_need(cfg, "alpha0")), model.norm, model.k, tol=float(cfg["tol"]))
    _emit({"kind": r.kind.value, "even_limit": r.even_limit, "odd_limit": r.odd_limit, "steps": r.steps}, out)
    return 0


def _path(cfg: dict, k: int) -> tuple[PathCode, Optional[list[int]]]:
    return parse_t(str(_need(cfg, "t")), k)


def cmd_bg_root(cfg: dict, out) -> int:
    params = _bg_params(cfg)
    code, digits = _path(cfg, params.k)
    r = bg_root_value(code, params, digits=digits)
    _emit({"t": str(code), "z0": r.z0, "depth_used": r.depth_used, "error_bound": r.error_bound}, out)
    return 0


def cmd_bg_scan(cfg: dict, out) -> int:
    params = _bg_params(cfg)
    rows = scan_t(params, uniform_grid(int(cfg["grid"]), params.k))
    if cfg["format"] == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["t", "z0", "error_bound"])
        for r in rows:
            w.writerow([str(r.t), repr(r.z0), repr(r.error_bound)])
    else:
        for r in rows:
            _emit({"t": str(r.t), "z0": r.z0, "error_bound": r.error_bound}, out)
    return 0


def _field(cfg: dict, m: int):
    """Path-indexed field if --t is given, otherwise the translation-invariant one."""
    model = _model(cfg)
    if cfg.get("t") is None:
        fp = fixed_point_data(model.norm, model.k)
        return model, constant_field(fp.xi, m, model.k)
    params = _bg_params(cfg)
    code, digits = _path(cfg, model.k)
    return model, bg_field(code, params, m, digits=digits)


def cmd_marginal(cfg: dict, out) -> int:
    vertex_text = cfg.get("vertex") or ""
    vertex = tuple(int(ch, 36) for ch in vertex_text)
    m = int(cfg["depth"]) if cfg.get("depth") is not None else len(vertex)
    if m < len(vertex):
        raise UsageError("--depth is smaller than the target vertex level")
    k = _need(cfg, "k")
    if any(d >= k for d in vertex):
        raise UsageError("vertex digit out of range")
    model, fld = _field({**cfg, "depth": None}, m + 1)
    if cfg.get("method") == "brute":
        if not isinstance(model.activity, FiniteSupport):
            raise UsageError("brute-force marginals need a finite activity")
        table = brute_force_marginal(fld, model.activity, m, vertex)
    else:
        table = vertex_marginal(fld, model.activity, vertex)
    _emit(table.to_json(vertex_text), out)
    return 0


def cmd_sample(cfg: dict, out) -> int:
    m = int(cfg["depth"]) if cfg.get("depth") is not None else 3
    model, fld = _field({**cfg, "depth": None}, m)
    seed = int(cfg["seed"])
    for i in range(int(cfg["count"])):
        config = sample_configuration(fld, model.activity, m, seed + i)
        spins = {"".join(str(d) for d in v): s for v, s in config.items()}
        _emit({"seed": seed + i, "spins": spins}, out)
    return 0


def cmd_verify(args: argparse.Namespace, out) -> int:
    checks = run_suite(args.suite, args.inject_fault)
    failed = [c for c in checks if not c.passed]
    for c in checks:
        out.write(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}\n")
    if failed:
        out.write(f"first failure: {failed[0].name}: {failed[0].detail}\n")
        return 1
    out.write(f"all {len(checks)} checks passed\n")
    return 0


COMMANDS = {
    "critical": cmd_critical,
    "fixpoints": cmd_fixpoints,
    "orbit": cmd_orbit,
    "bg-root": cmd_bg_root,
    "bg-scan": cmd_bg_scan,
    "marginal": cmd_marginal,
    "sample": cmd_sample,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args, out)
        cfg = _merge_config(args)
        return COMMANDS[args.command](cfg, out)
    except UsageError as exc:
        parser.error(str(exc))
    except (RegimeError, DepthCapped, ScanCheckFailed, NotConverged, ValueError) as exc:
        print(f"hctree: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
