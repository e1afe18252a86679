"""Command-line interface: ``check``, ``solve`` and ``pattern``.

Exit codes: 0 success, 2 invalid surface, 3 unreadable or malformed
input, 4 solver budget exhausted, 5 no admissible step (domain error).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import LayoutError, SurfaceError
from .pattern import emit_svg, layout
from .solver import CONVERGED, DOMAIN_ERROR, MAX_ITER, SolveOptions, solve
from .surface import load_surface, validate

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INPUT = 3
EXIT_MAX_ITER = 4
EXIT_DOMAIN = 5

_STATUS_EXIT = {CONVERGED: EXIT_OK, MAX_ITER: EXIT_MAX_ITER, DOMAIN_ERROR: EXIT_DOMAIN}

log = logging.getLogger("polycusp")


@dataclass
class RunConfig:
    subcommand: str
    input: str
    out: Optional[str] = None
    method: str = "newton"
    tol: float = 1e-10
    max_iter: Optional[int] = None
    flow_step: float = 0.1
    target: Optional[str] = None
    svg: Optional[str] = None
    scale: float = 100.0
    verbose: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("--tol must be positive")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("--max-iter must be at least 1")


# ---------------------------------------------------------------------------
# JSON with round-trip doubles


def _num(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return "%.17g" % x


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, type(None), str)):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_check(cfg: RunConfig) -> int:
    try:
        surface = load_surface(cfg.input)
    except (OSError, SurfaceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = validate(surface)
    _emit(dumps(report.as_dict()) + "\n", cfg.out)
    return EXIT_INVALID if report.status == "error" else EXIT_OK


def _load_target(path: str, surface) -> np.ndarray:
    doc = json.loads(Path(path).read_text())
    if isinstance(doc, dict) and "curvatures" in doc:
        doc = doc["curvatures"]
    if isinstance(doc, dict):
        ids = [str(v) for v in surface.vertex_ids]
        missing = set(ids) - set(doc)
        if missing:
            raise ValueError(f"target file lacks vertices {sorted(missing)}")
        return np.array([float(doc[v]) for v in ids])
    return np.asarray(doc, dtype=float)


def _solve(cfg: RunConfig):
    """Shared front half of ``solve`` and ``pattern``: (surface, result) or exit code."""
    try:
        surface = load_surface(cfg.input)
        target = _load_target(cfg.target, surface) if cfg.target else None
    except (OSError, SurfaceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, None, EXIT_INPUT
    report = validate(surface)
    if report.status == "error":
        print(dumps(report.as_dict()), file=sys.stderr)
        return None, None, EXIT_INVALID
    try:
        opts = SolveOptions(
            method=cfg.method,
            tol_kappa=cfg.tol,
            max_iterations=cfg.max_iter,
            flow_step=cfg.flow_step,
            target_curvatures=target,
        )
        opts.target(surface.n_vertices)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, None, EXIT_INPUT
    result = solve(surface, options=opts)
    log.info("%s after %d iterations, residual %.3e", result.status, result.iterations, result.residual)
    if result.status != CONVERGED:
        msg = result.message or f"residual {result.residual:.3e} after {result.iterations} iterations"
        print(f"{result.status}: {msg}", file=sys.stderr)
    return surface, result, None


def solve_document(surface, result) -> dict:
    ids = list(surface.vertex_ids)
    doc = {
        "vertices": ids,
        "heights": result.heights,
        "curvatures": result.curvatures,
        "residual": result.residual,
        "iterations": result.iterations,
        "flips": result.flips,
        "dual_edges": [],
        "status": result.status,
    }
    if result.state is not None:
        st = result.state
        for e in result.dual.kept:
            i, j = st.tri.edge_vertices(e)
            doc["dual_edges"].append(
                {
                    "edge": surface.edge_ids[e] if e < len(surface.edge_ids) else e,
                    "i": ids[i],
                    "j": ids[j],
                    "length_l": float(st.ell[e]),
                    "dihedral_angle": result.dihedral[e],
                }
            )
    return doc


def cmd_solve(cfg: RunConfig) -> int:
    surface, result, code = _solve(cfg)
    if code is not None:
        return code
    _emit(dumps(solve_document(surface, result)) + "\n", cfg.out)
    return _STATUS_EXIT[result.status]


def cmd_pattern(cfg: RunConfig) -> int:
    if not cfg.scale > 0:
        print("error: --scale must be positive", file=sys.stderr)
        return EXIT_INPUT
    surface, result, code = _solve(cfg)
    if code is not None:
        return code
    if result.status != CONVERGED:
        return _STATUS_EXIT[result.status]
    try:
        pat = layout(result.state)
    except LayoutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    doc = {"vertices": list(surface.vertex_ids), **pat.as_dict(), "status": result.status}
    _emit(dumps(doc) + "\n", cfg.out)
    if cfg.svg:
        Path(cfg.svg).write_text(emit_svg(pat, cfg.scale))
    return EXIT_OK


_COMMANDS = {"check": cmd_check, "solve": cmd_solve, "pattern": cmd_pattern}


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polycusp", description="Convex polyhedral cusps from spherical cone tori."
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("input", help="surface JSON file")
        p.add_argument("--out", help="write JSON here instead of stdout")
        p.add_argument("-v", "--verbose", action="count", help="log progress to stderr")

    def solving(p):
        p.add_argument("--config", help="JSON file with option defaults; flags override it")
        p.add_argument("--method", choices=["newton", "flow"])
        p.add_argument("--tol", type=float)
        p.add_argument("--max-iter", type=int, dest="max_iter")
        p.add_argument("--flow-step", type=float, dest="flow_step")
        p.add_argument("--target", help="JSON file with target curvatures")

    common(sub.add_parser("check", help="validate a surface"))
    p = sub.add_parser("solve", help="find the heights of the cusp")
    common(p)
    solving(p)
    p = sub.add_parser("pattern", help="solve and lay out the circle pattern")
    common(p)
    solving(p)
    p.add_argument("--svg", help="also write an SVG drawing")
    p.add_argument("--scale", type=float)
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags over the optional config file over defaults."""
    known = {f.name for f in fields(RunConfig)}
    values = {}
    cfg_path = getattr(args, "config", None)
    if cfg_path:
        doc = json.loads(Path(cfg_path).read_text())
        if not isinstance(doc, dict):
            raise ValueError("config file must hold a JSON object")
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        values.update(doc)
    for name in known:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    return RunConfig(**values)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
    except (OSError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(
        level=logging.DEBUG if cfg.verbose >= 2 else logging.INFO if cfg.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return _COMMANDS[cfg.subcommand](cfg)


if __name__ == "__main__":
    sys.exit(main())
