# monostatic/cli.py
import argparse
import json
import logging
import os
import sys
from typing import Any, Callable, Dict, List, Optional, Tuple

from . import TOOL_NAME, __version__
from .analytic import analytic_height_field
from .bodies import BodyKind, canonical_body
from .catalog import SLOAN_SWEEP, parse_entries, reproduce_all, resolution_sweep
from .errors import EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, MonostaticError, UsageError
from .geometry import asymmetry, convexity_ratio, degenerate_triangle_count, mass_properties
from .metrics import metrics_report
from .optimizer import (OptimizationProblem, beta_sweep, differential_evolution, evaluate_candidate,
                        feasibility_map, parse_grid, parse_list)
from .oracle import cached_directions, constant_field, ecs, ecs_from_field, height_field
from .reports import dumps, write_csv, write_report
from .settings import ANALYTIC_STARTS, MERGE_RULES, RunConfig, parse_resolution, parse_thresholds
from .stl_io import read_stl, write_stl
from .surfaces import Family, SurfaceSpec, check_admissible, generate_mesh, parse_family

log = logging.getLogger("cli")

VALIDATION_EXPECTED = {"cylinder": 2, "capsule": 1}
VALIDATION_RULE = "level"  # verdict rule unless --merge-rule is given


def _setup_logging() -> None:
    level = logging.getLevelName((os.getenv("LOG_LEVEL") or "INFO").upper())
    fmt = "%(asctime)s %(levelname)s [%(name)s] %(message)s"
    datefmt = "%Y-%m-%d %H:%M:%S"
    # stdout carries JSON; logs go to stderr
    logging.basicConfig(level=level, format=fmt, datefmt=datefmt, stream=sys.stderr, force=True)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


# -----------------------------------------------------------------------------
# Argument helpers
# -----------------------------------------------------------------------------
def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--directions", type=int, help="Fibonacci directions N (ECS_DIRECTIONS)")
    p.add_argument("--knn", type=int, help="neighbours per direction (ECS_KNN)")
    p.add_argument("--thresholds", help="merge fractions, e.g. 0.005,0.01,0.02,0.05,0.10")
    p.add_argument("--res", help="mesh resolution THETAxPHI, e.g. 100x200")
    p.add_argument("--seed", type=int)
    p.add_argument("--merge-rule", choices=MERGE_RULES)
    p.add_argument("--workers", type=int)


def _add_spec_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--family", required=required, help="sloan-linear | sloan-eta | extended-phase | radial-f3 | radial-f4")
    p.add_argument("--beta", type=float, required=required)
    p.add_argument("--coeff", type=float, default=0.0)
    p.add_argument("--harmonic", type=int, default=1)


def _config(args: argparse.Namespace) -> RunConfig:
    overrides: Dict[str, Any] = {}
    for name in ("directions", "knn", "seed", "workers"):
        if getattr(args, name, None) is not None:
            overrides[name] = getattr(args, name)
    if getattr(args, "thresholds", None):
        overrides["thresholds"] = parse_thresholds(args.thresholds)
    if getattr(args, "res", None):
        overrides["n_theta"], overrides["n_phi"] = parse_resolution(args.res)
    if getattr(args, "merge_rule", None):
        overrides["merge_rule"] = args.merge_rule
    return RunConfig.from_env(**overrides)


def _spec(args: argparse.Namespace) -> SurfaceSpec:
    return SurfaceSpec(parse_family(args.family), args.beta, args.coeff, args.harmonic)


def _bounds(raw: Optional[str], default: Tuple[float, float]) -> Tuple[float, float]:
    """'A:B' -> (A, B); a bare number fixes the parameter."""
    if raw is None:
        return default
    parts = [float(v) for v in raw.split(":")]
    if len(parts) == 1:
        return parts[0], parts[0]
    if len(parts) != 2:
        raise UsageError(f"bounds must look like A:B, got {raw!r}")
    return parts[0], parts[1]


def _emit(payload: Any, kind: str, out: Optional[str] = None) -> None:
    print(dumps(payload, kind))
    if out:
        write_report(payload, out, kind)
        log.info(f"📝 wrote {out}")


def _fail(code: int, err: BaseException) -> int:
    name = type(err).__name__
    print(json.dumps({"ok": False, "error": str(err), "type": name}), file=sys.stderr)
    return code


# -----------------------------------------------------------------------------
# Commands
# -----------------------------------------------------------------------------
def _generate(args: argparse.Namespace) -> int:
    spec = _spec(args)
    if args.res:
        nt, nphi = parse_resolution(args.res)
    else:
        config = RunConfig.from_env()
        nt, nphi = config.n_theta, config.n_phi
    mesh = generate_mesh(spec, nt, nphi)
    write_stl(mesh, args.out)
    mp = mass_properties(mesh)
    _emit({
        "ok": True,
        "path": args.out,
        "spec": spec,
        "resolution": f"{nt}x{nphi}",
        "vertices": mesh.n_vertices,
        "triangles": mesh.n_triangles,
        "degenerate_triangles": degenerate_triangle_count(mesh),
        "volume": mp.volume,
        "com": mp.com,
        "asymmetry": asymmetry(mesh, mp.com),
        "convexity_ratio": convexity_ratio(mesh),
    }, "mesh")
    return EXIT_OK


def _ecs(args: argparse.Namespace) -> int:
    config = _config(args)
    dirs = cached_directions(config.directions, config.knn)
    if args.mesh:
        mesh = read_stl(args.mesh)
        bad = degenerate_triangle_count(mesh)
        if bad:
            log.warning(f"⚠️ {args.mesh}: {bad} degenerate triangles")
        report = ecs(mesh, dirs, config.thresholds, config.merge_rule)
        payload = {"source": args.mesh, "ecs": report, "convexity_ratio": convexity_ratio(mesh)}
    elif args.family:
        if args.beta is None:
            raise UsageError("--beta is required with --family")
        spec = _spec(args)
        check_admissible(spec, config.n_theta, config.n_phi)
        if args.analytic:
            field = constant_field(dirs) if spec.is_sphere else analytic_height_field(spec, dirs, args.starts)
            payload = {"spec": spec, "oracle": "analytic", "starts": args.starts,
                       "ecs": ecs_from_field(field, config.thresholds, config.merge_rule)}
        else:
            payload = {"oracle": "mesh", **evaluate_candidate(spec, config).to_dict()}
    else:
        raise UsageError("ecs needs --mesh FILE or --family/--beta")
    payload["config"] = config
    _emit(payload, "ecs", args.out)
    return EXIT_OK


def _validate(args: argparse.Namespace) -> int:
    config = _config(args)
    dirs = cached_directions(config.directions, config.knn)
    sphere = ecs_from_field(constant_field(dirs), config.thresholds, config.merge_rule)

    by_rule: Dict[str, Dict[str, int]] = {rule: {"sphere": sphere.default_ecs} for rule in MERGE_RULES}
    raw: Dict[str, int] = {"sphere": sphere.raw_basin_count}
    for kind in (BodyKind.CUBE, BodyKind.CYLINDER, BodyKind.CAPSULE):
        mesh = canonical_body(kind, args.body_res)
        field = height_field(mesh, dirs)
        for rule in MERGE_RULES:
            report = ecs_from_field(field, config.thresholds, rule)
            by_rule[rule][kind.value] = report.default_ecs
            raw[kind.value] = report.raw_basin_count
        log.info(f"{kind.value}: raw {raw[kind.value]}, " +
                 ", ".join(f"{r} {by_rule[r][kind.value]}" for r in MERGE_RULES))

    rule = args.merge_rule or VALIDATION_RULE
    counts = by_rule[rule]
    ok = all(counts[body] == n for body, n in VALIDATION_EXPECTED.items())
    _emit({
        **counts,
        "ok": ok,
        "merge_rule": rule,
        "sphere_degenerate": sphere.degenerate,
        "raw_basin_count": raw,
        "by_rule": by_rule,
        "expected": VALIDATION_EXPECTED,
        "config": config,
    }, "validation", args.out)
    return EXIT_OK if ok else EXIT_VALIDATION


def _sweep_beta(args: argparse.Namespace) -> int:
    config = _config(args)
    family = parse_family(args.family)
    betas = parse_list(args.betas) if args.betas else sorted(SLOAN_SWEEP)
    rows = beta_sweep(family, betas, config, args.coeff, args.harmonic)
    if args.out:
        write_csv(rows, args.out)
        log.info(f"📝 wrote {args.out}")
    _emit({"family": family, "rows": rows, "config": config}, "beta_sweep")
    return EXIT_OK


def _map(args: argparse.Namespace) -> int:
    config = _config(args)
    fmap = feasibility_map(parse_family(args.family), parse_grid(args.beta_grid), parse_grid(args.coeff_grid),
                           config, args.harmonic)
    if args.out:
        write_csv(fmap.rows(), args.out)
        log.info(f"📝 wrote {args.out}")
    _emit({**fmap.summary(), "config": config}, "feasibility_map")
    return EXIT_OK


def _optimize(args: argparse.Namespace) -> int:
    config = _config(args)
    problem = OptimizationProblem(
        family=parse_family(args.family),
        beta=_bounds(args.beta_bounds, (0.01, 0.08)),
        coeff=_bounds(args.coeff_bounds, (0.0, 0.5)),
        harmonic=args.harmonic,
        seed=config.seed,
        popsize=args.popsize,
        max_generations=args.generations,
        com_tolerance=args.com_tolerance,
    )
    result = differential_evolution(problem, config)
    _emit(result, "optimization", args.out)
    return EXIT_OK


def _catalog(args: argparse.Namespace) -> int:
    config = _config(args)
    indices = parse_entries(args.entries)
    out_dir = args.out or os.path.join(config.output_dir, "catalog")
    entries, agg = reproduce_all(config, indices)
    for e in entries:
        if e.mesh is not None:
            write_stl(e.mesh, os.path.join(out_dir, f"entry_{e.index:02d}.stl"))
    payload: Dict[str, Any] = {"entries": entries, "aggregate": agg, "config": config}
    if args.resolutions:
        payload["resolution_sweep"] = resolution_sweep(
            indices, config, [parse_resolution(r) for r in args.resolutions.split(",") if r.strip()])
    write_report(payload, os.path.join(out_dir, "catalog.json"), "catalog")
    log.info(f"📝 wrote {os.path.join(out_dir, 'catalog.json')}")
    _emit({"out": out_dir, "aggregate": agg,
           "verdicts": {e.index: e.verdicts for e in entries}, "config": config}, "catalog_summary")
    return EXIT_OK


def _metrics(args: argparse.Namespace) -> int:
    config = _config(args)
    dirs = cached_directions(config.directions, config.knn)
    if args.mesh:
        mesh = read_stl(args.mesh)
        source: Any = args.mesh
    elif args.family:
        if args.beta is None:
            raise UsageError("--beta is required with --family")
        source = _spec(args)
        mesh = generate_mesh(source, config.n_theta, config.n_phi)
    else:
        raise UsageError("metrics needs --mesh FILE or --family/--beta")
    _emit({"source": source, "metrics": metrics_report(mesh, dirs), "config": config}, "metrics", args.out)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "generate": _generate,
    "ecs": _ecs,
    "validate": _validate,
    "sweep-beta": _sweep_beta,
    "map": _map,
    "optimize": _optimize,
    "catalog": _catalog,
    "metrics": _metrics,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=TOOL_NAME, description="Equilibrium-count toolkit for convex bodies")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write the mesh of a surface spec as binary STL")
    _add_spec_args(p)
    p.add_argument("--res", help="THETAxPHI, default ECS_MESH_RES")
    p.add_argument("--out", required=True)

    p = sub.add_parser("ecs", help="equilibrium count of a mesh file or a surface spec")
    _add_config_args(p)
    p.add_argument("--mesh")
    _add_spec_args(p, required=False)
    p.add_argument("--analytic", action="store_true",
                   help="mesh-free support-point oracle; slow, about 10 minutes per 2000 directions")
    p.add_argument("--starts", type=int, default=ANALYTIC_STARTS)
    p.add_argument("--out")

    p = sub.add_parser("validate", help="sphere, cube, cylinder and capsule")
    _add_config_args(p)
    p.add_argument("--body-res", type=int, default=32)
    p.add_argument("--out")

    p = sub.add_parser("sweep-beta", help="ECS, convexity and h-range across beta")
    _add_config_args(p)
    p.add_argument("--family", default=Family.SLOAN_ETA.value)
    p.add_argument("--betas", help="comma-separated beta values")
    p.add_argument("--coeff", type=float, default=0.0)
    p.add_argument("--harmonic", type=int, default=1)
    p.add_argument("--out", help="CSV path")

    p = sub.add_parser("map", help="ECS = 1 feasibility over a (beta, coeff) grid")
    _add_config_args(p)
    p.add_argument("--family", required=True)
    p.add_argument("--beta-grid", required=True, help="A:B:STEP or a single value")
    p.add_argument("--coeff-grid", required=True, help="A:B:STEP or a single value")
    p.add_argument("--harmonic", type=int, default=1)
    p.add_argument("--out", help="CSV path")

    p = sub.add_parser("optimize", help="differential evolution towards ECS = 1")
    _add_config_args(p)
    p.add_argument("--family", required=True)
    p.add_argument("--beta-bounds", help="A:B, or one value to fix beta")
    p.add_argument("--coeff-bounds", help="A:B, or one value to fix coeff")
    p.add_argument("--harmonic", type=int, default=1)
    p.add_argument("--popsize", type=int, default=32)
    p.add_argument("--generations", type=int, default=200)
    p.add_argument("--com-tolerance", type=float, default=1e-7)
    p.add_argument("--out")

    p = sub.add_parser("catalog", help="reproduce the published catalog")
    _add_config_args(p)
    p.add_argument("--entries", help="e.g. 1-13 or 1,6,10")
    p.add_argument("--resolutions", help="e.g. 80x160,100x200,160x320")
    p.add_argument("--out", help="output directory")

    p = sub.add_parser("metrics", help="engineering metrics of a mesh file or spec")
    _add_config_args(p)
    p.add_argument("--mesh")
    _add_spec_args(p, required=False)
    p.add_argument("--out")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except MonostaticError as e:
        log.error(e.describe())
        return _fail(e.exit_code, e)
    except OSError as e:
        log.error(f"I/O failure: {e}")
        return _fail(EXIT_IO, e)
    except ValueError as e:
        log.error(f"bad input: {e}")
        return _fail(EXIT_USAGE, e)
