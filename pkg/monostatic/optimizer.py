# monostatic/optimizer.py
"""Search surface parameters for ECS = 1: candidate scoring, differential
evolution, beta sweeps and 2-D feasibility maps."""
import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage
from scipy.optimize import differential_evolution as scipy_de

from .analytic import com_offset
from .errors import InadmissibleSpec, MonostaticError, NoFeasiblePoint
from .geometry import CONVEX_RATIO, convexity_ratio, mass_properties
from .oracle import ECSReport, cached_directions, constant_field, ecs, ecs_from_field
from .settings import SEED, RunConfig
from .surfaces import Family, SurfaceSpec, generate_mesh, parse_family

log = logging.getLogger("optimizer")

SENTINEL = 1e6
PENALTY_FACTOR = 1e3
MIN_PENALTY_SCALE = 1e-3
COM_TOLERANCE = 1e-7
SUCCESS_OBJECTIVE = 1e-6
VERIFY_OFFSET = 0.5          # radians; azimuthal shift of the verification spiral
VERIFY_TOP = 5
MIN_GRID_POINTS = 5


# -----------------------------------------------------------------------------
# Candidate evaluation
# -----------------------------------------------------------------------------
@dataclass
class CandidateEvaluation:
    spec: SurfaceSpec
    ok: bool = True
    error: Optional[str] = None
    objective: float = SENTINEL
    gap: float = 0.0
    convexity_ratio: float = float("nan")
    com_violation: float = float("nan")
    report: Optional[ECSReport] = None
    resolution: str = ""

    @property
    def convex(self) -> bool:
        return self.ok and self.convexity_ratio > CONVEX_RATIO

    @property
    def mono_monostatic(self) -> bool:
        return self.ok and self.report is not None and self.report.is_mono_monostatic

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.as_dict(),
            "ok": self.ok,
            "error": self.error,
            "objective": self.objective,
            "gap": self.gap,
            "convexity_ratio": self.convexity_ratio,
            "convex": self.convex,
            "convexity_resolution": self.resolution,
            "com_violation": self.com_violation,
            "ecs": self.report.to_dict() if self.report else None,
        }


def penalty_weight(h_range: float) -> float:
    return PENALTY_FACTOR * max(h_range, MIN_PENALTY_SCALE)


def evaluate_candidate(spec: SurfaceSpec, config: RunConfig,
                       com_tolerance: float = COM_TOLERANCE) -> CandidateEvaluation:
    """Full oracle pass for one spec; never raises for an inadmissible spec."""
    ev = CandidateEvaluation(spec, resolution=config.resolution)
    dirs = cached_directions(config.directions, config.knn, config.direction_offset)
    try:
        if spec.is_sphere:
            ev.report = ecs_from_field(constant_field(dirs), config.thresholds, config.merge_rule)
            ev.convexity_ratio = 1.0
            ev.com_violation = 0.0
        else:
            mesh = generate_mesh(spec, config.n_theta, config.n_phi)
            com = mass_properties(mesh).com
            ev.report = ecs(mesh, dirs, config.thresholds, config.merge_rule, com=com)
            ev.convexity_ratio = convexity_ratio(mesh)
            ev.com_violation = com_offset(spec)
    except MonostaticError as e:
        log.debug(f"candidate {spec.summary()} rejected: {e.describe()}")
        ev.ok = False
        ev.error = e.describe()
        return ev

    ev.gap = ev.report.gap
    weight = penalty_weight(ev.report.h_range)
    ev.objective = (ev.gap
                    + weight * max(0.0, CONVEX_RATIO - ev.convexity_ratio)
                    + weight * max(0.0, ev.com_violation - com_tolerance))
    return ev


def objective(spec: SurfaceSpec, config: RunConfig, com_tolerance: float = COM_TOLERANCE) -> float:
    return evaluate_candidate(spec, config, com_tolerance).objective


def parallel_map(fn: Callable, items: Sequence, workers: int) -> List:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -----------------------------------------------------------------------------
# Differential evolution
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class OptimizationProblem:
    family: Family
    beta: Tuple[float, float]
    coeff: Tuple[float, float] = (0.0, 0.0)
    harmonic: int = 1
    seed: int = SEED
    popsize: int = 32
    max_generations: int = 200
    mutation: Tuple[float, float] = (0.5, 1.0)
    recombination: float = 0.9
    com_tolerance: float = COM_TOLERANCE
    verify_top: int = VERIFY_TOP

    def __post_init__(self) -> None:
        if not isinstance(self.family, Family):
            object.__setattr__(self, "family", parse_family(self.family))
        for name in ("beta", "coeff"):
            lo, hi = (float(v) for v in getattr(self, name))
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise InadmissibleSpec(f"{name} bounds must be finite and ordered, got ({lo}, {hi})")
            object.__setattr__(self, name, (lo, hi))
        if self.beta[0] < 0:
            raise InadmissibleSpec("beta bounds must be >= 0")
        if self.popsize < 4 or self.max_generations < 1:
            raise ValueError("popsize must be >= 4 and max_generations >= 1")

    @property
    def free_params(self) -> List[str]:
        return [name for name in ("beta", "coeff") if getattr(self, name)[0] < getattr(self, name)[1]]

    def spec_at(self, x: Sequence[float]) -> SurfaceSpec:
        values = {"beta": self.beta[0], "coeff": self.coeff[0]}
        for name, v in zip(self.free_params, x):
            values[name] = float(v)
        return SurfaceSpec(self.family, values["beta"], values["coeff"], self.harmonic)

    def as_dict(self) -> dict:
        return {
            "family": self.family.value,
            "beta_bounds": list(self.beta),
            "coeff_bounds": list(self.coeff),
            "harmonic": self.harmonic,
            "seed": self.seed,
            "popsize": self.popsize,
            "max_generations": self.max_generations,
            "mutation": list(self.mutation),
            "recombination": self.recombination,
            "com_tolerance": self.com_tolerance,
            "free_params": self.free_params,
        }


@dataclass
class OptimizationResult:
    problem: OptimizationProblem
    status: str                       # "success" | "infeasible" | "degenerate"
    best: CandidateEvaluation
    trace: List[Dict[str, Any]] = field(default_factory=list)
    generations: int = 0
    evaluations: int = 0
    verified: bool = False
    error: Optional[str] = None
    config: Optional[RunConfig] = None

    @property
    def best_spec(self) -> SurfaceSpec:
        return self.best.spec

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "verified": self.verified,
            "error": self.error,
            "seed": self.problem.seed,
            "problem": self.problem.as_dict(),
            "best": self.best.to_dict(),
            "generations": self.generations,
            "evaluations": self.evaluations,
            "trace": self.trace,
            "config": self.config.as_dict() if self.config else None,
        }


def verify(spec: SurfaceSpec, config: RunConfig, com_tolerance: float = COM_TOLERANCE) -> CandidateEvaluation:
    """Re-measure at full resolution on a fresh (rotated) direction spiral."""
    return evaluate_candidate(spec, config.replace(direction_offset=config.direction_offset + VERIFY_OFFSET),
                              com_tolerance)


def _is_verified(ev: CandidateEvaluation, com_tolerance: float) -> bool:
    return ev.mono_monostatic and ev.convex and ev.com_violation <= com_tolerance


def differential_evolution(problem: OptimizationProblem, config: Optional[RunConfig] = None) -> OptimizationResult:
    """DE/rand/1/bin over the free parameters of ``problem``.

    Candidates are scored with the reduced-cost oracle ``config.inner()``;
    a run succeeds only when a candidate re-verifies ECS = 1 at every
    threshold on a fresh direction set at full ``config``, is convex, and
    keeps its analytic COM within ``problem.com_tolerance``.
    """
    config = config or RunConfig.from_env()
    inner = config.inner()
    free = problem.free_params

    if not free:
        spec = problem.spec_at([])
        ev = verify(spec, config, problem.com_tolerance)
        if ev.ok and ev.report.degenerate:
            status = "degenerate"
        else:
            status = "success" if _is_verified(ev, problem.com_tolerance) else "infeasible"
        log.info(f"fixed problem {spec.summary()}: {status}, objective {ev.objective:.3g}")
        return OptimizationResult(problem, status, ev, generations=0, evaluations=1,
                                  verified=status != "infeasible",
                                  error=None if status != "infeasible" else
                                  NoFeasiblePoint(f"{spec.summary()} is not ECS = 1").describe(),
                                  config=config)

    bounds = [getattr(problem, name) for name in free]
    lock = threading.Lock()
    seen: Dict[Tuple[float, ...], CandidateEvaluation] = {}
    trace: List[Dict[str, Any]] = []
    confirmed: List[CandidateEvaluation] = []
    rejected: set = set()

    def score(x: np.ndarray) -> float:
        key = tuple(float(v) for v in x)
        with lock:
            hit = seen.get(key)
        if hit is None:
            hit = evaluate_candidate(problem.spec_at(key), inner, problem.com_tolerance)
            with lock:
                seen[key] = hit
        return hit.objective

    def on_generation(intermediate_result) -> bool:
        x = [float(v) for v in np.atleast_1d(intermediate_result.x)]
        fun = float(intermediate_result.fun)
        spec = problem.spec_at(x)
        trace.append({"generation": len(trace) + 1, "best_objective": fun,
                      "beta": spec.beta, "coeff": spec.coeff})
        log.debug(f"gen {len(trace)}: best {fun:.3g} at {spec.summary()}")
        if fun < SUCCESS_OBJECTIVE and spec not in rejected:
            ev = verify(spec, config, problem.com_tolerance)
            rejected.add(spec)
            if _is_verified(ev, problem.com_tolerance):
                confirmed.append(ev)
                log.info(f"✅ ECS = 1 confirmed at generation {len(trace)}: {spec.summary()}")
                return True
        return False

    ndim = len(free)
    pop_mult = max(1, math.ceil(problem.popsize / ndim))
    log.info(f"🚀 DE {problem.family.value} over {free}: popsize {pop_mult * ndim}, "
             f"{problem.max_generations} generations, seed {problem.seed}")

    pool = ThreadPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    try:
        res = scipy_de(
            score, bounds,
            strategy="rand1bin",
            maxiter=problem.max_generations,
            popsize=pop_mult,
            mutation=problem.mutation,
            recombination=problem.recombination,
            seed=problem.seed,
            polish=False,
            tol=0.0,
            init="latinhypercube",
            updating="deferred",
            workers=pool.map if pool else 1,
            callback=on_generation,
        )
    finally:
        if pool:
            pool.shutdown()

    evaluations = len(seen)
    if confirmed:
        return OptimizationResult(problem, "success", confirmed[0], trace, len(trace), evaluations,
                                  verified=True, config=config)

    ranked = sorted(seen.items(), key=lambda kv: (kv[1].objective, kv[0]))
    checked = 0
    for key, ev in ranked:
        if checked >= problem.verify_top or not ev.ok:
            break
        checked += 1
        full = verify(ev.spec, config, problem.com_tolerance)
        if _is_verified(full, problem.com_tolerance):
            log.info(f"✅ ECS = 1 confirmed after search: {full.spec.summary()}")
            return OptimizationResult(problem, "success", full, trace, len(trace), evaluations,
                                      verified=True, config=config)

    best = ranked[0][1] if ranked else evaluate_candidate(problem.spec_at(res.x), inner, problem.com_tolerance)
    err = NoFeasiblePoint(f"no verified ECS = 1 spec after {len(trace)} generations "
                          f"(best objective {best.objective:.3g})")
    log.warning(err.describe())
    return OptimizationResult(problem, "infeasible", best, trace, len(trace), evaluations,
                              verified=False, error=err.describe(), config=config)


# -----------------------------------------------------------------------------
# Sweeps and maps
# -----------------------------------------------------------------------------
def _row(ev: CandidateEvaluation) -> Dict[str, Any]:
    r = ev.report
    return {
        "beta": ev.spec.beta,
        "coeff": ev.spec.coeff,
        "ok": ev.ok,
        "ecs": r.default_ecs if r else None,
        "raw_basin_count": r.raw_basin_count if r else None,
        "mono_monostatic": ev.mono_monostatic,
        "convex": ev.convex if ev.ok else None,
        "convexity_ratio": ev.convexity_ratio,
        "h_range": r.h_range if r else None,
        "gap": ev.gap if ev.ok else None,
        "com_violation": ev.com_violation,
        "degenerate": r.degenerate if r else False,
        "error": ev.error,
    }


def beta_sweep(family, betas: Iterable[float], config: Optional[RunConfig] = None,
               coeff: float = 0.0, harmonic: int = 1) -> List[Dict[str, Any]]:
    """One row per beta; a failing row is recorded and the sweep continues."""
    config = config or RunConfig.from_env()
    family = family if isinstance(family, Family) else parse_family(family)

    def run(beta: float) -> Dict[str, Any]:
        try:
            spec = SurfaceSpec(family, float(beta), coeff, harmonic)
        except InadmissibleSpec as e:
            return {"beta": float(beta), "coeff": coeff, "ok": False, "error": e.describe()}
        row = _row(evaluate_candidate(spec, config))
        log.info(f"sweep {family.value} beta={beta:g}: ECS {row['ecs']}, convex {row['convex']}")
        return row

    return parallel_map(run, list(betas), config.workers)


def parse_grid(raw: str) -> np.ndarray:
    """'A:B:STEP' -> inclusive grid; a bare number is a one-point grid."""
    parts = [p for p in raw.split(":")]
    if len(parts) == 1:
        return np.array([float(parts[0])])
    if len(parts) != 3:
        raise ValueError(f"grid must look like A:B:STEP, got {raw!r}")
    a, b, step = (float(p) for p in parts)
    if step <= 0 or b < a:
        raise ValueError(f"grid {raw!r} needs STEP > 0 and B >= A")
    n = int(round((b - a) / step)) + 1
    return np.round(a + step * np.arange(n), 12)


def parse_list(raw: str) -> List[float]:
    return [float(v) for v in raw.replace(";", ",").split(",") if v.strip()]


@dataclass
class FeasibilityMap:
    family: Family
    harmonic: int
    betas: np.ndarray
    coeffs: np.ndarray
    cells: List[List[CandidateEvaluation]]
    labels: np.ndarray = field(default=None)
    n_components: int = 0

    def grid(self, fn: Callable[[CandidateEvaluation], Any], dtype=float) -> np.ndarray:
        return np.array([[fn(c) for c in row] for row in self.cells], dtype=dtype)

    @property
    def ecs(self) -> np.ndarray:
        return self.grid(lambda c: c.report.default_ecs if c.ok else -1, int)

    @property
    def feasible(self) -> np.ndarray:
        return self.grid(lambda c: c.ok and not c.report.degenerate and c.report.default_ecs == 1, bool)

    @property
    def degenerate(self) -> np.ndarray:
        return self.grid(lambda c: c.ok and c.report.degenerate, bool)

    def components(self) -> List[Dict[str, Any]]:
        out = []
        for comp in range(1, self.n_components + 1):
            bi, ci = np.nonzero(self.labels == comp)
            out.append({
                "component": comp,
                "cells": int(len(bi)),
                "beta_min": float(self.betas[bi].min()),
                "beta_max": float(self.betas[bi].max()),
                "coeff_min": float(self.coeffs[ci].min()),
                "coeff_max": float(self.coeffs[ci].max()),
            })
        return out

    def rows(self) -> List[Dict[str, Any]]:
        out = []
        for i, row in enumerate(self.cells):
            for j, ev in enumerate(row):
                r = _row(ev)
                r["feasible"] = bool(self.feasible[i, j])
                r["component"] = int(self.labels[i, j])
                out.append(r)
        return out

    def summary(self) -> dict:
        return {
            "family": self.family.value,
            "harmonic": self.harmonic,
            "betas": [float(b) for b in self.betas],
            "coeffs": [float(c) for c in self.coeffs],
            "n_cells": int(self.betas.size * self.coeffs.size),
            "n_feasible": int(self.feasible.sum()),
            "n_degenerate": int(self.degenerate.sum()),
            "n_failed": int(sum(not c.ok for row in self.cells for c in row)),
            "n_components": self.n_components,
            "components": self.components(),
        }


def label_components(mask: np.ndarray) -> Tuple[np.ndarray, int]:
    """4-neighbour connected components of a boolean grid."""
    labels, n = ndimage.label(mask)
    return labels, int(n)


def _check_axis(name: str, values: np.ndarray) -> None:
    if len(values) != 1 and len(values) < MIN_GRID_POINTS:
        raise ValueError(f"{name} grid needs 1 or >= {MIN_GRID_POINTS} points, got {len(values)}")


def feasibility_map(family, beta_grid: Sequence[float], coeff_grid: Sequence[float],
                    config: Optional[RunConfig] = None, harmonic: int = 1) -> FeasibilityMap:
    config = config or RunConfig.from_env()
    family = family if isinstance(family, Family) else parse_family(family)
    betas = np.asarray(beta_grid, dtype=np.float64)
    coeffs = np.asarray(coeff_grid, dtype=np.float64)
    _check_axis("beta", betas)
    _check_axis("coeff", coeffs)

    if betas.min() < 0:
        raise InadmissibleSpec("beta grid must be >= 0")
    SurfaceSpec(family, 0.0, 0.0, harmonic)

    def run(cell: Tuple[float, float]) -> CandidateEvaluation:
        return evaluate_candidate(SurfaceSpec(family, cell[0], cell[1], harmonic), config)

    cells = [(float(b), float(c)) for b in betas for c in coeffs]
    log.info(f"map {family.value}: {len(betas)} x {len(coeffs)} cells")
    flat = parallel_map(run, cells, config.workers)
    grid = [flat[i * len(coeffs):(i + 1) * len(coeffs)] for i in range(len(betas))]

    fmap = FeasibilityMap(family, harmonic, betas, coeffs, grid)
    fmap.labels, fmap.n_components = label_components(fmap.feasible)
    log.info(f"map {family.value}: {int(fmap.feasible.sum())} ECS = 1 cells in {fmap.n_components} components")
    return fmap
