# monostatic/catalog.py
"""The thirteen published mono-monostatic bodies and their reproduction."""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InsufficientData, MonostaticError
from .geometry import CONVEX_RATIO, asymmetry, convexity_ratio, mass_properties
from .metrics import MetricsReport, metrics_from_field, tradeoff_statistics
from .optimizer import parallel_map
from .oracle import ECSReport, cached_directions, ecs_from_field, height_field
from .settings import RunConfig
from .surfaces import Family, SurfaceSpec, TriMesh, generate_mesh

log = logging.getLogger("catalog")

PROVENANCE = "PAPER"

H_RANGE_TOL = 0.002
REL_TOL = 0.10
ANGLE_TOL_DEG = 10.0

SRE_RATIO_RANGE = (5.5, 7.5)
ASYMMETRY_RATIO_RANGE = (6.0, 8.5)
MIN_CORRELATION = 0.99
STEEPNESS_SLACK = 0.0015     # published steepness is rounded to 0.001

# index, family, harmonic, beta, coeff, h_range, sre, steepness, asymmetry, su_angle_deg
_TABLE = [
    (1, Family.RADIAL_F3, 1, 0.008, 0.016, 0.020, 0.010, 0.008, 0.0041, 99),
    (2, Family.RADIAL_F3, 1, 0.010, 0.011, 0.024, 0.012, 0.010, 0.0051, 99),
    (3, Family.RADIAL_F3, 1, 0.005, 0.036, 0.034, 0.017, 0.013, 0.0060, 92),
    (4, Family.RADIAL_F3, 1, 0.015, 0.011, 0.035, 0.018, 0.014, 0.0076, 99),
    (5, Family.RADIAL_F4, 1, 0.015, 0.062, 0.039, 0.020, 0.016, 0.0098, 132),
    (6, Family.EXTENDED_PHASE, 1, 0.023, 0.234, 0.051, 0.028, 0.023, 0.0113, 154),
    (7, Family.RADIAL_F3, 1, 0.023, 0.023, 0.056, 0.029, 0.023, 0.0118, 98),
    (8, Family.RADIAL_F3, 1, 0.023, 0.024, 0.056, 0.030, 0.023, 0.0118, 99),
    (9, Family.EXTENDED_PHASE, 2, 0.032, 0.138, 0.064, 0.035, 0.029, 0.0160, 137),
    (10, Family.RADIAL_F4, 1, 0.023, 0.129, 0.066, 0.036, 0.028, 0.0168, 57),
    (11, Family.RADIAL_F4, 1, 0.023, 0.212, 0.083, 0.046, 0.035, 0.0211, 124),
    (12, Family.EXTENDED_PHASE, 3, 0.052, -0.055, 0.099, 0.056, 0.047, 0.0259, 143),
    (13, Family.RADIAL_F4, 1, 0.035, 0.274, 0.117, 0.067, 0.052, 0.0296, 124),
]

# Sloan eta-phase sweep: beta -> (ECS, convex, h_range)
SLOAN_SWEEP = {
    0.001: (38, True, 0.002),
    0.005: (7, True, 0.010),
    0.01: (4, True, 0.020),
    0.02: (3, True, 0.040),
    0.05: (2, True, 0.097),
    0.10: (7, False, 0.174),
    0.15: (11, False, 0.237),
}


@dataclass
class CatalogEntry:
    index: int
    spec: SurfaceSpec
    published: Dict[str, float]
    reproduced: Optional[MetricsReport] = None
    report: Optional[ECSReport] = None
    convexity_ratio: Optional[float] = None
    verdicts: Dict[str, bool] = field(default_factory=dict)
    ok: bool = True
    error: Optional[str] = None
    mesh: Optional[TriMesh] = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return self.ok and self.verdicts.get("ecs_all_thresholds", False)

    @property
    def family_group(self) -> str:
        return "radial" if self.spec.family.is_radial else "phase"

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "spec": self.spec.as_dict(),
            "published": {**self.published, "provenance": PROVENANCE},
            "reproduced": self.reproduced.to_dict() if self.reproduced else None,
            "ecs": self.report.to_dict() if self.report else None,
            "convexity_ratio": self.convexity_ratio,
            "verdicts": self.verdicts,
            "passed": self.passed,
            "ok": self.ok,
            "error": self.error,
        }


def builtin_catalog() -> List[CatalogEntry]:
    return [
        CatalogEntry(
            index=i,
            spec=SurfaceSpec(fam, beta, coeff, k),
            published={"h_range": hr, "sre": sre, "steepness": st, "asymmetry": asym, "su_angle_deg": float(su)},
        )
        for i, fam, k, beta, coeff, hr, sre, st, asym, su in _TABLE
    ]


def parse_entries(raw: Optional[str]) -> List[int]:
    """'1-13', '1,6,10' or '2-4,9' -> sorted indices."""
    if not raw:
        return [row[0] for row in _TABLE]
    picked = set()
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            a, b = (int(p) for p in part.split("-", 1))
            picked.update(range(a, b + 1))
        else:
            picked.add(int(part))
    bad = sorted(i for i in picked if not 1 <= i <= len(_TABLE))
    if bad:
        raise ValueError(f"catalog entries must lie in 1-{len(_TABLE)}, got {bad}")
    return sorted(picked)


def _within_rel(value: float, target: float, tol: float = REL_TOL) -> bool:
    return abs(value - target) <= tol * abs(target)


def judge(entry: CatalogEntry) -> Dict[str, bool]:
    m, p = entry.reproduced, entry.published
    return {
        "ecs_all_thresholds": entry.report.is_mono_monostatic,
        "h_range": abs(m.h_range - p["h_range"]) <= H_RANGE_TOL,
        "sre": _within_rel(m.sre, p["sre"]),
        "asymmetry": _within_rel(m.asymmetry, p["asymmetry"]),
        "su_angle": abs(m.su_angle_deg - p["su_angle_deg"]) <= ANGLE_TOL_DEG,
        "convex": entry.convexity_ratio > CONVEX_RATIO,
    }


def measure(spec: SurfaceSpec, config: RunConfig) -> Tuple[TriMesh, ECSReport, MetricsReport, float]:
    mesh = generate_mesh(spec, config.n_theta, config.n_phi)
    com = mass_properties(mesh).com
    dirs = cached_directions(config.directions, config.knn, config.direction_offset)
    field_ = height_field(mesh, dirs, com)
    report = ecs_from_field(field_, config.thresholds, config.merge_rule)
    metrics = metrics_from_field(field_, asymmetry(mesh, com))
    return mesh, report, metrics, convexity_ratio(mesh)


def reproduce(entry: CatalogEntry, config: Optional[RunConfig] = None) -> CatalogEntry:
    """Measure one entry and fill its verdicts; failures are recorded, not raised."""
    config = config or RunConfig.from_env()
    try:
        entry.mesh, entry.report, entry.reproduced, entry.convexity_ratio = measure(entry.spec, config)
    except MonostaticError as e:
        log.warning(f"entry {entry.index} failed: {e.describe()}")
        entry.ok = False
        entry.error = e.describe()
        entry.verdicts = {"ecs_all_thresholds": False}
        return entry
    entry.verdicts = judge(entry)
    mark = "✅" if entry.passed else "❌"
    log.info(f"{mark} entry {entry.index} {entry.spec.summary()}: ECS {entry.report.default_ecs}, "
             f"h_range {entry.reproduced.h_range:.4f} (published {entry.published['h_range']})")
    return entry


def _ratio(values: Sequence[float]) -> Optional[float]:
    lo = min(values)
    return float(max(values) / lo) if lo > 0 else None


def _in(value: Optional[float], bounds: Tuple[float, float]) -> bool:
    return value is not None and bounds[0] <= value <= bounds[1]


def aggregate(entries: Sequence[CatalogEntry]) -> Dict[str, Any]:
    done = [e for e in entries if e.ok and e.reproduced is not None]
    agg: Dict[str, Any] = {
        "n_entries": len(entries),
        "n_reproduced": len(done),
        "n_mono_monostatic": sum(e.passed for e in entries),
        "correlation": None,
        "p_value": None,
        "sre_ratio": None,
        "asymmetry_ratio": None,
        "family_mean_sre": {},
        "family_count": {},
    }
    checks: Dict[str, bool] = {"all_mono_monostatic": agg["n_mono_monostatic"] == len(entries)}
    if done:
        metrics = [e.reproduced for e in done]
        try:
            agg["correlation"], agg["p_value"] = tradeoff_statistics(metrics)
        except InsufficientData as e:
            agg["correlation_error"] = e.describe()
        agg["sre_ratio"] = _ratio([m.sre for m in metrics])
        agg["asymmetry_ratio"] = _ratio([m.asymmetry for m in metrics])
        for group in ("phase", "radial"):
            sres = [e.reproduced.sre for e in done if e.family_group == group]
            agg["family_count"][group] = len(sres)
            agg["family_mean_sre"][group] = float(np.mean(sres)) if sres else None

        asym = [e.reproduced.asymmetry for e in sorted(done, key=lambda e: e.index)]
        by_range = [e.reproduced.steepness for e in sorted(done, key=lambda e: e.reproduced.h_range)]
        checks["correlation"] = agg["correlation"] is not None and agg["correlation"] >= MIN_CORRELATION
        checks["sre_ratio"] = _in(agg["sre_ratio"], SRE_RATIO_RANGE)
        checks["asymmetry_ratio"] = _in(agg["asymmetry_ratio"], ASYMMETRY_RATIO_RANGE)
        fm = agg["family_mean_sre"]
        checks["phase_sre_above_radial"] = (fm.get("phase") is not None and fm.get("radial") is not None
                                            and fm["phase"] > fm["radial"])
        checks["ordered_by_asymmetry"] = all(a <= b for a, b in zip(asym, asym[1:]))
        checks["steepness_rises_with_h_range"] = all(a <= b + STEEPNESS_SLACK
                                                     for a, b in zip(by_range, by_range[1:]))
        checks["all_convex"] = all(e.convexity_ratio > CONVEX_RATIO for e in done)
    agg["checks"] = checks
    return agg


def reproduce_all(config: Optional[RunConfig] = None,
                  indices: Optional[Iterable[int]] = None) -> Tuple[List[CatalogEntry], Dict[str, Any]]:
    config = config or RunConfig.from_env()
    wanted = set(indices) if indices is not None else None
    entries = [e for e in builtin_catalog() if wanted is None or e.index in wanted]
    log.info(f"🚀 reproducing {len(entries)} catalog entries at {config.resolution}, N={config.directions}")
    entries = parallel_map(lambda e: reproduce(e, config), entries, config.workers)
    agg = aggregate(entries)
    log.info(f"catalog: {agg['n_mono_monostatic']}/{len(entries)} ECS = 1, r = {agg['correlation']}")
    return entries, agg


def resolution_sweep(indices: Iterable[int], config: RunConfig,
                     resolutions: Sequence[Tuple[int, int]]) -> List[Dict[str, Any]]:
    """h-range of each entry at several mesh resolutions, with its spread."""
    entries = [e for e in builtin_catalog() if e.index in set(indices)]

    def run(entry: CatalogEntry) -> Dict[str, Any]:
        by_res: Dict[str, Optional[float]] = {}
        ecs_by_res: Dict[str, Optional[int]] = {}
        for nt, nphi in resolutions:
            cfg = config.replace(n_theta=nt, n_phi=nphi)
            try:
                _, report, metrics, _ = measure(entry.spec, cfg)
            except MonostaticError as e:
                log.warning(f"entry {entry.index} at {cfg.resolution}: {e.describe()}")
                by_res[cfg.resolution] = None
                ecs_by_res[cfg.resolution] = None
                continue
            by_res[cfg.resolution] = metrics.h_range
            ecs_by_res[cfg.resolution] = report.default_ecs
        values = [v for v in by_res.values() if v is not None]
        return {
            "index": entry.index,
            "spec": entry.spec.as_dict(),
            "published_h_range": entry.published["h_range"],
            "h_range": by_res,
            "ecs": ecs_by_res,
            "spread": float(max(values) - min(values)) if values else None,
        }

    return parallel_map(run, entries, config.workers)
