# monostatic/settings.py
import os
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Tuple

from dotenv import load_dotenv

load_dotenv()

MERGE_RULES = ("adjacent", "pairwise", "level")
DEFAULT_THRESHOLD = 0.01
DIAGNOSTIC_THRESHOLD = 0.001


def _int_env(name: str, default: int) -> int:
    return int(os.getenv(name, str(default)).split()[0])


def parse_thresholds(raw: str) -> Tuple[float, ...]:
    return tuple(float(t) for t in raw.replace(";", ",").split(",") if t.strip())


def parse_resolution(raw: str) -> Tuple[int, int]:
    """'100x200' -> (100, 200)."""
    parts = raw.lower().replace("×", "x").split("x")
    if len(parts) != 2:
        raise ValueError(f"resolution must look like 100x200, got {raw!r}")
    return int(parts[0]), int(parts[1])


DIRECTIONS = _int_env("ECS_DIRECTIONS", 5000)
KNN = _int_env("ECS_KNN", 12)
THRESHOLDS = parse_thresholds(os.getenv("ECS_THRESHOLDS", "0.005,0.01,0.02,0.05,0.10"))
MESH_RES = parse_resolution(os.getenv("ECS_MESH_RES", "100x200"))
SEED = _int_env("ECS_SEED", 20260101)
OUTPUT_DIR = os.getenv("ECS_OUTPUT_DIR", "out")
MERGE_RULE = os.getenv("ECS_MERGE_RULE", "adjacent").strip().lower()
WORKERS = _int_env("ECS_WORKERS", 1)

# Reduced-cost oracle used inside the optimizer loop
INNER_DIRECTIONS = _int_env("ECS_INNER_DIRECTIONS", 2000)
INNER_MESH_RES = parse_resolution(os.getenv("ECS_INNER_MESH_RES", "80x160"))

ANALYTIC_STARTS = _int_env("ECS_ANALYTIC_STARTS", 16)


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines an oracle run; embedded in every report."""
    directions: int = DIRECTIONS
    knn: int = KNN
    thresholds: Tuple[float, ...] = field(default=THRESHOLDS)
    n_theta: int = MESH_RES[0]
    n_phi: int = MESH_RES[1]
    seed: int = SEED
    output_dir: str = OUTPUT_DIR
    merge_rule: str = MERGE_RULE
    workers: int = WORKERS
    direction_offset: float = 0.0

    def __post_init__(self) -> None:
        for name in ("directions", "knn", "n_theta", "n_phi", "workers"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.directions < 100:
            raise ValueError("at least 100 directions are required")
        if self.n_theta < 8 or self.n_phi < 16:
            raise ValueError("mesh resolution must be at least 8x16")
        if not self.thresholds:
            raise ValueError("at least one merge threshold is required")
        ts = tuple(sorted(float(t) for t in self.thresholds))
        if any(not (0.0 < t <= 0.5) for t in ts):
            raise ValueError("merge thresholds must lie in (0, 0.5]")
        object.__setattr__(self, "thresholds", ts)
        if self.merge_rule not in MERGE_RULES:
            raise ValueError(f"unknown merge rule {self.merge_rule!r}; expected one of {MERGE_RULES}")

    @classmethod
    def from_env(cls, **overrides: Any) -> "RunConfig":
        return cls(**overrides)

    def replace(self, **changes: Any) -> "RunConfig":
        return replace(self, **changes)

    def inner(self) -> "RunConfig":
        """Cheaper oracle for optimizer candidates; verification uses ``self``."""
        return self.replace(
            directions=min(self.directions, INNER_DIRECTIONS),
            n_theta=min(self.n_theta, INNER_MESH_RES[0]),
            n_phi=min(self.n_phi, INNER_MESH_RES[1]),
        )

    @property
    def resolution(self) -> str:
        return f"{self.n_theta}x{self.n_phi}"

    def as_dict(self) -> dict:
        d = asdict(self)
        d["thresholds"] = list(self.thresholds)
        d["resolution"] = self.resolution
        return d
