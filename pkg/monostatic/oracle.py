# monostatic/oracle.py
"""Equilibrium Count Score: count the local minima of the COM height

    h(d) = c . d - min_v v . d

over gravity directions d sampled on the sphere.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateFlat
from .geometry import mass_properties
from .settings import DEFAULT_THRESHOLD, DIAGNOSTIC_THRESHOLD, MERGE_RULES
from .surfaces import TriMesh

log = logging.getLogger("oracle")

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
DEFAULT_THRESHOLDS = (0.005, 0.01, 0.02, 0.05, 0.10)
FLAT_RTOL = 1e-12
CHUNK = 512


def _chunks(n: int, size: int) -> Iterator[slice]:
    for i in range(0, n, size):
        yield slice(i, min(i + size, n))


# -----------------------------------------------------------------------------
# Directions
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class DirectionSet:
    directions: np.ndarray      # (N, 3) unit vectors
    knn: np.ndarray             # (N, D) neighbour indices, ascending per row, -1 padded
    edges: np.ndarray           # (E, 2) undirected kNN edges, i < j
    k: int

    @property
    def n(self) -> int:
        return len(self.directions)

    def neighbors(self, i: int) -> np.ndarray:
        row = self.knn[i]
        return row[row >= 0]


def knn_graph(directions: np.ndarray, k: int):
    """Symmetrised k-nearest-neighbour graph: j in knn(i) implies i in knn(j)."""
    n = len(directions)
    if not 0 < k < n:
        raise ValueError(f"k must be in [1, {n - 1}]")
    _, idx = cKDTree(directions).query(directions, k=k + 1)
    rows = np.repeat(np.arange(n), k + 1)
    cols = idx.ravel()
    keep = rows != cols
    pairs = np.sort(np.stack([rows[keep], cols[keep]], axis=1), axis=1)
    edges = np.unique(pairs, axis=0)

    both = np.concatenate([edges, edges[:, ::-1]])
    both = both[np.lexsort((both[:, 1], both[:, 0]))]
    degree = np.bincount(both[:, 0], minlength=n)
    start = np.concatenate([[0], np.cumsum(degree)[:-1]])
    slot = np.arange(len(both)) - start[both[:, 0]]
    knn = np.full((n, int(degree.max())), -1, dtype=np.int64)
    knn[both[:, 0], slot] = both[:, 1]
    return knn, edges


def fibonacci_sphere(n: int = 5000, k: int = 12, offset: float = 0.0) -> DirectionSet:
    """Golden-spiral directions; ``offset`` rotates the spiral about z for a fresh set."""
    if n < 100:
        raise ValueError("fibonacci_sphere needs n >= 100")
    i = np.arange(n, dtype=np.float64)
    z = 1.0 - 2.0 * (i + 0.5) / n
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = 2.0 * math.pi * i / GOLDEN + offset
    d = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    d /= np.linalg.norm(d, axis=1)[:, None]
    knn, edges = knn_graph(d, k)
    return DirectionSet(d, knn, edges, k)


@lru_cache(maxsize=8)
def cached_directions(n: int, k: int, offset: float = 0.0) -> DirectionSet:
    return fibonacci_sphere(n, k, offset)


# -----------------------------------------------------------------------------
# Height field
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class HeightField:
    directions: DirectionSet
    h: np.ndarray
    com: np.ndarray = field(default_factory=lambda: np.zeros(3))

    @property
    def h_min(self) -> float:
        return float(self.h.min())

    @property
    def h_max(self) -> float:
        return float(self.h.max())

    @property
    def h_range(self) -> float:
        return self.h_max - self.h_min

    @property
    def is_flat(self) -> bool:
        return self.h_range < FLAT_RTOL * max(1.0, abs(self.h_max))

    def su_angle_deg(self) -> float:
        """Angle between the global-minimum and global-maximum sample directions."""
        d = self.directions.directions
        c = float(np.clip(d[int(np.argmin(self.h))] @ d[int(np.argmax(self.h))], -1.0, 1.0))
        return math.degrees(math.acos(c))


def com_height(mesh: TriMesh, com, d) -> float:
    d = np.asarray(d, dtype=np.float64)
    return float(np.asarray(com, dtype=np.float64) @ d - (mesh.vertices @ d).min())


def height_field(mesh: TriMesh, dirs: DirectionSet, com: Optional[np.ndarray] = None) -> HeightField:
    c = mass_properties(mesh).com if com is None else np.asarray(com, dtype=np.float64)
    d = dirs.directions
    support = np.empty(dirs.n)
    for sl in _chunks(dirs.n, CHUNK):
        support[sl] = (mesh.vertices @ d[sl].T).min(axis=0)
    return HeightField(dirs, d @ c - support, c)


def constant_field(dirs: DirectionSet, value: float = 1.0) -> HeightField:
    """Exact height field of the unit sphere."""
    return HeightField(dirs, np.full(dirs.n, float(value)))


# -----------------------------------------------------------------------------
# Basins
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class BasinLabeling:
    sink_index: np.ndarray      # (N,) direction index of each direction's sink
    basin_of: np.ndarray        # (N,) basin number of each direction
    sinks: np.ndarray           # (S,) direction index of each sink, ascending
    sink_heights: np.ndarray    # (S,)
    adjacency: np.ndarray       # (M, 2) basin pairs sharing a kNN edge, a < b

    @property
    def count(self) -> int:
        return len(self.sinks)


def label_basins(field: HeightField) -> BasinLabeling:
    """Greedy steepest descent on the kNN graph with path compression.

    Each direction steps to its lowest neighbour while that neighbour is
    strictly lower; equal heights resolve to the lowest index.
    """
    if field.is_flat:
        raise DegenerateFlat(f"h is constant (range {field.h_range:.3g})")
    dirs = field.directions
    h = field.h
    nbr = dirs.knn
    n = dirs.n
    ids = np.arange(n)

    hn = np.where(nbr >= 0, h[np.maximum(nbr, 0)], np.inf)
    pos = np.argmin(hn, axis=1)
    best = nbr[ids, pos]
    nxt = np.where(hn[ids, pos] < h, best, ids)

    label = nxt
    while True:
        jumped = label[label]
        if np.array_equal(jumped, label):
            break
        label = jumped

    sinks = np.flatnonzero(nxt == ids)
    basin_number = np.full(n, -1, dtype=np.int64)
    basin_number[sinks] = np.arange(len(sinks))
    basin_of = basin_number[label]

    a = basin_of[dirs.edges[:, 0]]
    b = basin_of[dirs.edges[:, 1]]
    cross = a != b
    pairs = np.sort(np.stack([a[cross], b[cross]], axis=1), axis=1)
    adjacency = np.unique(pairs, axis=0) if len(pairs) else np.empty((0, 2), dtype=np.int64)
    return BasinLabeling(label, basin_of, sinks, h[sinks], adjacency)


class UnionFind:
    """Union-find whose class representative is the element with the lowest key."""

    def __init__(self, keys: Sequence[float]) -> None:
        self.keys = np.asarray(keys, dtype=np.float64)
        self.parents = list(range(len(self.keys)))
        self.num_components = len(self.keys)

    def _lower(self, a: int, b: int) -> bool:
        return (self.keys[a], a) < (self.keys[b], b)

    def find(self, elem: int) -> int:
        p = elem
        while p != self.parents[p]:
            p = self.parents[p]
        while elem != p:
            self.parents[elem], elem = p, self.parents[elem]
        return p

    def union(self, a: int, b: int) -> None:
        pa, pb = self.find(a), self.find(b)
        if pa == pb:
            return
        if self._lower(pb, pa):
            pa, pb = pb, pa
        self.parents[pb] = pa
        self.num_components -= 1

    def representatives(self) -> List[int]:
        return sorted({self.find(i) for i in range(len(self.parents))})


def _check_fraction(threshold_fraction: float) -> None:
    if not (0.0 < threshold_fraction <= 0.5):
        raise ValueError(f"threshold fraction must lie in (0, 0.5], got {threshold_fraction}")


def merge_classes(labeling: BasinLabeling, field: HeightField, threshold_fraction: float) -> UnionFind:
    """Adjacency fixpoint: adjacent basins whose sink heights differ by less
    than ``threshold_fraction * h_range`` share a class, transitively."""
    _check_fraction(threshold_fraction)
    tol = threshold_fraction * field.h_range
    uf = UnionFind(labeling.sink_heights)
    adj = labeling.adjacency
    if len(adj):
        hs = labeling.sink_heights
        close = np.abs(hs[adj[:, 0]] - hs[adj[:, 1]]) < tol
        for a, b in adj[close]:
            uf.union(int(a), int(b))
    return uf


def _merge_pairwise(labeling: BasinLabeling, tol: float) -> int:
    """Single pass, closest pairs first; a basin merges with at most one partner."""
    adj = labeling.adjacency
    if not len(adj):
        return labeling.count
    hs = labeling.sink_heights
    diff = np.abs(hs[adj[:, 0]] - hs[adj[:, 1]])
    cand = np.flatnonzero(diff < tol)
    cand = cand[np.lexsort((adj[cand, 1], adj[cand, 0], diff[cand]))]
    used = np.zeros(labeling.count, dtype=bool)
    merges = 0
    for e in cand:
        a, b = adj[e]
        if not (used[a] or used[b]):
            used[a] = used[b] = True
            merges += 1
    return labeling.count - merges


def _merge_level(labeling: BasinLabeling, tol: float) -> int:
    """Sink heights chained by gaps below ``tol``, adjacency ignored."""
    gaps = np.diff(np.sort(labeling.sink_heights))
    return 1 + int(np.count_nonzero(gaps >= tol))


def merge_basins(labeling: BasinLabeling, field: HeightField, threshold_fraction: float,
                 rule: str = "adjacent") -> int:
    if rule == "adjacent":
        return merge_classes(labeling, field, threshold_fraction).num_components
    _check_fraction(threshold_fraction)
    tol = threshold_fraction * field.h_range
    if rule == "pairwise":
        return _merge_pairwise(labeling, tol)
    if rule == "level":
        return _merge_level(labeling, tol)
    raise ValueError(f"unknown merge rule {rule!r}; expected one of {MERGE_RULES}")


# -----------------------------------------------------------------------------
# Report
# -----------------------------------------------------------------------------
@dataclass
class ECSReport:
    raw_basin_count: int
    merged_count_by_threshold: Dict[float, int]
    default_ecs: int
    su_angle_deg: float
    h_min: float
    h_max: float
    h_range: float
    sink_heights: List[float] = field(default_factory=list)
    gap: float = 0.0
    degenerate: bool = False
    merge_rule: str = "adjacent"
    diagnostic_counts: Dict[float, int] = field(default_factory=dict)

    @property
    def is_mono_monostatic(self) -> bool:
        return not self.degenerate and all(c == 1 for c in self.merged_count_by_threshold.values())

    def to_dict(self) -> dict:
        return {
            "raw_basin_count": self.raw_basin_count,
            "merged_count_by_threshold": {f"{t:g}": c for t, c in self.merged_count_by_threshold.items()},
            "default_ecs": self.default_ecs,
            "su_angle_deg": self.su_angle_deg,
            "h_min": self.h_min,
            "h_max": self.h_max,
            "h_range": self.h_range,
            "gap": self.gap,
            "degenerate": self.degenerate,
            "merge_rule": self.merge_rule,
            "diagnostic_counts": {f"{t:g}": c for t, c in self.diagnostic_counts.items()},
            "sink_heights": [float(s) for s in self.sink_heights],
        }


def ecs_from_field(field: HeightField, thresholds: Optional[Iterable[float]] = None,
                   rule: str = "adjacent") -> ECSReport:
    ts = sorted(set(DEFAULT_THRESHOLDS if thresholds is None else thresholds))
    try:
        labeling = label_basins(field)
    except DegenerateFlat as e:
        log.info(f"degenerate landscape, reporting ECS 1: {e}")
        return ECSReport(
            raw_basin_count=1,
            merged_count_by_threshold={t: 1 for t in ts},
            default_ecs=1,
            su_angle_deg=0.0,
            h_min=field.h_min, h_max=field.h_max, h_range=field.h_range,
            sink_heights=[field.h_min],
            degenerate=True,
            merge_rule=rule,
            diagnostic_counts={DIAGNOSTIC_THRESHOLD: 1},
        )

    merged = {t: merge_basins(labeling, field, t, rule) for t in ts}
    default = merged.get(DEFAULT_THRESHOLD)
    if default is None:
        default = merge_basins(labeling, field, DEFAULT_THRESHOLD, rule)
    sinks = np.sort(labeling.sink_heights)
    return ECSReport(
        raw_basin_count=labeling.count,
        merged_count_by_threshold=merged,
        default_ecs=default,
        su_angle_deg=field.su_angle_deg(),
        h_min=field.h_min, h_max=field.h_max, h_range=field.h_range,
        sink_heights=[float(s) for s in sinks],
        gap=float(sinks[1] - sinks[0]) if len(sinks) > 1 else 0.0,
        merge_rule=rule,
        diagnostic_counts={DIAGNOSTIC_THRESHOLD: merge_basins(labeling, field, DIAGNOSTIC_THRESHOLD, rule)},
    )


def ecs(mesh: TriMesh, dirs: DirectionSet, thresholds: Optional[Iterable[float]] = None,
        rule: str = "adjacent", com: Optional[np.ndarray] = None) -> ECSReport:
    field = height_field(mesh, dirs, com)
    report = ecs_from_field(field, thresholds, rule)
    log.debug(f"ECS {mesh.label!r}: raw={report.raw_basin_count} default={report.default_ecs} "
              f"h_range={report.h_range:.4f}")
    return report
