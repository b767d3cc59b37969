# monostatic/metrics.py
"""Engineering metrics of a height landscape."""
import logging
from dataclasses import asdict, dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.stats import pearsonr

from .errors import InsufficientData
from .geometry import asymmetry, mass_properties
from .oracle import DirectionSet, HeightField, height_field
from .surfaces import TriMesh

log = logging.getLogger("metrics")

STEEPNESS_DEFINITION = "mean over kNN edges of |h(d_i) - h(d_j)| / arccos(d_i . d_j)"


@dataclass
class MetricsReport:
    h_range: float
    sre: float
    steepness: float
    asymmetry: float
    su_angle_deg: float
    steepness_definition: str = STEEPNESS_DEFINITION

    def to_dict(self) -> dict:
        return asdict(self)


def self_righting_energy(field: HeightField) -> float:
    """Mean drop from a random orientation to the lowest rest state."""
    if field.is_flat:
        return 0.0
    return float(np.mean(field.h - field.h_min))


def steepness(field: HeightField) -> float:
    if field.is_flat:
        return 0.0
    d = field.directions.directions
    e = field.directions.edges
    cos = np.clip(np.einsum("ij,ij->i", d[e[:, 0]], d[e[:, 1]]), -1.0, 1.0)
    arc = np.arccos(cos)
    keep = arc > 0
    dh = np.abs(field.h[e[:, 0]] - field.h[e[:, 1]])
    return float(np.mean(dh[keep] / arc[keep]))


def metrics_from_field(field: HeightField, body_asymmetry: float) -> MetricsReport:
    flat = field.is_flat
    return MetricsReport(
        h_range=0.0 if flat else field.h_range,
        sre=self_righting_energy(field),
        steepness=steepness(field),
        asymmetry=body_asymmetry,
        su_angle_deg=0.0 if flat else field.su_angle_deg(),
    )


def metrics_report(mesh: TriMesh, dirs: DirectionSet, com: Optional[np.ndarray] = None) -> MetricsReport:
    c = mass_properties(mesh).com if com is None else np.asarray(com, dtype=np.float64)
    return metrics_from_field(height_field(mesh, dirs, c), asymmetry(mesh, c))


def tradeoff_statistics(entries: Sequence[MetricsReport]) -> Tuple[float, float]:
    """Pearson r and two-sided p-value between h_range and SRE."""
    if len(entries) < 3:
        raise InsufficientData(f"correlation needs >= 3 entries, got {len(entries)}")
    x = np.array([e.h_range for e in entries], dtype=np.float64)
    y = np.array([e.sre for e in entries], dtype=np.float64)
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise InsufficientData("h_range or SRE is constant across entries")
    res = pearsonr(x, y)
    return float(res[0]), float(res[1])


def tradeoff_correlation(entries: Sequence[MetricsReport]) -> float:
    return tradeoff_statistics(entries)[0]
