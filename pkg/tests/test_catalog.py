"""Tests for the built-in catalog and its aggregate checks."""
import pytest

from monostatic.catalog import (SLOAN_SWEEP, CatalogEntry, aggregate, builtin_catalog, parse_entries, reproduce,
                                reproduce_all)
from monostatic.metrics import MetricsReport
from monostatic.surfaces import Family, SurfaceSpec


def _as_published(entry: CatalogEntry) -> CatalogEntry:
    """Fill an entry's measurements with its own published numbers."""
    entry.reproduced = MetricsReport(**entry.published)
    entry.verdicts = {"ecs_all_thresholds": True}
    entry.convexity_ratio = 1.0
    return entry


class TestBuiltinCatalog:
    """The thirteen published parameter sets."""

    def test_size(self):
        """Thirteen entries numbered 1-13."""
        entries = builtin_catalog()
        assert [e.index for e in entries] == list(range(1, 14))

    @pytest.mark.parametrize("index,family,harmonic,beta,coeff", [
        (1, Family.RADIAL_F3, 1, 0.008, 0.016),
        (6, Family.EXTENDED_PHASE, 1, 0.023, 0.234),
        (9, Family.EXTENDED_PHASE, 2, 0.032, 0.138),
        (12, Family.EXTENDED_PHASE, 3, 0.052, -0.055),
    ])
    def test_entries(self, index, family, harmonic, beta, coeff):
        """Spot-check the published specs."""
        spec = builtin_catalog()[index - 1].spec
        assert spec == SurfaceSpec(family, beta, coeff, harmonic)

    def test_sweep_table(self):
        """The eta-phase sweep lists seven beta values."""
        assert sorted(SLOAN_SWEEP) == [0.001, 0.005, 0.01, 0.02, 0.05, 0.10, 0.15]
        assert SLOAN_SWEEP[0.05] == (2, True, 0.097)

    def test_published_provenance(self):
        """Serialised entries mark their published numbers."""
        d = builtin_catalog()[0].to_dict()
        assert d["published"]["provenance"] == "PAPER"
        assert d["reproduced"] is None


class TestParseEntries:
    """Entry selection strings."""

    @pytest.mark.parametrize("raw,expected", [
        (None, list(range(1, 14))),
        ("1-13", list(range(1, 14))),
        ("1,6,10", [1, 6, 10]),
        ("2-4,9", [2, 3, 4, 9]),
        ("6, 6", [6]),
    ])
    def test_valid(self, raw, expected):
        """Ranges and lists."""
        assert parse_entries(raw) == expected

    @pytest.mark.parametrize("raw", ["0", "14", "12-15"])
    def test_out_of_range(self, raw):
        """Indices outside 1-13 are refused."""
        with pytest.raises(ValueError):
            parse_entries(raw)


class TestReproduce:
    """Measuring catalog entries."""

    def test_entry(self, tiny_config):
        """A coarse run fills the report, metrics and every verdict."""
        entry = reproduce(builtin_catalog()[5], tiny_config)
        assert entry.ok
        assert entry.report is not None
        assert entry.reproduced.h_range > 0
        assert set(entry.verdicts) == {"ecs_all_thresholds", "h_range", "sre", "asymmetry", "su_angle", "convex"}
        d = entry.to_dict()
        assert d["ecs"]["merge_rule"] == "adjacent"

    def test_failure_recorded(self, tiny_config):
        """An inadmissible entry is recorded, not raised."""
        entry = CatalogEntry(index=99, spec=SurfaceSpec(Family.SLOAN_ETA, 0.3), published={"h_range": 0.1})
        entry = reproduce(entry, tiny_config)
        assert not entry.ok
        assert not entry.passed
        assert "NonPositiveRadius" in entry.error

    def test_reproduce_subset(self, tiny_config):
        """Selected indices only, with an aggregate."""
        entries, agg = reproduce_all(tiny_config, [1, 13])
        assert [e.index for e in entries] == [1, 13]
        assert agg["n_entries"] == 2
        assert "checks" in agg

    def test_phase_entry_at_default_resolution(self, default_config):
        """Entry 6 counts one equilibrium at every threshold with its published h-range."""
        entry = reproduce(builtin_catalog()[5], default_config)
        assert entry.verdicts["ecs_all_thresholds"]
        assert entry.verdicts["h_range"]
        assert entry.verdicts["convex"]
        assert entry.report.merged_count_by_threshold == {t: 1 for t in default_config.thresholds}

    @pytest.mark.xfail(reason="a second basin near d = (1, 0.05, -0.01) survives merging; see DESIGN.md",
                       strict=False)
    def test_steepest_entry_at_default_resolution(self, default_config):
        """Entry 13 counts one equilibrium at every threshold."""
        assert reproduce(builtin_catalog()[12], default_config).passed


class TestAggregate:
    """Catalog-level claims evaluated on the published numbers."""

    def test_published_numbers_pass(self):
        """The published table satisfies every aggregate check."""
        agg = aggregate([_as_published(e) for e in builtin_catalog()])
        assert agg["correlation"] >= 0.99
        assert 5.5 <= agg["sre_ratio"] <= 7.5
        assert 6.0 <= agg["asymmetry_ratio"] <= 8.5
        assert agg["family_count"] == {"phase": 3, "radial": 10}
        assert all(agg["checks"].values()), agg["checks"]

    def test_too_few_for_correlation(self):
        """Two entries record the correlation error instead of raising."""
        agg = aggregate([_as_published(e) for e in builtin_catalog()[:2]])
        assert agg["correlation"] is None
        assert "InsufficientData" in agg["correlation_error"]
        assert not agg["checks"]["correlation"]

    def test_failed_entry(self):
        """A failed entry counts against all_mono_monostatic."""
        entries = [_as_published(e) for e in builtin_catalog()]
        entries[0].ok = False
        agg = aggregate(entries)
        assert agg["n_reproduced"] == 12
        assert not agg["checks"]["all_mono_monostatic"]

    def test_asymmetry_order(self):
        """Swapping two entries' asymmetry breaks the index ordering and nothing else."""
        entries = [_as_published(e) for e in builtin_catalog()]
        first, second = entries[0].reproduced, entries[1].reproduced
        first.asymmetry, second.asymmetry = second.asymmetry, first.asymmetry
        checks = aggregate(entries)["checks"]
        assert not checks["ordered_by_asymmetry"]
        assert checks["steepness_rises_with_h_range"]
        assert checks["asymmetry_ratio"]

    @pytest.mark.parametrize("steepness,expected", [(0.011, True), (0.0125, False)])
    def test_steepness_slack(self, steepness, expected):
        """The lowest-range entry may exceed its successor by the rounding slack only."""
        entries = [_as_published(e) for e in builtin_catalog()]
        entries[0].reproduced.steepness = steepness
        assert aggregate(entries)["checks"]["steepness_rises_with_h_range"] is expected
