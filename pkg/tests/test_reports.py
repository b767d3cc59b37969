"""Tests for JSON and CSV report writing."""
import csv
import json
import math

import numpy as np

from monostatic.reports import SCHEMA_VERSION, dumps, envelope, read_report, to_jsonable, write_csv, write_report
from monostatic.settings import RunConfig
from monostatic.surfaces import Family, SurfaceSpec


class TestJson:
    """Envelope and conversions."""

    def test_envelope(self):
        """Objects gain schema_version, kind and tool."""
        body = envelope({"a": 1}, "ecs")
        assert body["schema_version"] == SCHEMA_VERSION
        assert body["kind"] == "ecs"
        assert body["tool"].startswith("monostatic ")
        assert body["a"] == 1

    def test_list_stays_array(self):
        """Empty results serialise as []."""
        assert json.loads(dumps([], "sweep")) == []

    def test_conversions(self):
        """numpy values, enums, float keys and non-finite numbers."""
        out = to_jsonable({
            0.01: np.int64(3),
            "arr": np.array([1.5, math.nan]),
            "flag": np.bool_(True),
            "family": Family.RADIAL_F4,
            "spec": SurfaceSpec(Family.SLOAN_ETA, 0.05),
        })
        assert out["0.01"] == 3
        assert out["arr"] == [1.5, None]
        assert out["flag"] is True
        assert out["family"] == "radial-f4"
        assert out["spec"]["family"] == "sloan-eta"
        json.dumps(out)

    def test_config(self):
        """Run configurations serialise with their resolution."""
        out = to_jsonable(RunConfig(directions=300, n_theta=16, n_phi=32))
        assert out["resolution"] == "16x32"
        assert isinstance(out["thresholds"], list)


class TestFiles:
    """Atomic writes."""

    def test_write_read(self, tmp_path):
        """A written report reads back and leaves no temp file."""
        path = write_report({"ok": True}, str(tmp_path / "sub" / "r.json"), "test")
        assert read_report(path)["ok"] is True
        assert not (tmp_path / "sub" / "r.json.tmp").exists()

    def test_overwrite(self, tmp_path):
        """Rewriting replaces the previous content."""
        path = str(tmp_path / "r.json")
        write_report({"n": 1}, path)
        write_report({"n": 2}, path)
        assert read_report(path)["n"] == 2

    def test_csv(self, tmp_path):
        """Header is the union of row keys in first-seen order; None is blank."""
        rows = [{"beta": 0.0, "ecs": 1}, {"beta": 0.05, "ecs": None, "error": "x"}]
        path = write_csv(rows, str(tmp_path / "s.csv"))
        with open(path, newline="") as f:
            got = list(csv.reader(f))
        assert got[0] == ["beta", "ecs", "error"]
        assert got[1] == ["0.0", "1", ""]
        assert got[2] == ["0.05", "", "x"]
