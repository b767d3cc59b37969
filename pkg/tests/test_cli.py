"""Tests for the command-line entry point and its exit codes."""
import json

import pytest

from monostatic.bodies import cube
from monostatic.cli import main
from monostatic.errors import EXIT_INADMISSIBLE, EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION
from monostatic.stl_io import stl_bytes
from monostatic.surfaces import TriMesh

TINY = ["--directions", "300", "--res", "16x32", "--workers", "1"]


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


def _stderr_error(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


class TestGenerate:
    """generate writes an STL and describes it."""

    def test_ok(self, tmp_path, capsys):
        """A small admissible mesh exits 0."""
        out = tmp_path / "m.stl"
        code = main(["generate", "--family", "sloan-eta", "--beta", "0.05", "--res", "16x32", "--out", str(out)])
        assert code == EXIT_OK
        assert out.stat().st_size == 84 + 50 * 2 * 16 * 32
        body = _stdout_json(capsys)
        assert body["kind"] == "mesh"
        assert body["triangles"] == 1024
        assert body["degenerate_triangles"] == 0

    def test_negative_beta(self, tmp_path, capsys):
        """beta < 0 exits 2 with a JSON error."""
        code = main(["generate", "--family", "sloan-eta", "--beta", "-1", "--out", str(tmp_path / "m.stl")])
        assert code == EXIT_INADMISSIBLE
        err = _stderr_error(capsys)
        assert err["ok"] is False
        assert err["type"] == "InadmissibleSpec"
        assert not (tmp_path / "m.stl").exists()

    def test_unknown_family(self, tmp_path):
        """Unknown family names exit 2."""
        assert main(["generate", "--family", "torus", "--beta", "0.1", "--out", str(tmp_path / "m.stl")]) == 2

    def test_non_positive_radius(self, tmp_path):
        """r^4 <= 0 exits 2."""
        assert main(["generate", "--family", "sloan-eta", "--beta", "0.3", "--res", "16x32",
                     "--out", str(tmp_path / "m.stl")]) == EXIT_INADMISSIBLE


class TestUsage:
    """Argument errors exit 1."""

    @pytest.mark.parametrize("argv", [
        [],
        ["frobnicate"],
        ["generate", "--family", "sloan-eta"],
        ["ecs", "--directions", "many"],
        ["ecs"],
        ["ecs", "--family", "sloan-eta"],
        ["optimize", "--family", "f4", "--beta-bounds", "1:2:3"],
    ])
    def test_bad_args(self, argv, capsys):
        """Malformed or incomplete arguments."""
        assert main(argv) == EXIT_USAGE
        assert _stderr_error(capsys)["ok"] is False

    def test_bad_config_value(self):
        """Out-of-range configuration values are usage errors."""
        assert main(["ecs", "--family", "eta", "--beta", "0", "--directions", "10"]) == EXIT_USAGE


class TestEcs:
    """ecs on files and specs."""

    def test_mesh_file(self, tmp_path, capsys):
        """A generated STL is counted."""
        path = tmp_path / "m.stl"
        main(["generate", "--family", "radial-f4", "--beta", "0.035", "--coeff", "0.274", "--res", "16x32",
              "--out", str(path)])
        capsys.readouterr()
        assert main(["ecs", "--mesh", str(path), "--directions", "300"]) == EXIT_OK
        body = _stdout_json(capsys)
        assert body["kind"] == "ecs"
        assert body["ecs"]["default_ecs"] >= 1
        assert body["config"]["directions"] == 300

    def test_missing_file(self, tmp_path, capsys):
        """A missing mesh exits 3."""
        assert main(["ecs", "--mesh", str(tmp_path / "none.stl"), "--directions", "300"]) == EXIT_IO
        assert _stderr_error(capsys)["type"] == "FileNotFoundError"

    def test_open_mesh(self, tmp_path, capsys):
        """A single-triangle STL is an open mesh: exit 3."""
        m = cube()
        path = tmp_path / "tri.stl"
        path.write_bytes(stl_bytes(TriMesh(m.vertices, m.triangles[:1], "tri")))
        assert main(["ecs", "--mesh", str(path), "--directions", "300"]) == EXIT_IO
        assert _stderr_error(capsys)["type"] == "OpenMesh"

    def test_truncated_file(self, tmp_path):
        """A truncated STL exits 3."""
        path = tmp_path / "bad.stl"
        path.write_bytes(stl_bytes(cube())[:200])
        assert main(["ecs", "--mesh", str(path), "--directions", "300"]) == EXIT_IO

    def test_analytic_sphere(self, capsys):
        """The analytic oracle reports the sphere as degenerate."""
        assert main(["ecs", "--family", "eta", "--beta", "0", "--analytic", "--directions", "300"]) == EXIT_OK
        body = _stdout_json(capsys)
        assert body["oracle"] == "analytic"
        assert body["ecs"]["degenerate"] is True

    def test_spec(self, tmp_path, capsys):
        """A spec goes through the mesh oracle and writes its report."""
        out = tmp_path / "ecs.json"
        assert main(["ecs", "--family", "f4", "--beta", "0.035", "--coeff", "0.274", *TINY,
                     "--out", str(out)]) == EXIT_OK
        written = json.loads(out.read_text())
        assert written["schema_version"] == 1
        assert written["oracle"] == "mesh"
        assert "com_violation" in written


class TestValidate:
    """validate checks the canonical bodies against their known counts."""

    def test_default_rule(self, capsys):
        """The level verdict gives cylinder 2 and capsule 1 at the default oracle size."""
        assert main(["validate", "--directions", "5000", "--knn", "12", "--workers", "1"]) == EXIT_OK
        body = _stdout_json(capsys)
        assert body["merge_rule"] == "level"
        assert body["cylinder"] == 2
        assert body["capsule"] == 1
        assert body["sphere_degenerate"] is True
        for kind in ("cube", "cylinder", "capsule"):
            assert body["by_rule"]["level"][kind] <= body["by_rule"]["adjacent"][kind]

    def test_adjacent_rule_splits_cylinder(self, capsys):
        """Ring noise fragments the cylinder under the adjacent rule."""
        assert main(["validate", "--directions", "5000", "--knn", "12", "--workers", "1",
                     "--merge-rule", "adjacent"]) == EXIT_VALIDATION
        body = _stdout_json(capsys)
        assert body["ok"] is False
        assert body["cylinder"] > 2


class TestBatchCommands:
    """Sweeps, maps, catalog, optimize and metrics."""

    def test_sweep_beta(self, tmp_path, capsys):
        """One CSV row per beta, failures included."""
        out = tmp_path / "sweep.csv"
        assert main(["sweep-beta", "--betas", "0,0.05,0.3", *TINY, "--out", str(out)]) == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0].startswith("beta,")
        assert len(lines) == 4
        rows = _stdout_json(capsys)["rows"]
        assert [r["ok"] for r in rows] == [True, True, False]

    def test_map(self, tmp_path, capsys):
        """A one-column phase map at beta = 0."""
        out = tmp_path / "map.csv"
        assert main(["map", "--family", "extended-phase", "--beta-grid", "0", "--coeff-grid=-0.2:0.2:0.1",
                     *TINY, "--out", str(out)]) == EXIT_OK
        body = _stdout_json(capsys)
        assert body["n_cells"] == 5
        assert body["n_components"] == 0
        assert len(out.read_text().splitlines()) == 6

    def test_map_short_axis(self):
        """Three-point axes are refused."""
        assert main(["map", "--family", "f4", "--beta-grid", "0.01:0.03:0.01", "--coeff-grid", "0",
                     *TINY]) == EXIT_USAGE

    def test_catalog(self, tmp_path, capsys):
        """One entry: STL and catalog.json under --out."""
        assert main(["catalog", "--entries", "6", *TINY, "--out", str(tmp_path)]) == EXIT_OK
        assert (tmp_path / "entry_06.stl").exists()
        written = json.loads((tmp_path / "catalog.json").read_text())
        assert written["kind"] == "catalog"
        assert written["entries"][0]["index"] == 6
        assert "6" in _stdout_json(capsys)["verdicts"]

    def test_catalog_bad_entries(self, tmp_path):
        """Entries outside 1-13 are usage errors."""
        assert main(["catalog", "--entries", "14", *TINY, "--out", str(tmp_path)]) == EXIT_USAGE

    def test_optimize_fixed_sphere(self, capsys):
        """Fixing both parameters at the sphere reports a degenerate run."""
        assert main(["optimize", "--family", "eta", "--beta-bounds", "0", "--coeff-bounds", "0",
                     *TINY]) == EXIT_OK
        body = _stdout_json(capsys)
        assert body["status"] == "degenerate"

    def test_metrics(self, capsys):
        """Metrics of a spec."""
        assert main(["metrics", "--family", "f4", "--beta", "0.035", "--coeff", "0.274", *TINY]) == EXIT_OK
        body = _stdout_json(capsys)
        assert body["metrics"]["h_range"] > 0
        assert body["source"]["family"] == "radial-f4"
