"""Tests for canonical validation bodies."""
import math

import numpy as np
import pytest

from monostatic.bodies import BodyKind, canonical_body, capsule, cube, cylinder
from monostatic.geometry import degenerate_triangle_count, is_closed_manifold, mass_properties


class TestCanonicalBodies:
    """Sphere, cube, cylinder and capsule meshes."""

    @pytest.mark.parametrize("kind", list(BodyKind))
    def test_closed(self, kind):
        """Every body is a closed sphere-like 2-manifold with no zero-area triangles."""
        mesh = canonical_body(kind, 16)
        assert is_closed_manifold(mesh)
        assert degenerate_triangle_count(mesh) == 0
        assert mesh.euler_characteristic() == 2
        assert mesh.label == kind.value

    def test_cube_exact(self):
        """Unit cube: volume 1, COM at the origin."""
        mp = mass_properties(cube())
        assert mp.volume == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(mp.com, 0.0, atol=1e-12)

    def test_sphere_volume(self):
        """Resolution-64 sphere within 0.5 % of 4 pi / 3."""
        mp = mass_properties(canonical_body("sphere", 64))
        assert mp.volume == pytest.approx(4.0 * math.pi / 3.0, rel=5e-3)

    def test_cylinder(self):
        """Radius 0.5, height 1: COM at the origin, volume near pi / 4."""
        mp = mass_properties(cylinder(32))
        np.testing.assert_allclose(mp.com, 0.0, atol=1e-9)
        assert mp.volume == pytest.approx(math.pi / 4.0, rel=1e-3)

    def test_capsule(self):
        """Cylinder of length 1 plus a full ball of radius 0.5, total height 2."""
        mesh = capsule(32)
        mp = mass_properties(mesh)
        expected = math.pi * 0.25 * 1.0 + 4.0 / 3.0 * math.pi * 0.125
        assert mp.volume == pytest.approx(expected, rel=1e-2)
        np.testing.assert_allclose(mp.com, 0.0, atol=1e-9)
        assert mesh.vertices[:, 2].max() == pytest.approx(1.0)
        assert mesh.vertices[:, 2].min() == pytest.approx(-1.0)

    def test_minimum_resolution(self):
        """Resolution below 8 is refused."""
        with pytest.raises(ValueError):
            canonical_body(BodyKind.CYLINDER, 4)
