"""Canonical annulus map: round-annulus oracle, stability, and inversion.

Oracle: on a round annulus the identity (up to rotation/scaling) is the
canonical map, so the recovered modulus must match the construction
parameter to near machine precision.
"""

import numpy as np
import pytest

from squeezelab.conformal import canonical_annulus_map
from squeezelab.domains import annulus, disc, random_interior_points
from squeezelab.errors import ConfigError


class TestRoundAnnulusOracle:
    def test_modulus_recovered(self, round_annulus_map):
        assert round_annulus_map.modulus == pytest.approx(0.3, abs=1e-10)

    def test_forward_preserves_circles(self, round_annulus_map):
        # |z| = s must land on |w| = s for the round annulus (up to rotation)
        for s in (0.35, 0.6, 0.95):
            z = s * np.exp(1j * np.linspace(0, 2 * np.pi, 40))
            w = round_annulus_map.forward(z)
            np.testing.assert_allclose(np.abs(w), s, atol=1e-9)

    def test_roundtrip(self, round_annulus, round_annulus_map):
        pts = random_interior_points(round_annulus, 50, seed=8)
        back = round_annulus_map.backward(round_annulus_map.forward(pts))
        np.testing.assert_allclose(back, pts, atol=1e-9)

    def test_scale_and_translation_invariance(self):
        moved = annulus(0.3, center=1.5 - 0.5j, scale=2.0)
        amap = canonical_annulus_map(moved)
        assert amap.modulus == pytest.approx(0.3, abs=1e-4)

    def test_rejects_simply_connected(self):
        with pytest.raises(ConfigError):
            canonical_annulus_map(disc())


class TestLensMap:
    def test_modulus_frozen_value(self, lens_map):
        assert lens_map.modulus == pytest.approx(0.34842830858, abs=1e-6)

    def test_residual_small(self, lens_map):
        assert lens_map.residual < 1e-6
        assert lens_map.boundary_deviation < 1e-6
        assert lens_map.mirrored

    def test_forward_gap_scaling_near_cusp_point(self, lens_map):
        # near the imaginary-axis segment 1 - |w| scales linearly with the
        # distance; the ratio is frozen from a Cauchy-stable computation
        for k in (10, 16, 24, 32):
            p = 2.0 ** -k
            _, gap = lens_map.forward_gap(p)
            assert gap > 0
            assert gap / p == pytest.approx(0.133559, rel=1e-3)

    def test_roundtrip_on_nondegenerate_samples(self, omega_prime, lens_map):
        # the thin channel crushes angles below double precision; invert
        # only where the derivative is not exponentially small
        pts = random_interior_points(omega_prime, 120, seed=5)
        deriv = np.abs([lens_map._eval_deriv(p) for p in pts])
        pts = pts[deriv > 1e-3]
        assert len(pts) >= 60
        back = lens_map.backward(lens_map.forward(pts))
        np.testing.assert_allclose(back, pts, atol=1e-7)

    def test_hole_maps_to_inner_circle(self, omega_prime, lens_map):
        w = lens_map.forward(omega_prime.holes[0].points()[::32])
        np.testing.assert_allclose(np.abs(w), lens_map.modulus, atol=1e-6)
