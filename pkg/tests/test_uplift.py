import dataclasses
import math
import time

import numpy as np
import pytest

from tanksim import uplift
from tanksim.model import bundled_spec
from tanksim.uplift import (
    PINNED, ROTATION_SPRING, closed_form_pinned, moment_rotation,
    plastic_limit_check, solve_strip, strip_for, uplift_curve,
)


@pytest.fixture(scope="module")
def strip(broad_spec=None):
    return strip_for(bundled_spec("broad"), restraint=PINNED,
                     max_uplift=0.02)


class TestStripSolver:
    def test_closed_form_match(self, strip):
        # pinned strip: l = (24 D w / q)^(1/4), P = q l / 2
        for w in np.geomspace(5e-5, 0.016, 8):
            sol = solve_strip(strip, w)
            p_ref, l_ref = closed_form_pinned(strip, w)
            assert sol.edge_force == pytest.approx(p_ref, rel=0.01)
            assert sol.uplifted_length == pytest.approx(l_ref, rel=0.01)

    def test_complementarity(self, strip):
        sol = solve_strip(strip, 0.005)
        assert sol.complementarity < 1e-10

    def test_deflection_nonnegative(self, strip):
        sol = solve_strip(strip, 0.005)
        assert np.all(sol.deflection >= -1e-14)

    def test_contact_reactions_compressive(self, strip):
        sol = solve_strip(strip, 0.005)
        assert np.all(sol.contact_reactions >= -1e-9)

    def test_zero_uplift(self, strip):
        sol = solve_strip(strip, 0.0)
        assert sol.edge_force == 0.0
        assert sol.uplifted_length == 0.0

    def test_negative_uplift_rejected(self, strip):
        with pytest.raises(ValueError):
            solve_strip(strip, -1e-4)

    def test_quarter_power_force_law(self, strip):
        # P ~ w^(1/4) for the pinned strip
        p1 = solve_strip(strip, 0.001).edge_force
        p16 = solve_strip(strip, 0.016).edge_force
        assert p16 / p1 == pytest.approx(2.0, rel=0.02)

    def test_node_doubling(self):
        spec = bundled_spec("broad")
        w = 0.008
        a = solve_strip(strip_for(spec, nodes=200, restraint=PINNED,
                                  max_uplift=0.02), w)
        b = solve_strip(strip_for(spec, nodes=400, restraint=PINNED,
                                  max_uplift=0.02), w)
        assert a.edge_force == pytest.approx(b.edge_force, rel=0.005)
        assert a.uplifted_length == pytest.approx(b.uplifted_length,
                                                  rel=0.005)

    def test_stiffer_plate_lifts_longer(self):
        spec = bundled_spec("broad")
        base = strip_for(spec, restraint=PINNED, max_uplift=0.02)
        stiff = dataclasses.replace(base, rigidity=2.0 * base.rigidity)
        assert solve_strip(stiff, 0.005).uplifted_length > \
            solve_strip(base, 0.005).uplifted_length

    def test_rotation_spring_stiffer_than_pinned(self):
        spec = bundled_spec("broad")
        pin = strip_for(spec, restraint=PINNED, max_uplift=0.02)
        rot = strip_for(spec, restraint=ROTATION_SPRING, max_uplift=0.02)
        assert solve_strip(rot, 0.005).edge_force >= \
            solve_strip(pin, 0.005).edge_force


class TestUpliftCurve:
    def test_monotone(self, strip):
        curve = uplift_curve(strip, 0.016, samples=20)
        assert curve.uplift[0] == 0.0
        assert np.all(np.diff(curve.edge_force) > 0)
        assert np.all(np.diff(curve.uplifted_length[1:]) > 0)

    def test_peak_moment_grows(self, strip):
        curve = uplift_curve(strip, 0.016, samples=15)
        assert np.all(np.diff(curve.peak_moment[1:]) > 0)


class TestPlasticLimit:
    def test_hinge_moment_square_law(self, strip):
        spec = bundled_spec("broad")
        curve = uplift_curve(strip, 0.016, samples=10)
        thin = plastic_limit_check(strip, spec.shell, curve)
        thick = plastic_limit_check(
            dataclasses.replace(strip, thickness=2.0 * strip.thickness),
            spec.shell, curve)
        assert thick.hinge_moment == pytest.approx(4.0 * thin.hinge_moment,
                                                   rel=1e-12)

    def test_infinite_yield_never_hinges(self, strip):
        spec = bundled_spec("broad")
        curve = uplift_curve(strip, 0.016, samples=10)
        # the broad tank's plate stays elastic over this range, while a
        # near-zero yield stress hinges immediately
        res = plastic_limit_check(strip, spec.shell, curve)
        assert res.first_yield_uplift == math.inf
        soft = dataclasses.replace(spec.shell, yield_stress=1.0)
        res_soft = plastic_limit_check(strip, soft, curve)
        assert res_soft.first_yield_uplift < curve.uplift[-1]


class TestMomentRotation:
    def test_monotone_and_equilibrated(self):
        spec = bundled_spec("broad")
        start = time.perf_counter()
        curve = moment_rotation(spec, np.linspace(0.0, 0.02, 13)[1:])
        elapsed = time.perf_counter() - start
        assert elapsed < 10.0
        assert np.all(np.diff(curve.moment) > 0)
        assert np.all(curve.equilibrium_residual < 0.005)

    def test_neutral_offset_within_radius(self):
        spec = bundled_spec("broad")
        curve = moment_rotation(spec, np.linspace(0.0, 0.01, 6)[1:])
        R = spec.geometry.radius
        assert np.all(np.abs(curve.neutral_offset) <= R)

    def test_edge_uplift_grows(self):
        spec = bundled_spec("broad")
        curve = moment_rotation(spec, np.linspace(0.0, 0.01, 6)[1:])
        assert np.all(np.diff(curve.edge_uplift) > 0)

    def test_anchored_refused(self):
        with pytest.raises(ValueError, match="unanchored"):
            moment_rotation(bundled_spec("slender"), [0.001])

    def test_descending_grid_refused(self):
        with pytest.raises(ValueError):
            moment_rotation(bundled_spec("broad"), [0.01, 0.001])
