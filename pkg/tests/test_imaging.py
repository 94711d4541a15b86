import math

import numpy as np
import pytest

from cotans.geometry import Boundary, Ellipse, Point2, nlos_distance
from cotans.imaging import (
    CotansImage,
    GridSpec,
    accumulate_curves,
    bin_of,
    build_cotans,
    normalize,
    rasterize_curve,
    read_image,
    render_bei,
    write_image,
)
from cotans.sampler import SamplerConfig, sample_scenario

GRID = GridSpec()


class TestBinOf:
    def test_extremes(self):
        assert bin_of(GRID, Boundary(0.0, -math.pi)) == (0, 0)
        assert bin_of(GRID, Boundary(10.0, math.radians(179.0))) == (100, 359)

    def test_rounding_half_away_from_zero(self):
        ri, ti = bin_of(GRID, Boundary(5.05, math.radians(0.4)))
        assert ri == 51
        assert ti == 180

    def test_out_of_range_rho(self):
        with pytest.raises(ValueError):
            bin_of(GRID, Boundary(10.5, 0.0))

    def test_theta_wraps_to_first_bin(self):
        # nearest cell center to 179.6 deg is -180 deg
        assert bin_of(GRID, Boundary(1.0, math.radians(179.6)))[1] == 0


class TestRasterizeCurve:
    def test_circle_fills_a_row(self):
        img = CotansImage.zeros(GRID)
        rasterize_curve(img, Ellipse(Point2(0, 0), Point2(0, 0), 4.0))
        assert np.array_equal(img.values[20, :], np.ones(360))
        assert img.values.sum() == 360

    def test_ellipse_outside_grid(self):
        img = CotansImage.zeros(GRID)
        rasterize_curve(img, Ellipse(Point2(0, 0), Point2(0, 0), 50.0))
        assert img.values.sum() == 0

    def test_noiseless_curves_pass_through_truth(self, rng):
        cfg = SamplerConfig(p_single=1.0)
        for trial in range(20):
            sc = sample_scenario(cfg, rng)
            b = sc.boundaries[0]
            ri, ti = bin_of(GRID, b)
            for r in sc.receivers:
                img = CotansImage.zeros(GRID)
                d = nlos_distance(sc.emitter, r, b)
                rasterize_curve(img, Ellipse(sc.emitter, r, d))
                col = img.values[:, ti]
                votes = np.flatnonzero(col)
                assert votes.size == 1
                assert abs(int(votes[0]) - ri) <= 1


class TestBuildCotans:
    def _noiseless_taus(self, sc):
        out = []
        for r in sc.receivers:
            out.append([
                nlos_distance(sc.emitter, r, b) / sc.sound_speed
                for b in sc.boundaries
            ])
        return out

    def test_peak_at_true_boundaries(self, rng):
        cfg = SamplerConfig(p_single=0.0)
        sc = sample_scenario(cfg, rng)
        raw = accumulate_curves(
            sc.emitter, sc.receivers, sc.sound_speed,
            self._noiseless_taus(sc), GRID,
        )
        for b in sc.boundaries:
            ri, ti = bin_of(GRID, b)
            neighborhood = raw.values[max(ri - 1, 0):ri + 2, ti - 1:ti + 2]
            assert neighborhood.sum() >= 5

    def test_empty_delays_flagged(self):
        img = build_cotans(Point2(0, 0), [Point2(1, 0)], 1500.0, [[]], GRID)
        assert img.empty
        assert img.values.sum() == 0

    def test_infeasible_delay_skipped(self):
        e, r = Point2(0, 0), Point2(3, 0)
        img = build_cotans(e, [r], 1500.0, [[1e-4]], GRID)  # c*tau = 0.15 < 3
        assert img.n_skipped == 1

    def test_normalized_max_is_one(self, rng):
        cfg = SamplerConfig()
        sc = sample_scenario(cfg, rng)
        img = build_cotans(
            sc.emitter, sc.receivers, sc.sound_speed,
            self._noiseless_taus(sc), GRID,
        )
        assert img.values.max() == 1.0

    def test_accumulation_linearity(self, rng):
        cfg = SamplerConfig(p_single=0.0)
        sc = sample_scenario(cfg, rng)
        taus = self._noiseless_taus(sc)
        first = [[t[0]] for t in taus]
        second = [[t[1]] for t in taus]
        both = accumulate_curves(sc.emitter, sc.receivers, sc.sound_speed, taus, GRID)
        a = accumulate_curves(sc.emitter, sc.receivers, sc.sound_speed, first, GRID)
        b = accumulate_curves(sc.emitter, sc.receivers, sc.sound_speed, second, GRID)
        assert np.array_equal(both.values, a.values + b.values)


class TestRenderBei:
    def test_gaussian_values_at_center_and_offset(self):
        bei = render_bei([Boundary(5.0, 0.0)], GRID)
        assert bei.values[50, 180] == 1.0
        expected = math.exp(-1.0 / 8.0)
        assert abs(bei.values[51, 180] - expected) < 1e-12
        assert abs(bei.values[50, 181] - expected) < 1e-12

    def test_theta_wraparound(self):
        bei = render_bei([Boundary(5.0, math.radians(179.5))], GRID)
        # nearest center is -180 deg (column 0); mass wraps into both edges
        assert bei.values[50, 0] == 1.0
        assert bei.values[50, 359] > 0.5
        assert bei.values[50, 5] > 0.0

    def test_two_disjoint_pulses(self):
        bei = render_bei([Boundary(5.0, 0.0), Boundary(5.0, math.radians(30))], GRID)
        assert bei.values.max() == 1.0
        assert bei.values[50, 180] == 1.0 and bei.values[50, 210] == 1.0
        assert np.all(bei.values <= 1.0) and np.all(bei.values >= 0.0)

    def test_edge_pulse_rotates_to_center(self):
        edge = render_bei([Boundary(5.0, -math.pi)], GRID)
        center = render_bei([Boundary(5.0, 0.0)], GRID)
        assert np.allclose(np.roll(edge.values, 180, axis=1), center.values)

    def test_boundary_outside_rho_range(self):
        with pytest.raises(ValueError):
            render_bei([Boundary(11.0, 0.0)], GRID)


class TestImageIO:
    def test_round_trip(self, tmp_path, rng):
        values = rng.random((GRID.n_rho, GRID.n_theta)).astype(np.float32)
        path = tmp_path / "img.f32"
        write_image(path, values)
        back = read_image(path, GRID)
        assert np.array_equal(back, values.astype(float))
        assert path.stat().st_size == 4 * GRID.n_rho * GRID.n_theta

    def test_size_mismatch_rejected(self, tmp_path):
        path = tmp_path / "bad.f32"
        path.write_bytes(b"\x00" * 16)
        with pytest.raises(ValueError, match="expected"):
            read_image(path, GRID)
