"""Linear group properties: unitarity, group law, closed-form solutions."""

import math

import numpy as np
import pytest

from conftest import random_physical, random_zero_mean_frequency
from zkg.initial_data import DataSpec, make_data
from zkg.propagators import (
    ProfilePair,
    schrodinger_group,
    schrodinger_physical_of,
    schrodinger_profile_of,
    t_wrap,
    wave_half_group,
    wave_physical_of,
    wave_profile_of,
)
from zkg.spectral import (
    Grid,
    apply_multiplier,
    frequency_field,
    l2_norm,
    lambda_pow,
    lp_norm,
    physical_field,
    to_frequency,
    to_physical,
)


class TestSchrodingerGroup:
    def test_identity_at_t0(self, grid2d, rng):
        f = to_frequency(random_physical(grid2d, rng))
        assert np.array_equal(schrodinger_group(f, 0.0).values, f.values)

    def test_unitarity(self, grid3d, rng):
        f = to_frequency(random_physical(grid3d, rng))
        for s in (0.0, 0.5, 2.0):
            assert np.isclose(l2_norm(schrodinger_group(f, s)), l2_norm(f), rtol=1e-13)
            assert np.isclose(
                l2_norm(lambda_pow(schrodinger_group(f, s), 1.0)),
                l2_norm(lambda_pow(f, 1.0)),
                rtol=1e-13,
            )

    def test_group_law(self, grid2d, rng):
        f = to_frequency(random_physical(grid2d, rng))
        a = schrodinger_group(schrodinger_group(f, 0.3), 0.45)
        b = schrodinger_group(f, 0.75)
        assert np.max(np.abs(a.values - b.values)) <= 1e-12 * np.max(np.abs(b.values))
        inv = schrodinger_group(schrodinger_group(f, 0.7), -0.7)
        assert np.max(np.abs(inv.values - f.values)) <= 1e-12 * np.max(np.abs(f.values))

    def test_gaussian_closed_form(self):
        # oracle: free evolution of exp(-|x|^2/(2 s^2)) is the complex
        # gaussian (s^2/(s^2+2it))^{d/2} exp(-|x|^2/(2(s^2+2it)))
        grid = Grid(3, 64, 64.0)
        sigma = 2.5
        u0, _, _ = make_data(DataSpec(family="gaussian", amplitude=1e-3, sigma=sigma), grid)
        fh = to_frequency(u0)
        r2 = grid.radius_sq()
        for t in (0.5, 2.0, 4.0):
            got = to_physical(schrodinger_group(fh, t)).values
            a = sigma**2 + 2j * t
            exact = 1e-3 * (sigma**2 / a) ** 1.5 * np.exp(-r2 / (2 * a))
            peak = 1e-3 * (sigma**2 / abs(a)) ** 1.5
            assert np.max(np.abs(got - exact)) <= 1e-6 * peak

    def test_commutes_with_radial_multipliers(self, grid2d, rng):
        f = to_frequency(random_physical(grid2d, rng))
        m = lambda kx, ky: np.exp(-(kx**2 + ky**2))
        a = apply_multiplier(schrodinger_group(f, 0.9), m)
        b = schrodinger_group(apply_multiplier(f, m), 0.9)
        assert np.max(np.abs(a.values - b.values)) <= 1e-13 * max(np.max(np.abs(b.values)), 1e-30)


class TestWaveHalfGroup:
    def test_identity_at_t0(self, grid2d, rng):
        f = to_frequency(random_physical(grid2d, rng))
        for sign in (1, -1):
            assert np.array_equal(wave_half_group(f, sign, 0.0).values, f.values)

    def test_unitarity(self, grid2d, rng):
        f = to_frequency(random_physical(grid2d, rng))
        for sign in (1, -1):
            assert np.isclose(l2_norm(wave_half_group(f, sign, 1.7)), l2_norm(f), rtol=1e-13)

    def test_zero_mode_untouched(self, grid2d):
        vh = grid2d.zeros()
        vh[0, 0] = 2.0
        out = wave_half_group(frequency_field(grid2d, vh), 1, 3.0)
        assert out.values[0, 0] == 2.0

    def test_branch_signs_opposite(self, grid2d, rng):
        f = random_zero_mean_frequency(grid2d, rng)
        plus = wave_half_group(f, 1, 0.8)
        minus = wave_half_group(f, -1, -0.8)
        assert np.max(np.abs(plus.values - minus.values)) < 1e-13 * np.max(np.abs(f.values))

    def test_invalid_sign_rejected(self, grid2d, rng):
        f = to_frequency(random_physical(grid2d, rng))
        with pytest.raises(ValueError):
            wave_half_group(f, 0, 1.0)

    def test_cosine_evolution_vs_finite_difference(self):
        # oracle: second-order centered finite differences for the linear
        # wave equation n_tt = Laplacian n (spectral Laplacian), n1 = 0.
        grid = Grid(2, 32, 16.0)
        _, n0, n1 = make_data(DataSpec(family="gaussian", amplitude=1.0, sigma=1.5), grid)
        n0v = n0.values.real

        def lap(v):
            f = to_frequency(physical_field(grid, v))
            return to_physical(apply_multiplier(f, lambda kx, ky: -(kx**2 + ky**2))).values.real

        dt, T = 1e-3, 1.0
        prev = n0v
        cur = n0v + 0.5 * dt**2 * lap(n0v)  # n1 = 0 start
        steps = int(round(T / dt))
        for _ in range(steps - 1):
            prev, cur = cur, 2 * cur - prev + dt**2 * lap(cur)

        # half-wave reconstruction: n(T) = Re(e^{-iT Lambda} w_+), w_+ = n0
        from zkg.evolution import reconstruct_n, reduce_to_first_order

        wp = reduce_to_first_order(n0, n1)
        n_spec = reconstruct_n(wave_half_group(wp, 1, T)).values.real
        assert np.max(np.abs(n_spec - cur)) <= 1e-4 * np.max(np.abs(n0v))


class TestProfileMaps:
    def test_profile_at_t0_is_identity(self, grid2d, rng):
        f = to_frequency(random_physical(grid2d, rng))
        assert np.array_equal(schrodinger_profile_of(f, 0.0).values, f.values)
        assert np.array_equal(wave_profile_of(f, 1, 0.0).values, f.values)

    def test_roundtrip(self, grid2d, rng):
        f = to_frequency(random_physical(grid2d, rng))
        t = 1.3
        a = schrodinger_physical_of(schrodinger_profile_of(f, t), t)
        assert np.max(np.abs(a.values - f.values)) <= 1e-13 * np.max(np.abs(f.values))
        for sign in (1, -1):
            b = wave_physical_of(wave_profile_of(f, sign, t), sign, t)
            assert np.max(np.abs(b.values - f.values)) <= 1e-13 * np.max(np.abs(f.values))

    def test_group_law_of_profiles(self, grid2d, rng):
        f = to_frequency(random_physical(grid2d, rng))
        a = schrodinger_profile_of(schrodinger_profile_of(f, 0.4), 0.35)
        b = schrodinger_profile_of(f, 0.75)
        assert np.max(np.abs(a.values - b.values)) <= 1e-12 * np.max(np.abs(b.values))

    def test_profile_pair_validates_spaces(self, grid2d, rng):
        f = random_physical(grid2d, rng)
        with pytest.raises(ValueError):
            ProfilePair(f, f, 0.0)


class TestDecayWindow:
    def test_t_wrap_values(self):
        grid = Grid(3, 64, 64.0)
        assert np.isclose(t_wrap(grid, "wave"), 32.0)
        assert np.isclose(t_wrap(grid, "schrodinger"), 64.0 / (4.0 * grid.k_max))
        with pytest.raises(ValueError):
            t_wrap(grid, "acoustic")

    def test_sup_norm_band_before_wraparound(self):
        # dispersive flatness of t^{3/2} sup|e^{it Lap} u0| for localized data
        grid = Grid(3, 64, 64.0)
        u0, _, _ = make_data(DataSpec(family="gaussian", amplitude=1e-3, sigma=1.0), grid)
        fh = to_frequency(u0)
        ts = np.geomspace(1.0, t_wrap(grid, "schrodinger"), 12)
        band = np.array(
            [t**1.5 * lp_norm(to_physical(schrodinger_group(fh, t)), math.inf) for t in ts]
        )
        med = np.median(band)
        assert band.max() <= 2.0 * med
        assert band.min() >= 0.5 * med

    def test_l6_decay_slope_before_wraparound(self):
        from zkg.diagnostics import fit_decay

        grid = Grid(3, 64, 64.0)
        u0, _, _ = make_data(DataSpec(family="gaussian", amplitude=1e-3, sigma=1.0), grid)
        fh = to_frequency(u0)
        ts = np.geomspace(1.0, t_wrap(grid, "schrodinger"), 12)
        vals = [lp_norm(to_physical(schrodinger_group(fh, t)), 6) for t in ts]
        slope, _ = fit_decay(ts, vals, (0.99, ts[-1] * 1.01))
        assert abs(slope + 1.0) < 0.1
