"""Parameter selection, data families, and certification."""

import math

import numpy as np
import pytest

from zkg.initial_data import (
    DataSpec,
    certified_spec,
    certify_data,
    choose_parameters,
    make_data,
)
from zkg.spectral import Grid, lp_norm, mean_value, to_frequency


class TestChooseParameters:
    def test_reference_point(self):
        # gamma = 1, delta = 0.01: alpha = 1/6 - 0.1, N = 500
        p = choose_parameters(1.0, 0.01)
        assert np.isclose(p.alpha, 1.0 / 6.0 - 0.1)
        assert p.N_proof == 500
        assert 5.0 / p.N_proof <= p.delta

    def test_alpha_approaches_sixth_for_large_gamma(self):
        # for gamma >= 1/2 and vanishing delta, alpha tends to 1/6
        p = choose_parameters(0.75, 1e-6)
        assert abs(p.alpha - 1.0 / 6.0) < 1e-4

    def test_small_gamma_point(self):
        p = choose_parameters(0.2, 0.005)
        assert np.isclose(p.alpha, 0.05)
        assert 3 * p.delta < p.alpha

    def test_auto_delta_always_admissible(self):
        for gamma in (0.05, 0.2, 0.5, 1.0):
            p = choose_parameters(gamma)
            cap = min(gamma / 2, 1 / 6)
            assert 3 * p.delta < p.alpha <= cap - 10 * p.delta + 1e-15

    def test_oversized_delta_reports_max(self):
        with pytest.raises(ValueError) as err:
            choose_parameters(0.2, 0.02)
        assert "delta <" in str(err.value)

    def test_bad_gamma(self):
        for gamma in (0.0, -0.5, 1.5):
            with pytest.raises(ValueError):
                choose_parameters(gamma)


class TestMakeData:
    def test_zero_amplitude_gives_zero_fields(self, grid3d):
        u0, n0, n1 = make_data(DataSpec(family="gaussian", amplitude=0.0, sigma=1.5), grid3d)
        assert lp_norm(u0, 2) == 0.0 and lp_norm(n0, 2) == 0.0 and lp_norm(n1, 2) == 0.0

    def test_gaussian_l2_closed_form(self):
        grid = Grid(3, 32, 32.0)
        eps, sigma = 1e-3, 2.0
        u0, _, _ = make_data(DataSpec(family="gaussian", amplitude=eps, sigma=sigma), grid)
        expected = eps * (math.pi * sigma**2) ** 0.75
        assert abs(lp_norm(u0, 2) - expected) <= 0.01 * expected

    def test_wave_data_real_and_zero_mean(self, grid3d):
        for family in ("gaussian", "modulated", "random"):
            _, n0, n1 = make_data(DataSpec(family=family, amplitude=1e-2, sigma=1.5, seed=4),
                                  grid3d)
            for f in (n0, n1):
                assert np.max(np.abs(f.values.imag)) == 0.0
                assert abs(mean_value(f)) <= 1e-15 * max(np.max(np.abs(f.values)), 1e-300)

    def test_band_limited_by_construction(self, grid3d):
        for family in ("gaussian", "random"):
            u0, n0, _ = make_data(DataSpec(family=family, amplitude=1e-2, sigma=1.5, seed=4),
                                  grid3d)
            for f in (u0, n0):
                vh = to_frequency(f).values
                assert np.max(np.abs(vh[~grid3d.dealias_mask])) <= 1e-12 * np.max(np.abs(vh))

    def test_modulated_carrier(self, grid3d):
        spec = DataSpec(family="modulated", amplitude=1e-2, sigma=1.5, k0=(2, 1, 0))
        u0, _, _ = make_data(spec, grid3d)
        vh = np.abs(to_frequency(u0).values)
        peak = np.unravel_index(np.argmax(vh), vh.shape)
        assert peak == (2, 1, 0)

    def test_random_reproducible(self, grid3d):
        a = make_data(DataSpec(family="random", amplitude=1e-2, sigma=1.5, seed=11), grid3d)
        b = make_data(DataSpec(family="random", amplitude=1e-2, sigma=1.5, seed=11), grid3d)
        for x, y in zip(a, b):
            assert np.array_equal(x.values, y.values)
        c = make_data(DataSpec(family="random", amplitude=1e-2, sigma=1.5, seed=12), grid3d)
        assert not np.array_equal(a[0].values, c[0].values)

    def test_sigma_localization_guard(self, grid3d):
        with pytest.raises(ValueError):
            make_data(DataSpec(family="gaussian", amplitude=1e-2, sigma=3.0), grid3d)

    def test_unknown_family_rejected(self):
        with pytest.raises(ValueError):
            DataSpec(family="soliton")


class TestCertification:
    def test_zero_data_passes(self, grid3d):
        params = choose_parameters(1.0)
        u0, n0, n1 = make_data(DataSpec(family="gaussian", amplitude=0.0, sigma=1.5), grid3d)
        rep = certify_data(u0, n0, n1, params)
        assert rep.passed
        assert all(v == 0.0 for v in rep.terms.values())

    def test_large_amplitude_fails_and_names_terms(self, grid3d):
        params = choose_parameters(1.0)
        u0, n0, n1 = make_data(DataSpec(family="gaussian", amplitude=10.0, sigma=1.5), grid3d)
        rep = certify_data(u0, n0, n1, params)
        assert not rep.passed
        assert rep.failing_terms
        assert "FAIL" in str(rep)

    def test_monotone_in_amplitude(self, grid3d):
        params = choose_parameters(1.0)
        spec = certified_spec(DataSpec(family="gaussian", amplitude=1.0, sigma=1.5),
                              grid3d, params)
        passing = make_data(spec, grid3d)
        assert certify_data(*passing, params).passed
        smaller = make_data(DataSpec(family="gaussian", amplitude=spec.amplitude / 2,
                                     sigma=1.5), grid3d)
        assert certify_data(*smaller, params).passed

    def test_report_records_both_sobolev_indices(self, grid3d):
        params = choose_parameters(1.0)
        u0, n0, n1 = make_data(DataSpec(family="gaussian", amplitude=1e-4, sigma=1.5), grid3d)
        rep = certify_data(u0, n0, n1, params)
        assert rep.n_mon == params.N_mon
        assert rep.n_proof == params.N_proof
        assert str(rep.n_proof) in str(rep)

    def test_certified_spec_margin(self, grid3d):
        params = choose_parameters(1.0)
        spec = certified_spec(DataSpec(family="gaussian", amplitude=123.0, sigma=1.5),
                              grid3d, params, margin=0.9)
        rep = certify_data(*make_data(spec, grid3d), params)
        assert rep.passed
        worst = max(v / params.eps0 for v, _ in rep.budgets.values())
        assert 0.85 <= worst <= 0.95

    def test_wave_decay_of_certified_data(self):
        # certified data obeys the linear wave sup decay in Besov form
        from zkg.besov import besov_norm
        from zkg.diagnostics import fit_decay
        from zkg.evolution import reduce_to_first_order
        from zkg.propagators import wave_half_group

        grid = Grid(3, 64, 64.0)
        params = choose_parameters(1.0)
        spec = certified_spec(DataSpec(family="gaussian", amplitude=1.0, sigma=2.0),
                              grid, params)
        u0, n0, n1 = make_data(spec, grid)
        assert certify_data(u0, n0, n1, params).passed
        g0 = reduce_to_first_order(n0, n1)
        ts = np.geomspace(1.0, 30.0, 16)
        vals = [besov_norm(wave_half_group(g0, 1, t), 0.0, math.inf, 1) for t in ts]
        slope, _ = fit_decay(ts, vals, (0.99, 30.1))
        assert abs(slope + 1.0) <= 0.15
