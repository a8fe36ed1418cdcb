"""Cross-check of the stepper's Duhamel accumulators against the direct
quadrature oracles on a tiny grid.

The stepper accumulates the bilinear integrals through FFT products and RK4
stages; the oracle recomputes them from the stored profile history by
transform-free lattice convolution and Simpson quadrature.  Agreement ties
every sign and normalization convention together.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evolution import Params, initial_state, step_ifrk4
from .initial_data import choose_parameters
from .phases import duhamel_oracle_schrodinger, duhamel_oracle_wave
from .spectral import Grid, dealias, frequency_field, physical_field, to_frequency


@dataclass(frozen=True)
class OracleReport:
    grid_shape: tuple
    dt: float
    t_end: float
    rel_err_G: float
    rel_err_Fplus: float
    rel_err_Fminus: float
    tolerance: float = 1e-5

    @property
    def passed(self) -> bool:
        return max(self.rel_err_G, self.rel_err_Fplus, self.rel_err_Fminus) <= self.tolerance

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return (
            f"oracle comparison on {self.grid_shape} (dt={self.dt:g}, T={self.t_end:g}): "
            f"{status}\n"
            f"  rel L2 error G_+ : {self.rel_err_G:.3e}\n"
            f"  rel L2 error F_+ : {self.rel_err_Fplus:.3e}\n"
            f"  rel L2 error F_- : {self.rel_err_Fminus:.3e}\n"
            f"  tolerance        : {self.tolerance:.1e}"
        )


def _tiny_initial_state(grid: Grid, seed: int = 3, amplitude: float = 5e-2):
    rng = np.random.default_rng(seed)

    def band_limited(complex_field):
        w = rng.standard_normal(grid.shape)
        if complex_field:
            w = w + 1j * rng.standard_normal(grid.shape)
        vhat = to_frequency(physical_field(grid, w))
        return dealias(vhat).values

    fhat = amplitude * band_limited(True)
    ghat = amplitude * band_limited(True)
    ghat[(0,) * grid.dim] = 0.0  # wave profile carries no mean
    return initial_state(
        frequency_field(grid, fhat), frequency_field(grid, ghat), 0.0
    )


def oracle_comparison(
    n: int = 8, dim: int = 2, L: float = 8.0, dt: float = 1.0 / 64.0, t_end: float = 1.0,
    params: Params | None = None, seed: int = 3,
) -> OracleReport:
    """Run the tiny-grid comparison and report relative L2 discrepancies."""
    grid = Grid(dim=dim, n=n, L=L)
    params = params or choose_parameters(1.0)
    state = _tiny_initial_state(grid, seed=seed)

    steps = int(round(t_end / dt))
    times = [0.0]
    f_hist = [state.fhat.values]
    g_hist = [state.gplus_hat.values]
    for _ in range(steps):
        state = step_ifrk4(state, dt, params)
        times.append(state.t)
        f_hist.append(state.fhat.values)
        g_hist.append(state.gplus_hat.values)

    G_oracle = duhamel_oracle_wave(f_hist, times, 1, grid, params.gamma)
    Fp_oracle = duhamel_oracle_schrodinger(f_hist, g_hist, times, 1, grid)
    Fm_oracle = duhamel_oracle_schrodinger(f_hist, g_hist, times, -1, grid)

    def rel(a, b):
        scale = np.linalg.norm(b.reshape(-1))
        return float(np.linalg.norm((a - b).reshape(-1)) / scale) if scale > 0 else 0.0

    return OracleReport(
        grid_shape=grid.shape,
        dt=dt,
        t_end=t_end,
        rel_err_G=rel(state.Gplus_hat.values, G_oracle.values),
        rel_err_Fplus=rel(state.Fplus_hat.values, Fp_oracle.values),
        rel_err_Fminus=rel(state.Fminus_hat.values, Fm_oracle.values),
    )
