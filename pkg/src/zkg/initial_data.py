"""Initial-data construction, parameter selection, and data certification.

Data families are smooth, centered, and band-limited by construction (every
constructed field passes through the 2/3-rule mask); the wave fields carry an
exactly zeroed mean mode.  Certification evaluates the smallness conditions
on the data with the monitored Sobolev index N_mon in place of the analysis
index N_proof, and reports both so the gap stays explicit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .besov import besov_norm
from .evolution import Params
from .spectral import (
    Field,
    Grid,
    apply_multiplier,
    as_frequency,
    dealias,
    frequency_field,
    lambda_pow,
    multiply_by_weight,
    physical_field,
    sobolev_norm,
    to_frequency,
    to_physical,
)

FAMILIES = ("gaussian", "modulated", "random")

# Desk-scale defaults: wave wraparound near L/2 leaves a usable decay window.
DEFAULT_GRID = dict(dim=3, n=64, L=64.0)
DEFAULT_SIGMA = 4.0
DEFAULT_EPS0 = 1e-2


@dataclass(frozen=True)
class DataSpec:
    """Recipe for one initial-data triple (u0, n0, n1)."""

    family: str = "gaussian"
    amplitude: float = 1e-4
    sigma: float = DEFAULT_SIGMA
    k0: tuple = (1, 0, 0)  # lattice mode numbers for the modulated family
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.amplitude < 0:
            raise ValueError("amplitude must be nonnegative")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


def choose_parameters(gamma: float, delta="auto", eps0: float = DEFAULT_EPS0,
                      n_mon: int = 8) -> Params:
    """Admissible (delta, alpha, N_proof) for a given gamma.

    alpha is the largest admissible value min(gamma/2, 1/6) - 10*delta.  With
    delta="auto" a delta well inside the admissible range is chosen; an
    explicit delta that leaves no room for alpha raises with the maximal
    admissible value.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    cap = min(gamma / 2.0, 1.0 / 6.0)
    if delta == "auto":
        delta = cap / 26.0
    delta = float(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    alpha = cap - 10.0 * delta
    if not 3.0 * delta < alpha:
        raise ValueError(
            f"delta = {delta:g} is too large for gamma = {gamma:g}: "
            f"need delta < {cap / 13.0:g}"
        )
    n_proof = math.ceil(5.0 / delta)
    return Params(gamma=gamma, delta=delta, alpha=alpha, N_proof=n_proof,
                  N_mon=n_mon, eps0=eps0)


def _zero_mean_real(grid: Grid, values: np.ndarray) -> Field:
    """Real field, band-limited, with the mean mode exactly zeroed."""
    vhat = to_frequency(physical_field(grid, values)).values
    vhat = np.where(grid.dealias_mask, vhat, 0.0)
    vhat[(0,) * grid.dim] = 0.0
    out = to_physical(frequency_field(grid, vhat))
    return physical_field(grid, out.values.real)


def _gaussian(grid: Grid, sigma: float) -> np.ndarray:
    return np.exp(-grid.radius_sq() / (2.0 * sigma**2))


def _snap_to_lattice(grid: Grid, k0) -> np.ndarray:
    modes = np.array(k0[: grid.dim], dtype=int)
    return 2.0 * np.pi / grid.L * modes


def make_data(spec: DataSpec, grid: Grid):
    """Build (u0, n0, n1) physical fields for one data recipe.

    The gaussian and modulated families use a width-sigma bump for both
    components and a zero wave velocity; the random family draws band-limited
    noise (bit-reproducible for a fixed seed).
    """
    if spec.sigma > grid.L / 8.0:
        raise ValueError(f"sigma = {spec.sigma:g} exceeds L/8 = {grid.L / 8.0:g}")
    eps = spec.amplitude
    if spec.family in ("gaussian", "modulated"):
        bump = _gaussian(grid, spec.sigma)
        if spec.family == "modulated":
            k0 = _snap_to_lattice(grid, spec.k0)
            phase = sum(k0[ax] * grid.coords(ax) for ax in range(grid.dim))
            u_raw = bump * np.exp(1j * phase)
        else:
            u_raw = bump.astype(complex)
        u_hat = to_frequency(physical_field(grid, eps * u_raw))
        u0 = to_physical(dealias(u_hat))
        n0 = _zero_mean_real(grid, eps * bump)
        n1 = physical_field(grid, np.zeros(grid.shape))
        return u0, n0, n1

    rng = np.random.default_rng(spec.seed)
    # envelope keeps the noise smooth on the scale sigma
    envelope = np.exp(-grid.k2 * spec.sigma**2 / 2.0)

    def band_noise(complex_field: bool) -> np.ndarray:
        white = rng.standard_normal(grid.shape)
        if complex_field:
            white = white + 1j * rng.standard_normal(grid.shape)
        vhat = to_frequency(physical_field(grid, white)).values
        vhat *= envelope
        vhat = np.where(grid.dealias_mask, vhat, 0.0)
        return to_physical(frequency_field(grid, vhat)).values

    u_raw = band_noise(complex_field=True)
    scale = max(float(np.max(np.abs(u_raw))), 1e-300)
    u0 = physical_field(grid, eps * u_raw / scale)
    n0 = _zero_mean_real(grid, eps * band_noise(complex_field=False).real / scale)
    n1 = _zero_mean_real(grid, eps * band_noise(complex_field=False).real / scale)
    return u0, n0, n1


@dataclass(frozen=True)
class CertReport:
    """Per-term certification results against the smallness budget eps0."""

    eps0: float
    n_mon: int
    n_proof: int
    terms: dict  # name -> value
    budgets: dict  # budget name -> (value, passed)
    zero_mean_ok: bool

    @property
    def passed(self) -> bool:
        return self.zero_mean_ok and all(ok for _, ok in self.budgets.values())

    @property
    def failing_terms(self):
        return [name for name, (_, ok) in self.budgets.items() if not ok]

    def __str__(self):
        lines = [
            f"data certification (eps0 = {self.eps0:g}, "
            f"N_mon = {self.n_mon}, N_proof = {self.n_proof})"
        ]
        for name, value in self.terms.items():
            lines.append(f"  {name:28s} = {value:.6e}")
        for name, (value, ok) in self.budgets.items():
            lines.append(f"  {name:28s} = {value:.6e}  [{'pass' if ok else 'FAIL'}]")
        lines.append(f"  zero-mean wave data           [{'pass' if self.zero_mean_ok else 'FAIL'}]")
        lines.append(f"  overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _pair_norm(a: float, b: float) -> float:
    return math.hypot(a, b)


def certify_data(u0: Field, n0: Field, n1: Field, params: Params) -> CertReport:
    """Evaluate the data smallness conditions with N_mon in place of N_proof.

    The Schrodinger budget is ||u0||_{H^{N_mon+1}} + ||<x>^2 u0||_{L^2}; the
    wave budget combines the Sobolev norm of (Lambda n0, n1), the <Lambda>-
    weighted B^0_{1,1} norm of the same pair, and the <x>^2-weighted H^1
    norm of (n0, n1).  Pairs are combined in quadrature.  Failures are
    report entries, not errors.
    """
    grid = u0.grid
    nm = params.N_mon

    u_sob = sobolev_norm(u0, nm + 1)
    xw = 1.0 + grid.radius_sq()
    u_weighted = float(
        np.sqrt(np.sum(np.abs(xw * u0.values) ** 2) * grid.cell_volume)
    )

    lam_n0 = lambda_pow(n0, 1.0)
    wave_sob = _pair_norm(sobolev_norm(lam_n0, nm - 1), sobolev_norm(n1, nm - 1))

    bracket = lambda f: apply_multiplier(f, lambda *ks: np.sqrt(1.0 + sum(k**2 for k in ks)))
    b_n0 = besov_norm(bracket(lam_n0), 0.0, 1, 1)
    n1_scale = float(np.max(np.abs(as_frequency(n1).values)))
    b_n1 = besov_norm(bracket(n1), 0.0, 1, 1) if n1_scale > 0 else 0.0
    wave_besov = _pair_norm(b_n0, b_n1)

    def weighted_h1(f: Field) -> float:
        w = physical_field(grid, xw * f.values)
        return sobolev_norm(w, 1.0)

    wave_weighted = _pair_norm(weighted_h1(n0), weighted_h1(n1))

    def mean_ok(f: Field) -> bool:
        scale = float(np.max(np.abs(f.values)))
        return scale == 0.0 or abs(np.mean(f.values)) <= 1e-12 * scale

    terms = {
        "u_sobolev(H^{N_mon+1})": u_sob,
        "u_weighted(<x>^2, L^2)": u_weighted,
        "wave_sobolev(H^{N_mon-1})": wave_sob,
        "wave_besov(<L>B^0_{1,1})": wave_besov,
        "wave_weighted(<x>^2, H^1)": wave_weighted,
    }
    budgets = {
        "schrodinger_budget": (u_sob + u_weighted, u_sob + u_weighted <= params.eps0),
        "wave_budget": (
            wave_sob + wave_besov + wave_weighted,
            wave_sob + wave_besov + wave_weighted <= params.eps0,
        ),
    }
    return CertReport(
        eps0=params.eps0,
        n_mon=params.N_mon,
        n_proof=params.N_proof,
        terms=terms,
        budgets=budgets,
        zero_mean_ok=mean_ok(n0) and mean_ok(n1),
    )


def certified_spec(spec: DataSpec, grid: Grid, params: Params, margin: float = 0.9) -> DataSpec:
    """Rescale a data recipe so certification passes with the given margin.

    All certification norms are homogeneous of degree one in the amplitude,
    so a single rescaling is exact.
    """
    u0, n0, n1 = make_data(spec, grid)
    report = certify_data(u0, n0, n1, params)
    worst = max(value / params.eps0 for value, _ in report.budgets.values())
    if worst == 0.0:
        return spec
    return replace(spec, amplitude=spec.amplitude * margin / worst)
