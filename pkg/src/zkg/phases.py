"""Bilinear oscillation phases, their algebraic identities, and brute-force
Duhamel quadrature oracles for tiny grids.

``phase_schrodinger`` and ``phase_wave`` are the oscillatory exponents of the
Fourier-space Duhamel integrands for the Schrodinger and wave profile
equations.  Which branch of each phase couples to which wave branch is not
hard-coded from the printed formulas: the composed conventions (first-order
reduction, half-wave group signs, profile definitions) determine it, and
``pin_phase_convention`` in this module measures it from a one-mode run.
With this package's conventions the g_{+-} input couples to the opposite
phase branch; see ``DUHAMEL_BRANCH_FLIP``.

The oracles evaluate the accumulated bilinear integrals by direct summation
over the frequency lattice (circular convolution without any transform) and
composite Simpson quadrature in time, as an independent check on the
stepper's accumulators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HistoryError
from .spectral import FREQUENCY, Field, Grid

# The wave input g_b couples to phase branch FLIP*b in the Duhamel integrands.
DUHAMEL_BRANCH_FLIP = -1


def _norm(v):
    return np.sqrt(np.sum(np.asarray(v, float) ** 2, axis=-1))


def _dot(a, b):
    return np.sum(np.asarray(a, float) * np.asarray(b, float), axis=-1)


def phase_schrodinger(xi, eta, branch: int):
    """Oscillation phase of the Schrodinger-profile Duhamel integrand:
    2 xi.eta - |eta|^2 + branch |eta|."""
    return 2.0 * _dot(xi, eta) - _norm(eta) ** 2 + branch * _norm(eta)


def phase_schrodinger_alt(xi, eta, branch: int):
    """Equivalent algebraic form |xi|^2 - |xi-eta|^2 + branch |eta|."""
    xi = np.asarray(xi, float)
    eta = np.asarray(eta, float)
    return _norm(xi) ** 2 - _norm(xi - eta) ** 2 + branch * _norm(eta)


def phase_wave(xi, eta, branch: int):
    """Oscillation phase of the wave-profile Duhamel integrand:
    -branch |xi| - |xi|^2 + 2 xi.eta."""
    return -branch * _norm(xi) - _norm(xi) ** 2 + 2.0 * _dot(xi, eta)


def phase_wave_alt(xi, eta, branch: int):
    """Equivalent algebraic form -branch |xi| - |xi-eta|^2 + |eta|^2."""
    xi = np.asarray(xi, float)
    eta = np.asarray(eta, float)
    return -branch * _norm(xi) - _norm(xi - eta) ** 2 + _norm(eta) ** 2


def grad_eta_phase_wave(xi, eta, branch: int):
    """Analytic eta-gradient of the wave phase: 2 xi (eta-independent)."""
    xi, eta = np.broadcast_arrays(np.asarray(xi, float), np.asarray(eta, float))
    return 2.0 * xi


def grad_eta_phase_schrodinger(xi, eta, branch: int):
    """Analytic eta-gradient of the Schrodinger phase: 2 xi - 2 eta + branch eta/|eta|."""
    xi = np.asarray(xi, float)
    eta = np.asarray(eta, float)
    return 2.0 * xi - 2.0 * eta + branch * eta / _norm(eta)[..., None]


def grad_xi_phase_schrodinger(xi, eta, branch: int):
    """Analytic xi-gradient of the Schrodinger phase: 2 eta."""
    xi, eta = np.broadcast_arrays(np.asarray(xi, float), np.asarray(eta, float))
    return 2.0 * eta


@dataclass(frozen=True)
class IdentityReport:
    name: str
    samples: int
    max_residual: float
    tolerance: float
    details: dict

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        lines = [
            f"{self.name}: {status}  max residual {self.max_residual:.3e} "
            f"(tolerance {self.tolerance:.1e}, {self.samples} samples)"
        ]
        for key, val in self.details.items():
            lines.append(f"  {key}: {val}")
        return "\n".join(lines)


def _sample_vectors(count, seed, min_norm=0.0):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((count, 3))
    if min_norm > 0.0:
        small = _norm(v) < min_norm
        while np.any(small):
            v[small] = rng.standard_normal((int(np.sum(small)), 3))
            small = _norm(v) < min_norm
    return v


def check_wave_null_identity(samples: int = 10**6, seed: int = 7) -> IdentityReport:
    """Verify |xi| = (1/2)(xi/|xi|) . grad_eta(wave phase) at random points.

    The gradient is evaluated analytically; the identity is exact and
    eta-independent, so the residual is pure floating-point noise.
    """
    xi = _sample_vectors(samples, seed, min_norm=1e-6)
    eta = _sample_vectors(samples, seed + 1)
    worst = 0.0
    for branch in (1, -1):
        grad = grad_eta_phase_wave(xi, eta, branch)
        lhs = _norm(xi)
        rhs = 0.5 * _dot(xi / lhs[:, None], grad)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return IdentityReport(
        name="wave null identity",
        samples=samples,
        max_residual=worst,
        tolerance=1e-13,
        details={"branches": "+1, -1", "gradient": "analytic (2 xi)"},
    )


def check_schrodinger_scaling_identity(samples: int = 10**6, seed: int = 11) -> IdentityReport:
    """Determine the sign pattern relating grad_xi and grad_eta of the
    Schrodinger phase.

    Searches (s1, s2) in {+-1}^2 for which
        grad_xi phase = s1 * 2 ehat (ehat . grad_eta phase) + s2 * 2 (phase/|eta|) ehat
    holds identically (ehat = eta/|eta|), asserts the residual at every
    sample, and reports the scalar relation
        ehat . grad_eta phase - phase/|eta| = -|eta|
    which underlies it.  Direct computation gives grad_xi phase = +2 eta.
    """
    xi = _sample_vectors(samples, seed)
    eta = _sample_vectors(samples, seed + 1, min_norm=1e-6)
    abs_eta = _norm(eta)
    ehat = eta / abs_eta[:, None]

    best = None
    scalar_worst = 0.0
    for branch in (1, -1):
        ph = phase_schrodinger(xi, eta, branch)
        grad_eta = grad_eta_phase_schrodinger(xi, eta, branch)
        grad_xi = grad_xi_phase_schrodinger(xi, eta, branch)
        radial = _dot(ehat, grad_eta)
        scalar_worst = max(
            scalar_worst, float(np.max(np.abs(radial - ph / abs_eta + abs_eta)))
        )
        fits = {}
        for s1 in (1, -1):
            for s2 in (1, -1):
                rhs = (s1 * 2.0 * radial + s2 * 2.0 * ph / abs_eta)[:, None] * ehat
                fits[(s1, s2)] = float(np.max(np.abs(grad_xi - rhs)))
        pattern = min(fits, key=fits.get)
        if fits[pattern] > 1e-12:
            raise AssertionError(
                f"no sign pattern reproduces grad_xi phase (best {fits[pattern]:.3e}); "
                "this indicates an implementation bug"
            )
        if best is None:
            best = (pattern, fits[pattern])
        elif best[0] != pattern:
            raise AssertionError("branches disagree on the sign pattern")
        else:
            best = (pattern, max(best[1], fits[pattern]))

    pattern, residual = best
    return IdentityReport(
        name="schrodinger pseudo-scaling identity",
        samples=samples,
        max_residual=max(residual, scalar_worst),
        tolerance=1e-12,
        details={
            "sign_pattern": pattern,
            "grad_xi_phase": "+2 eta (determined numerically)",
            "scalar_relation_residual": f"{scalar_worst:.3e}",
        },
    )


def _reflect(a: np.ndarray) -> np.ndarray:
    """A[(-i) mod n] along every axis."""
    out = a
    for ax in range(a.ndim):
        idx = (-np.arange(a.shape[ax])) % a.shape[ax]
        out = np.take(out, idx, axis=ax)
    return out


def _circular_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Direct (transform-free) circular convolution sum over the lattice."""
    n = a.shape[0]
    dim = a.ndim
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    if dim == 1:
        return np.einsum("ij,j->i", a[idx], b)
    if dim == 2:
        big = a[idx[:, None, :, None], idx[None, :, None, :]]
        return np.einsum("abcd,cd->ab", big, b)
    if dim == 3:
        big = a[
            idx[:, None, None, :, None, None],
            idx[None, :, None, None, :, None],
            idx[None, None, :, None, None, :],
        ]
        return np.einsum("abcdef,def->abc", big, b)
    raise ValueError("unsupported dimension")


def _simpson_weights(m: int, dt: float) -> np.ndarray:
    if m % 2 != 0:
        raise HistoryError(f"composite Simpson needs an even interval count, got {m}")
    w = np.ones(m + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * dt / 3.0


def _check_history(times, count):
    times = np.asarray(times, float)
    if times.ndim != 1 or len(times) != count:
        raise HistoryError("history and time arrays must align")
    if len(times) < 3:
        raise HistoryError("need at least three history samples")
    dts = np.diff(times)
    if np.max(np.abs(dts - dts[0])) > 1e-12 * max(1.0, np.max(np.abs(times))):
        raise HistoryError("history times must be uniformly spaced")
    return times, float(dts[0])


def _check_oracle_grid(grid: Grid):
    if grid.n > 16:
        raise ValueError("duhamel oracle is restricted to grids with n <= 16 per axis")


def duhamel_oracle_wave(f_history, times, branch: int, grid: Grid, gamma: float) -> Field:
    """Accumulated wave Duhamel integral by direct quadrature.

    ``f_history[j]`` is the Schrodinger-profile coefficient array at
    ``times[j]`` (uniform stride, even interval count).  For each time node
    the bilinear kernel is evaluated as a transform-free circular convolution
    of the reconstructed variables, multiplied by |k|^gamma and the branch
    group phase, then integrated with composite Simpson.  The stepper's
    G accumulator satisfies ghat_b(t) = ghat_b(0) - i * (this integral).
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    _check_oracle_grid(grid)
    times, dt = _check_history(times, len(f_history))
    w = _simpson_weights(len(times) - 1, dt)
    npts = grid.n**grid.dim
    acc = np.zeros(grid.shape, dtype=complex)
    kgamma = grid.kabs**gamma
    kgamma[(0,) * grid.dim] = 0.0
    for j, s in enumerate(times):
        fhat = np.asarray(f_history[j], dtype=complex)
        uhat = np.exp(-1j * s * grid.k2) * fhat
        ubar_hat = np.conj(_reflect(uhat))  # transform of conj(u)
        conv = _circular_convolve(uhat, ubar_hat) / npts
        acc += w[j] * np.exp(1j * branch * s * grid.kabs) * kgamma * conv
    acc = np.where(grid.dealias_mask, acc, 0.0)
    return Field(grid, acc, FREQUENCY)


def duhamel_oracle_schrodinger(
    f_history, g_history, times, branch: int, grid: Grid
) -> Field:
    """Accumulated Schrodinger Duhamel integral (one wave branch) by direct
    quadrature.

    ``g_history`` holds the + branch wave profile; the - branch input is
    reconstructed through the reality reduction.  The stepper satisfies
    fhat(t) - fhat(0) = -i (F_+ - F_-) with F_b this integral.
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    _check_oracle_grid(grid)
    if len(f_history) != len(g_history):
        raise HistoryError("f and g histories must have equal length")
    times, dt = _check_history(times, len(f_history))
    w = _simpson_weights(len(times) - 1, dt)
    npts = grid.n**grid.dim
    acc = np.zeros(grid.shape, dtype=complex)
    for j, s in enumerate(times):
        fhat = np.asarray(f_history[j], dtype=complex)
        gphat = np.asarray(g_history[j], dtype=complex)
        uhat = np.exp(-1j * s * grid.k2) * fhat
        wplus_hat = np.exp(-1j * s * grid.kabs) * gphat
        if branch == 1:
            wb_hat = wplus_hat
        else:
            wb_hat = -np.conj(_reflect(wplus_hat))
        conv = _circular_convolve(uhat, wb_hat) / npts
        acc += w[j] * 0.5 * np.exp(1j * s * grid.k2) * conv
    acc = np.where(grid.dealias_mask, acc, 0.0)
    return Field(grid, acc, FREQUENCY)
