"""Exact linear groups for the Schrodinger and half-wave flows.

All groups are unit-modulus Fourier multipliers and therefore preserve every
|k|-weighted L^2 norm to roundoff.  Sign conventions: e^{it*Laplacian} has
symbol e^{-it|k|^2}; the half-wave group for branch b = +-1 evolves by
e^{-i b t |k|} so that the branch profile is recovered with the opposite
phase.  A dedicated one-mode test in the phases module pins the composed
bilinear phase these conventions produce.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import FREQUENCY, Field, as_frequency


@dataclass(frozen=True)
class ProfilePair:
    """Solution at time t in profile form.

    ``fhat`` is the Schrodinger profile (free flow undone), ``gplus_hat`` the
    + branch wave profile.  The - branch is never stored; it is reconstructed
    from the reality reduction in the evolution module.
    """

    fhat: Field
    gplus_hat: Field
    t: float

    def __post_init__(self):
        if not (self.fhat.is_frequency() and self.gplus_hat.is_frequency()):
            raise ValueError("profiles must be frequency-space fields")
        if self.fhat.grid is not self.gplus_hat.grid and self.fhat.grid != self.gplus_hat.grid:
            raise ValueError("profiles must share one grid")

    @property
    def grid(self):
        return self.fhat.grid


def _phase_apply(f: Field, phase: np.ndarray) -> Field:
    g = as_frequency(f)
    return Field(g.grid, np.exp(phase) * g.values, FREQUENCY)


def schrodinger_group(f: Field, t: float) -> Field:
    """Free Schrodinger flow e^{it*Laplacian}: multiply by e^{-it|k|^2}."""
    return _phase_apply(f, -1j * t * as_frequency(f).grid.k2)


def wave_half_group(f: Field, sign: int, t: float) -> Field:
    """Half-wave flow for branch ``sign``: multiply by e^{-i*sign*t|k|}."""
    if sign not in (1, -1):
        raise ValueError(f"branch sign must be +1 or -1, got {sign}")
    return _phase_apply(f, -1j * sign * t * as_frequency(f).grid.kabs)


def schrodinger_profile_of(u_hat: Field, t: float) -> Field:
    """Profile of a Schrodinger variable: undo the free flow (e^{+it|k|^2})."""
    return _phase_apply(u_hat, 1j * t * as_frequency(u_hat).grid.k2)


def schrodinger_physical_of(f_hat: Field, t: float) -> Field:
    """Schrodinger variable from its profile (e^{-it|k|^2})."""
    return _phase_apply(f_hat, -1j * t * as_frequency(f_hat).grid.k2)


def wave_profile_of(w_hat: Field, sign: int, t: float) -> Field:
    """Wave-branch profile from the variable (e^{+i*sign*t|k|})."""
    if sign not in (1, -1):
        raise ValueError(f"branch sign must be +1 or -1, got {sign}")
    return _phase_apply(w_hat, 1j * sign * t * as_frequency(w_hat).grid.kabs)


def wave_physical_of(g_hat: Field, sign: int, t: float) -> Field:
    """Wave-branch variable from its profile (e^{-i*sign*t|k|})."""
    if sign not in (1, -1):
        raise ValueError(f"branch sign must be +1 or -1, got {sign}")
    return _phase_apply(g_hat, -1j * sign * t * as_frequency(g_hat).grid.kabs)


def t_wrap(grid, kind: str) -> float:
    """Wraparound-time estimate L/(2 v_max) ending the valid decay window.

    v_max is 2 k_max for the Schrodinger group (group velocity of the fastest
    resolved mode) and 1 for the half-wave group.
    """
    if kind in ("schrodinger", "schrod-L6", "schrod-Linf"):
        return grid.L / (2.0 * 2.0 * grid.k_max)
    if kind in ("wave", "wave-besov"):
        return grid.L / 2.0
    raise ValueError(f"unknown propagator kind {kind!r}")
