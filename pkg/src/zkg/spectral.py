"""Periodic grids, discrete Fourier transforms, and Fourier-multiplier calculus.

Transform convention: the forward transform is the plain DFT (no scaling),
the inverse carries the 1/n^dim factor.  All norms are computed with the
physical quadrature weight (L/n)^dim, so the convention never leaks out:
Parseval reads  sum |v|^2 (L/n)^dim = sum |vhat|^2 (L/n)^dim / n^dim.

Coordinates are box-centered, x in [-L/2, L/2)^dim; the frequency lattice is
k_j = (2*pi/L) m_j with integers m_j in [-n/2, n/2).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as _fft

from .errors import MultiplierError, SpaceTagError, ZeroModeError

PHYSICAL = "physical"
FREQUENCY = "frequency"

# Relative threshold below which a zero mode counts as zero.
ZERO_MODE_RTOL = 1e-12


def _workers() -> int:
    """FFT worker threads, capped by the ZKG_THREADS environment variable."""
    try:
        return max(1, int(os.environ.get("ZKG_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Grid:
    """Cubic periodic box with n points per axis and side length L.

    Precomputes the wavenumber lattice, |k|, |k|^2, box-centered coordinates,
    and the 2/3-rule dealiasing mask.  Instances compare and hash by
    (dim, n, L) only; the cached arrays are derived.
    """

    dim: int
    n: int
    L: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")

        n, L, dim = self.n, float(self.L), self.dim
        object.__setattr__(self, "L", L)
        h = L / n
        k1 = 2.0 * np.pi * np.fft.fftfreq(n, d=h)  # (2*pi/L)*[0..n/2-1, -n/2..-1]
        x1 = h * np.arange(n) - L / 2.0

        kvecs = []
        for ax in range(dim):
            shape = [1] * dim
            shape[ax] = n
            kvecs.append(k1.reshape(shape))
        k2 = sum(kv**2 for kv in kvecs) + np.zeros((n,) * dim)
        kabs = np.sqrt(k2)

        cut = n // 3  # keep |m| <= floor(n/3) per axis (2/3 rule)
        m1 = np.abs(np.fft.fftfreq(n, d=1.0 / n)) <= cut
        mask = np.ones((n,) * dim, dtype=bool)
        for ax in range(dim):
            shape = [1] * dim
            shape[ax] = n
            mask &= m1.reshape(shape)

        object.__setattr__(self, "spacing", h)
        object.__setattr__(self, "shape", (n,) * dim)
        object.__setattr__(self, "k1", k1)
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "kvecs", tuple(kvecs))
        object.__setattr__(self, "k2", k2)
        object.__setattr__(self, "kabs", kabs)
        object.__setattr__(self, "dealias_mask", mask)

    @property
    def k_max(self) -> float:
        """Largest resolved wavenumber per axis, (2*pi/L)(n/2 - 1)."""
        return 2.0 * np.pi / self.L * (self.n / 2 - 1)

    @property
    def cell_volume(self) -> float:
        """Quadrature weight per grid point, (L/n)^dim."""
        return self.spacing**self.dim

    def coords(self, ax: int) -> np.ndarray:
        """Box-centered coordinate x_ax, broadcastable to the grid shape."""
        shape = [1] * self.dim
        shape[ax] = self.n
        return self.x1.reshape(shape)

    def radius_sq(self) -> np.ndarray:
        """|x|^2 on the full grid, box-centered."""
        return sum(self.coords(ax) ** 2 for ax in range(self.dim)) + np.zeros(self.shape)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape, dtype=complex)


@dataclass(frozen=True)
class Field:
    """Complex scalar field sampled on a Grid, tagged physical or frequency.

    Values are treated as immutable: operations return new Field instances
    and never write into an existing array.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)
    space: str = PHYSICAL

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid shape {self.grid.shape}")
        if self.space not in (PHYSICAL, FREQUENCY):
            raise ValueError(f"unknown space tag {self.space!r}")
        object.__setattr__(self, "values", v)

    def is_physical(self) -> bool:
        return self.space == PHYSICAL

    def is_frequency(self) -> bool:
        return self.space == FREQUENCY

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy(), self.space)


def physical_field(grid: Grid, values) -> Field:
    return Field(grid, values, PHYSICAL)


def frequency_field(grid: Grid, values) -> Field:
    return Field(grid, values, FREQUENCY)


def to_frequency(f: Field) -> Field:
    """Forward DFT of a physical-space field."""
    if not f.is_physical():
        raise SpaceTagError("to_frequency expects a physical-space field")
    return Field(f.grid, _fft.fftn(f.values, workers=_workers()), FREQUENCY)


def to_physical(f: Field) -> Field:
    """Inverse DFT of a frequency-space field."""
    if not f.is_frequency():
        raise SpaceTagError("to_physical expects a frequency-space field")
    return Field(f.grid, _fft.ifftn(f.values, workers=_workers()), PHYSICAL)


def as_frequency(f: Field) -> Field:
    return f if f.is_frequency() else to_frequency(f)


def as_physical(f: Field) -> Field:
    return f if f.is_physical() else to_physical(f)


def _origin(grid: Grid):
    return (0,) * grid.dim


def apply_multiplier(f: Field, symbol, zero_mode=None) -> Field:
    """Apply a Fourier multiplier m(k); returns a frequency-space field.

    ``symbol`` is either a callable evaluated on the broadcast wavenumber
    components, symbol(k_1, ..., k_dim), or a precomputed array.  When the
    symbol is singular at k = 0 the caller must supply ``zero_mode`` with the
    value to use there.
    """
    g = as_frequency(f)
    if callable(symbol):
        with np.errstate(all="ignore"):
            m = np.asarray(symbol(*g.grid.kvecs), dtype=complex)
    else:
        m = np.asarray(symbol, dtype=complex)
    m = np.broadcast_to(m, g.grid.shape).copy()
    o = _origin(g.grid)
    if zero_mode is not None:
        m[o] = zero_mode
    if not np.isfinite(m[o]):
        raise MultiplierError("multiplier is singular at k = 0 and no zero-mode value was supplied")
    if not np.all(np.isfinite(m)):
        raise MultiplierError("multiplier is non-finite away from k = 0")
    return Field(g.grid, m * g.values, FREQUENCY)


def zero_mode_magnitude(f: Field) -> float:
    """|vhat(0)| relative to the largest frequency coefficient (0 for the zero field)."""
    g = as_frequency(f)
    scale = np.max(np.abs(g.values))
    if scale == 0.0:
        return 0.0
    return float(np.abs(g.values[_origin(g.grid)]) / scale)


def lambda_pow(f: Field, s: float, force_zero_mode: bool = False) -> Field:
    """Fractional derivative |grad|^s as the multiplier |k|^s.

    The zero mode is annihilated for every s != 0.  Negative powers require a
    zero-mean input unless ``force_zero_mode`` opts into the "set to 0" rule.
    """
    g = as_frequency(f)
    if s == 0:
        return g
    if s < 0 and not force_zero_mode:
        rel = zero_mode_magnitude(g)
        if rel > ZERO_MODE_RTOL:
            raise ZeroModeError(
                f"lambda_pow with s = {s} needs a zero-mean field; "
                f"relative zero-mode magnitude is {rel:.3e}"
            )
    with np.errstate(divide="ignore"):
        m = g.grid.kabs**s
    m = m.copy()
    m[_origin(g.grid)] = 0.0
    return Field(g.grid, m * g.values, FREQUENCY)


def multiply_by_weight(f: Field, power: int, component="radial") -> Field:
    """Multiply pointwise by a box-centered spatial weight.

    power 1 with an integer component gives x_j; power 2 with "radial" gives
    |x|^2.  Any (power, component) combination with power in {1, 2} works.
    """
    if not f.is_physical():
        raise SpaceTagError("multiply_by_weight expects a physical-space field")
    if power not in (1, 2):
        raise ValueError(f"weight power must be 1 or 2, got {power}")
    grid = f.grid
    if component == "radial":
        r2 = grid.radius_sq()
        w = r2 if power == 2 else np.sqrt(r2)
    else:
        ax = int(component)
        if not 0 <= ax < grid.dim:
            raise ValueError(f"axis {component} out of range for dim {grid.dim}")
        w = grid.coords(ax) ** power
    return Field(grid, w * f.values, PHYSICAL)


def lp_norm(f: Field, p) -> float:
    """Discrete L^p norm with quadrature weight (L/n)^dim; max-abs for p = inf."""
    if not f.is_physical():
        raise SpaceTagError("lp_norm expects a physical-space field")
    a = np.abs(f.values)
    if p == math.inf or p == np.inf:
        return float(np.max(a))
    p = float(p)
    if p < 1:
        raise ValueError(f"lp_norm requires p >= 1, got {p}")
    return float((np.sum(a**p) * f.grid.cell_volume) ** (1.0 / p))


def l2_norm(f: Field) -> float:
    """L^2 norm computed in whichever space the field is in (Parseval-consistent)."""
    w = f.grid.cell_volume
    s = float(np.sum(np.abs(f.values) ** 2))
    if f.is_frequency():
        s /= f.grid.n**f.grid.dim
    return math.sqrt(s * w)


def sobolev_norm(f: Field, s: float) -> float:
    """H^s norm via the <k>^s = (1+|k|^2)^(s/2) multiplier."""
    g = as_frequency(f)
    w = (1.0 + g.grid.k2) ** (s / 2.0)
    tot = float(np.sum(w**2 * np.abs(g.values) ** 2))
    return math.sqrt(tot * g.grid.cell_volume / g.grid.n**g.grid.dim)


def dealias(f: Field) -> Field:
    """Zero all modes outside the 2/3-rule mask."""
    g = as_frequency(f)
    return Field(g.grid, np.where(g.grid.dealias_mask, g.values, 0.0), FREQUENCY)


def mean_value(f: Field) -> complex:
    """Mean of the physical samples (= vhat(0)/n^dim)."""
    if f.is_physical():
        return complex(np.mean(f.values))
    return complex(f.values[_origin(f.grid)] / f.grid.n**f.grid.dim)
