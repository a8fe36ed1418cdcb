"""Exception types shared across the package."""


class SpaceTagError(ValueError):
    """A field was passed in the wrong representation (physical vs frequency)."""


class ZeroModeError(ValueError):
    """An operation requiring a zero-mean field met a nonzero zero mode."""


class MultiplierError(ValueError):
    """A Fourier multiplier is singular or non-finite on the lattice."""


class ShellRangeError(ValueError):
    """A dyadic shell index outside the grid's resolvable range."""


class HistoryError(ValueError):
    """A time history incompatible with the quadrature rule."""


class BlowUpError(RuntimeError):
    """Non-finite values appeared during time integration."""

    def __init__(self, t, message=None):
        self.t = t
        super().__init__(message or f"non-finite state detected at t = {t:.6g}")


class EnergyDriftError(RuntimeError):
    """Energy drift exceeded its threshold even after the dt retry."""


class ConfigError(ValueError):
    """Invalid run configuration; message names the offending field."""


class CheckpointFormatError(IOError):
    """Checkpoint file malformed; message names expected vs found."""
