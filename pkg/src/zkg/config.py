"""Run configuration: plain-text key = value files with sections.

Every key has a default from the desk-scale configuration, so an empty
config is a valid experiment.  Overrides use dotted section.key paths.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

from .errors import ConfigError

MODES = ("nonlinear", "linear-only", "oracle-check", "identity-check", "data-cert", "decay-fit")

DEFAULTS = {
    "grid": {"dim": "3", "n": "64", "L": "64.0"},
    "params": {"gamma": "1.0", "delta": "auto", "eps0": "1e-2", "n_mon": "8"},
    "data": {
        "family": "gaussian",
        "amplitude": "1e-4",
        "sigma": "4.0",
        "k0": "1,0,0",
        "seed": "0",
        "auto_certify": "true",
    },
    "time": {
        "dt": "1e-2",
        "t_end": "1.0",
        "snapshot_stride": "10",
        "diagnostics_stride": "10",
        "checkpoint_every": "0",
        "energy_drift_tol": "1e-5",
    },
    "output": {"directory": "out", "mode": "nonlinear"},
}


@dataclass
class RunConfig:
    dim: int = 3
    n: int = 64
    L: float = 64.0
    gamma: float = 1.0
    delta: object = "auto"
    eps0: float = 1e-2
    n_mon: int = 8
    family: str = "gaussian"
    amplitude: float = 1e-4
    sigma: float = 4.0
    k0: tuple = (1, 0, 0)
    seed: int = 0
    auto_certify: bool = True
    dt: float = 1e-2
    t_end: float = 1.0
    snapshot_stride: int = 10
    diagnostics_stride: int = 10
    checkpoint_every: int = 0
    energy_drift_tol: float = 1e-5
    directory: str = "out"
    mode: str = "nonlinear"

    def validate(self):
        if self.dim not in (1, 2, 3):
            raise ConfigError(f"grid.dim: must be 1, 2 or 3, got {self.dim}")
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ConfigError(f"grid.n: must be a power of two >= 8, got {self.n}")
        if self.L <= 0:
            raise ConfigError(f"grid.L: must be positive, got {self.L}")
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError(f"params.gamma: must lie in (0, 1], got {self.gamma}")
        if self.delta != "auto":
            try:
                d = float(self.delta)
            except (TypeError, ValueError):
                raise ConfigError(f"params.delta: must be a number or 'auto', got {self.delta!r}")
            if d <= 0:
                raise ConfigError(f"params.delta: must be positive, got {d}")
        if self.eps0 <= 0:
            raise ConfigError(f"params.eps0: must be positive, got {self.eps0}")
        if self.mode not in MODES:
            raise ConfigError(f"output.mode: must be one of {MODES}, got {self.mode!r}")
        if self.dt <= 0:
            raise ConfigError(f"time.dt: must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ConfigError(f"time.t_end: must be nonnegative, got {self.t_end}")
        for name in ("snapshot_stride", "diagnostics_stride", "checkpoint_every"):
            if getattr(self, name) < 0:
                raise ConfigError(f"time.{name}: must be nonnegative")
        if self.energy_drift_tol <= 0:
            raise ConfigError("time.energy_drift_tol: must be positive")
        if self.amplitude < 0:
            raise ConfigError(f"data.amplitude: must be nonnegative, got {self.amplitude}")
        if self.sigma <= 0:
            raise ConfigError(f"data.sigma: must be positive, got {self.sigma}")
        return self


_SECTION_OF = {}
for _sec, _keys in DEFAULTS.items():
    for _k in _keys:
        _SECTION_OF[_k] = _sec


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    try:
        if key in ("dim", "n", "n_mon", "seed", "snapshot_stride", "diagnostics_stride",
                   "checkpoint_every"):
            return int(raw)
        if key in ("L", "gamma", "eps0", "amplitude", "sigma", "dt", "t_end",
                   "energy_drift_tol"):
            return float(raw)
        if key == "delta":
            return "auto" if raw == "auto" else float(raw)
        if key == "k0":
            return tuple(int(p) for p in raw.split(","))
        if key == "auto_certify":
            if raw.lower() in ("true", "yes", "1", "on"):
                return True
            if raw.lower() in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{_SECTION_OF.get(key, '?')}.{key}: cannot parse {raw!r}")


def load_config(path=None, overrides=()) -> RunConfig:
    """Build a RunConfig from defaults, an optional file, and overrides.

    Overrides are "section.key=value" or "key=value" strings (repeatable on
    the command line); unknown keys are rejected with the full key path.
    """
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keys are case-sensitive (L vs l)
    parser.read_dict(DEFAULTS)
    if path is not None:
        read = parser.read(path)
        if not read:
            raise ConfigError(f"config file not found: {path}")
    merged = {}
    for sec in parser.sections():
        if sec not in DEFAULTS:
            raise ConfigError(f"unknown config section [{sec}]")
        for key, raw in parser.items(sec):
            if key not in DEFAULTS[sec]:
                raise ConfigError(f"unknown config key {sec}.{key}")
            merged[key] = _parse_value(key, raw)
    for ov in overrides:
        if "=" not in ov:
            raise ConfigError(f"override must look like key=value, got {ov!r}")
        key, raw = ov.split("=", 1)
        key = key.strip()
        if "." in key:
            sec, key = key.split(".", 1)
            if sec not in DEFAULTS or key not in DEFAULTS[sec]:
                raise ConfigError(f"unknown config key {sec}.{key}")
        elif key not in _SECTION_OF:
            raise ConfigError(f"unknown config key {key}")
        merged[key] = _parse_value(key, raw)
    return RunConfig(**merged).validate()
