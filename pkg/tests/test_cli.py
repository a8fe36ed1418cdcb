"""Configuration, checkpoints, CSV persistence, and the CLI surface."""

import os
import subprocess
import sys

import numpy as np
import pytest

from zkg.checkpoint import (
    emit_timeseries,
    format_float,
    read_checkpoint,
    read_timeseries,
    write_checkpoint,
)
from zkg.config import load_config
from zkg.diagnostics import make_record
from zkg.errors import CheckpointFormatError, ConfigError
from zkg.evolution import initial_state, step_ifrk4
from zkg.initial_data import choose_parameters
from zkg.oracle_check import _tiny_initial_state
from zkg.spectral import Grid, frequency_field


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "zkg.cli", *args], capture_output=True, text=True
    )


SMALL = [
    "--override", "grid.dim=2", "--override", "grid.n=16", "--override", "grid.L=16",
    "--override", "data.sigma=1.5",
]


class TestConfig:
    def test_defaults(self):
        cfg = load_config()
        assert cfg.dim == 3 and cfg.n == 64 and cfg.L == 64.0
        assert cfg.gamma == 1.0 and cfg.delta == "auto"
        assert cfg.mode == "nonlinear"

    def test_file_and_overrides(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("[grid]\nn = 32\n[time]\ndt = 0.005\n")
        cfg = load_config(str(path), overrides=["grid.dim=2", "t_end=2.0"])
        assert cfg.n == 32 and cfg.dim == 2
        assert cfg.dt == 0.005 and cfg.t_end == 2.0

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            load_config(overrides=["grid.resolution=9"])

    def test_bad_value_names_field(self):
        with pytest.raises(ConfigError) as err:
            load_config(overrides=["time.dt=brisk"])
        assert "dt" in str(err.value)

    def test_validation(self):
        with pytest.raises(ConfigError):
            load_config(overrides=["grid.n=17"]).validate()
        with pytest.raises(ConfigError):
            load_config(overrides=["output.mode=interactive"])

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            load_config("/nonexistent/path.cfg")


class TestCheckpoint:
    def _state(self):
        s = _tiny_initial_state(Grid(2, 16, 16.0), seed=3, amplitude=0.2)
        params = choose_parameters(1.0)
        for _ in range(7):
            s = step_ifrk4(s, 0.01, params)
        return s

    def test_roundtrip_bit_exact(self, tmp_path):
        s = self._state()
        p1 = tmp_path / "a.zkg"
        p2 = tmp_path / "b.zkg"
        write_checkpoint(s, p1, 1.0)
        back, gamma = read_checkpoint(p1)
        assert gamma == 1.0
        assert back.t == s.t and back.step_count == s.step_count
        for name in ("fhat", "gplus_hat", "Fplus_hat", "Fminus_hat", "Gplus_hat"):
            assert np.array_equal(getattr(back, name).values, getattr(s, name).values)
        write_checkpoint(back, p2, gamma)
        assert p1.read_bytes() == p2.read_bytes()

    def test_truncated_file_names_mismatch(self, tmp_path):
        s = self._state()
        p = tmp_path / "c.zkg"
        write_checkpoint(s, p, 1.0)
        data = p.read_bytes()
        p.write_bytes(data[: len(data) // 2])
        with pytest.raises(CheckpointFormatError) as err:
            read_checkpoint(p)
        assert "expected" in str(err.value) and "found" in str(err.value)

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "d.zkg"
        p.write_bytes(b"NOPE" + b"\x00" * 100)
        with pytest.raises(CheckpointFormatError) as err:
            read_checkpoint(p)
        assert "magic" in str(err.value)

    def test_zero_state_roundtrip(self, tmp_path):
        grid = Grid(2, 16, 16.0)
        z = frequency_field(grid, grid.zeros())
        s = initial_state(z, z, 0.0)
        p = tmp_path / "z.zkg"
        write_checkpoint(s, p, 0.5)
        back, _ = read_checkpoint(p)
        assert np.all(back.fhat.values == 0)


class TestTimeseries:
    def _records(self, count):
        grid = Grid(2, 16, 16.0)
        params = choose_parameters(1.0)
        s = _tiny_initial_state(grid, seed=3, amplitude=0.2)
        recs = [make_record(s, params)]
        prev = s.fhat
        for _ in range(count - 1):
            for _ in range(3):
                s = step_ifrk4(s, 0.01, params)
            recs.append(make_record(s, params, prev))
            prev = s.fhat
        return recs

    def test_header_only_for_zero_records(self, tmp_path):
        p = tmp_path / "t.csv"
        emit_timeseries([], p)
        lines = p.read_text().strip().splitlines()
        assert len(lines) == 1 and lines[0].startswith("t,")

    def test_row_count_and_roundtrip(self, tmp_path):
        recs = self._records(4)
        p = tmp_path / "t.csv"
        emit_timeseries(recs[:2], p)
        emit_timeseries(recs[2:], p)  # append without duplicate header
        back = read_timeseries(p)
        assert len(back) == 4
        for a, b in zip(recs, back):
            assert a.csv_row() == pytest.approx(b.csv_row(), abs=0.0)  # exact

    def test_format_float_roundtrips(self):
        for x in (1.0 / 3.0, 1e-300, 123456.789, 0.1 + 0.2):
            assert float(format_float(x)) == x


class TestCliSurface:
    def test_identities_exit_zero(self):
        res = run_cli("identities")
        assert res.returncode == 0
        assert "sign_pattern" in res.stdout

    def test_run_t_end_zero_single_row(self, tmp_path):
        res = run_cli("--quiet", "run", *SMALL, "--override", "time.t_end=0",
                      "--output", str(tmp_path / "o"))
        assert res.returncode == 0
        rows = (tmp_path / "o" / "run.csv").read_text().strip().splitlines()
        assert len(rows) == 2  # header + one record

    def test_bad_config_exit_one(self):
        res = run_cli("run", "--override", "grid.n=3")
        assert res.returncode == 1
        assert "config error" in res.stderr

    def test_oracle_exit_zero(self):
        res = run_cli("oracle")
        assert res.returncode == 0

    def test_certify_prints_report(self):
        res = run_cli("certify", *SMALL)
        assert res.returncode == 0
        assert "overall: PASS" in res.stdout

    def test_fit_subcommand(self, tmp_path):
        out = tmp_path / "o"
        res = run_cli("--quiet", "run", *SMALL,
                      "--override", "time.t_end=0.5", "--override", "time.dt=0.01",
                      "--override", "time.diagnostics_stride=5",
                      "--override", "output.mode=linear-only",
                      "--output", str(out))
        assert res.returncode == 0
        res = run_cli("fit", str(out / "run.csv"), "mass", "--window", "0.01,0.51")
        assert res.returncode == 0 and "slope" in res.stdout

    def test_determinism_same_bytes(self, tmp_path):
        args = ["--quiet", "run", *SMALL, "--override", "data.family=random",
                "--override", "data.seed=7", "--override", "time.t_end=0.2",
                "--override", "time.dt=0.02", "--override", "time.diagnostics_stride=2"]
        r1 = run_cli(*args, "--output", str(tmp_path / "a"))
        r2 = run_cli(*args, "--output", str(tmp_path / "b"))
        assert r1.returncode == 0 and r2.returncode == 0
        assert (tmp_path / "a" / "run.csv").read_bytes() == (tmp_path / "b" / "run.csv").read_bytes()

    def test_resume_equivalence_bit_exact(self, tmp_path):
        base = ["--override", "data.amplitude=0.05", "--override", "data.auto_certify=false",
                "--override", "time.dt=0.02", "--override", "time.diagnostics_stride=5",
                "--override", "time.snapshot_stride=5"]
        full = tmp_path / "full"
        res = run_cli("--quiet", "run", *SMALL, *base, "--override", "time.t_end=0.4",
                      "--override", "time.checkpoint_every=10", "--output", str(full))
        assert res.returncode == 0
        resumed = tmp_path / "resumed"
        res = run_cli("--quiet", "resume", str(full / "state_00000010.zkg"), *SMALL, *base,
                      "--override", "time.t_end=0.4", "--output", str(resumed))
        assert res.returncode == 0
        a, _ = read_checkpoint(full / "final.zkg")
        b, _ = read_checkpoint(resumed / "final.zkg")
        for name in ("fhat", "gplus_hat", "Fplus_hat", "Fminus_hat", "Gplus_hat"):
            assert np.array_equal(getattr(a, name).values, getattr(b, name).values)
        assert a.t == b.t and a.step_count == b.step_count
