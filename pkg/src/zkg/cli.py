"""Command-line entry point: configuration, orchestration, persistence.

Subcommands: run, certify, identities, oracle, fit, resume.  Exit codes:
0 success, 1 configuration error, 2 numerical failure (blow-up / drift),
3 I/O error.  ZKG_THREADS caps the FFT worker pool.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import BlowUpError, CheckpointFormatError, ConfigError, EnergyDriftError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


def _build_parser():
    p = argparse.ArgumentParser(prog="zkg", description=__doc__)
    p.add_argument("--quiet", action="store_true", help="suppress progress output")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", default=None, help="path to a key = value config file")
        sp.add_argument(
            "--override", action="append", default=[], metavar="KEY=VALUE",
            help="override a config value (repeatable, e.g. grid.n=32)",
        )
        sp.add_argument("--output", default=None, help="output directory (overrides config)")

    for name, desc in (
        ("run", "integrate the system and emit diagnostics"),
        ("certify", "build initial data and print the certification report"),
        ("identities", "run both phase identity checkers"),
        ("oracle", "compare stepper accumulators against the Duhamel quadrature oracle"),
        ("fit", "fit a decay exponent to a CSV column"),
        ("resume", "continue a run from a checkpoint"),
    ):
        sp = sub.add_parser(name, help=desc)
        common(sp)
        if name == "fit":
            sp.add_argument("csv", help="time-series CSV produced by run")
            sp.add_argument("column", help="column name to fit")
            sp.add_argument("--window", default="1,30", help="t0,t1 fit window")
        if name == "resume":
            sp.add_argument("checkpoint", help="checkpoint file to resume from")
    return p


def _say(quiet, *args):
    if not quiet:
        print(*args)


def _setup(cfg):
    from .evolution import initial_state, reduce_to_first_order
    from .initial_data import DataSpec, certified_spec, choose_parameters, make_data
    from .propagators import schrodinger_profile_of
    from .spectral import Grid, to_frequency

    grid = Grid(dim=cfg.dim, n=cfg.n, L=cfg.L)
    params = choose_parameters(cfg.gamma, cfg.delta, eps0=cfg.eps0, n_mon=cfg.n_mon)
    spec = DataSpec(family=cfg.family, amplitude=cfg.amplitude, sigma=cfg.sigma,
                    k0=cfg.k0, seed=cfg.seed)
    if cfg.auto_certify:
        spec = certified_spec(spec, grid, params)
    u0, n0, n1 = make_data(spec, grid)
    wplus = reduce_to_first_order(n0, n1)
    state = initial_state(schrodinger_profile_of(to_frequency(u0), 0.0), wplus, 0.0)
    return grid, params, spec, (u0, n0, n1), state


def _run_loop(cfg, params, state, outdir, quiet, label="run"):
    from .checkpoint import emit_timeseries, write_checkpoint
    from .diagnostics import make_record
    from .evolution import run

    os.makedirs(outdir, exist_ok=True)
    csv_path = os.path.join(outdir, f"{label}.csv")
    if os.path.exists(csv_path):
        os.remove(csv_path)

    def record_fn(st, prev):
        rec = make_record(st, params, prev)
        emit_timeseries([rec], csv_path)
        return rec

    hook = None
    if cfg.checkpoint_every > 0:
        def hook(st):
            if st.step_count % cfg.checkpoint_every == 0:
                write_checkpoint(st, os.path.join(outdir, f"state_{st.step_count:08d}.zkg"),
                                 params.gamma)

    traj = run(
        state, params, cfg.dt, cfg.t_end,
        nonlinear=(cfg.mode == "nonlinear"),
        snapshot_stride=cfg.snapshot_stride or 10**9,
        diagnostics_stride=cfg.diagnostics_stride or 10**9,
        record_fn=record_fn, step_hook=hook,
        energy_drift_tol=cfg.energy_drift_tol,
    )
    write_checkpoint(traj.snapshots[-1], os.path.join(outdir, "final.zkg"), params.gamma)
    _say(quiet, f"{label}: {len(traj.records)} records -> {csv_path}"
         + (" (dt was halved after an energy-drift retry)" if traj.retried else ""))
    return traj


def cmd_run(args, cfg, quiet):
    if cfg.mode == "identity-check":
        return cmd_identities(args, cfg, quiet)
    if cfg.mode == "oracle-check":
        return cmd_oracle(args, cfg, quiet)
    if cfg.mode == "data-cert":
        return cmd_certify(args, cfg, quiet)
    grid, params, spec, _, state = _setup(cfg)
    outdir = args.output or cfg.directory
    _say(quiet, f"grid {grid.dim}d n={grid.n} L={grid.L}; gamma={params.gamma} "
         f"delta={params.delta:.5g} alpha={params.alpha:.5g}; amplitude={spec.amplitude:.4g}")
    _run_loop(cfg, params, state, outdir, quiet)
    return EXIT_OK


def cmd_certify(args, cfg, quiet):
    from .initial_data import certify_data

    grid, params, spec, data, _ = _setup(cfg)
    report = certify_data(*data, params)
    print(report)
    return EXIT_OK


def cmd_identities(args, cfg, quiet):
    from .phases import check_schrodinger_scaling_identity, check_wave_null_identity

    rep1 = check_wave_null_identity()
    rep2 = check_schrodinger_scaling_identity()
    print(rep1)
    print(rep2)
    return EXIT_OK if (rep1.passed and rep2.passed) else EXIT_NUMERICAL


def cmd_oracle(args, cfg, quiet):
    from .oracle_check import oracle_comparison

    report = oracle_comparison()
    print(report)
    return EXIT_OK if report.passed else EXIT_NUMERICAL


def cmd_fit(args, cfg, quiet):
    from .checkpoint import read_timeseries
    from .diagnostics import DiagnosticsRecord, fit_decay

    records = read_timeseries(args.csv)
    header = DiagnosticsRecord.csv_header()
    if args.column not in header:
        raise ConfigError(f"column {args.column!r} not in {header}")
    idx = header.index(args.column)
    ts = [r.t for r in records]
    vals = [r.csv_row()[idx] for r in records]
    t0, t1 = (float(x) for x in args.window.split(","))
    slope, err = fit_decay(ts, vals, (t0, t1))
    print(f"{args.column}: slope {slope:+.4f} +- {err:.4f} over t in [{t0:g}, {t1:g}]")
    return EXIT_OK


def cmd_resume(args, cfg, quiet):
    from .checkpoint import read_checkpoint
    from .initial_data import choose_parameters

    state, gamma = read_checkpoint(args.checkpoint)
    if abs(gamma - cfg.gamma) > 1e-12:
        raise ConfigError(
            f"checkpoint gamma {gamma} disagrees with configured gamma {cfg.gamma}"
        )
    if state.grid.n != cfg.n or state.grid.dim != cfg.dim or abs(state.grid.L - cfg.L) > 1e-12:
        raise ConfigError("checkpoint grid disagrees with configured grid")
    params = choose_parameters(cfg.gamma, cfg.delta, eps0=cfg.eps0, n_mon=cfg.n_mon)
    outdir = args.output or cfg.directory
    _say(quiet, f"resuming from t = {state.t:g} (step {state.step_count})")
    _run_loop(cfg, params, state, outdir, quiet, label="resume")
    return EXIT_OK


def main(argv=None) -> int:
    # Cap BLAS/FFT threading before any heavy work.
    threads = os.environ.get("ZKG_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)

    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        from .config import load_config

        cfg = load_config(args.config, args.override)
        handler = {
            "run": cmd_run,
            "certify": cmd_certify,
            "identities": cmd_identities,
            "oracle": cmd_oracle,
            "fit": cmd_fit,
            "resume": cmd_resume,
        }[args.command]
        return handler(args, cfg, args.quiet)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BlowUpError, EnergyDriftError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (CheckpointFormatError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
