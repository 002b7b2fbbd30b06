"""Command-line front end.

    bbmb simulate CONFIG [--out FILE]
    bbmb convergence CONFIG [--meshes 10 20 40 80] [--ref-factor 8] [--t-eval T] [--out FILE]
    bbmb sweep-mu CONFIG [--mus 0.5 0.1 0.01 0.001 0] [--out FILE]
    bbmb check
    bbmb presets

CONFIG is a scenario file or the name of a shipped preset. Output goes to
``--out``, else the config's ``out_path``, else ``<config name>.csv`` in the
working directory. CSV files are written to a temporary name and renamed
into place.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .analysis import convergence_study, mu_sweep
from .checks import run_checks
from .scenarios import ConfigError, ScenarioConfig, load_config, load_preset, preset_names
from .stepper import NewtonDivergence, SimulationResult, run_simulation

SIMULATE_COLUMNS = ("t", "l2", "linf", "tnorm", "e1", "lyapunov", "v0", "v1", "newton_iters")
CONVERGENCE_COLUMNS = (
    "h", "e_l2", "e_linf", "e_tnorm", "e_v0", "e_v1",
    "order_l2", "order_linf", "order_tnorm", "order_v0", "order_v1",
)
SWEEP_COLUMNS = ("mu", "sup_deviation", "file")

EXIT_CONFIG = 2
EXIT_NEWTON = 3
EXIT_CHECK = 1


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x)


def write_csv(path, header, rows) -> Path:
    """Write rows atomically: a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def simulation_rows(result: SimulationResult):
    for t, l2, linf, tn, s, it in zip(
        result.times, result.l2, result.linf, result.tnorm,
        result.energy_samples, result.sample_iters,
    ):
        yield (t, l2, linf, tn, s.e1, s.lyapunov, s.v0, s.v1, it)


def resolve_config(target: str) -> tuple[ScenarioConfig, str]:
    """Load a scenario file, falling back to a shipped preset of that name."""
    path = Path(target)
    if path.is_file():
        return load_config(path), path.stem
    if target in preset_names():
        return load_preset(target), target
    raise ConfigError(f"{target!r} is neither a readable file nor a preset ({', '.join(preset_names())})")


def _output_path(args, cfg: ScenarioConfig, name: str, suffix: str = "") -> Path:
    if args.out:
        return Path(args.out)
    if cfg.out_path:
        out = Path(cfg.out_path)
        return out.with_name(f"{out.stem}{suffix}{out.suffix}") if suffix else out
    return Path(f"{name}{suffix}.csv")


def cmd_simulate(args) -> int:
    cfg, name = resolve_config(args.config)
    result = run_simulation(cfg.initial_field(), cfg.params, cfg.stepper)
    out = write_csv(_output_path(args, cfg, name), SIMULATE_COLUMNS, simulation_rows(result))
    print(
        f"{name}: {cfg.stepper.n_steps} steps, L2 {result.l2[0]:.6g} -> {result.l2[-1]:.6g}, "
        f"max Newton iterations {result.max_newton_iters}; wrote {out}"
    )
    return 0


def cmd_convergence(args) -> int:
    cfg, name = resolve_config(args.config)
    t_eval = cfg.t_end if args.t_eval is None else args.t_eval
    rows = convergence_study(
        cfg.params, cfg.stepper, args.meshes, args.ref_factor, t_eval,
        initial=cfg.initial_field, max_workers=args.jobs,
    )
    table = [
        (r.h, r.e_l2, r.e_linf, r.e_tnorm, r.e_v0, r.e_v1,
         r.order_l2, r.order_linf, r.order_tnorm, r.order_v0, r.order_v1)
        for r in rows
    ]
    out = write_csv(_output_path(args, cfg, name, "_convergence"), CONVERGENCE_COLUMNS, table)
    for r in rows[1:]:
        print(
            f"h={r.h:.5g}: orders L2 {r.order_l2:.3f}, Linf {r.order_linf:.3f}, "
            f"tnorm {r.order_tnorm:.3f}, v0 {r.order_v0:.3f}, v1 {r.order_v1:.3f}"
        )
    print(f"wrote {out}")
    return 0


def cmd_sweep_mu(args) -> int:
    cfg, name = resolve_config(args.config)
    result = mu_sweep(cfg.params, cfg.stepper, args.mus, cfg.initial_field(), max_workers=args.jobs)
    summary = _output_path(args, cfg, name, "_mu_sweep")
    summary_rows = []
    for idx, (mu, res, dev) in enumerate(zip(result.mus, result.results, result.deviations)):
        traj = summary.with_name(f"{summary.stem}_mu{idx:02d}.csv")
        write_csv(traj, SIMULATE_COLUMNS, simulation_rows(res))
        summary_rows.append((mu, float(dev), traj.name))
        print(f"mu={mu:g}: sup deviation from mu=0 {dev:.6g}")
    write_csv(summary, SWEEP_COLUMNS, summary_rows)
    print(f"wrote {summary} and {len(summary_rows)} trajectory files")
    return 0


def cmd_check(args) -> int:
    results = run_checks()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else EXIT_CHECK


def cmd_presets(args) -> int:
    for name in preset_names():
        cfg = load_preset(name)
        print(f"{name}: mode={cfg.mode.value} mu={cfg.mu:g} nu={cfg.nu:g} c0={cfg.c0:g} c1={cfg.c1:g}")
    return 0


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bbmb", description="Boundary-feedback stabilized BBM-Burgers simulations."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("config", help="scenario file or preset name")
        sp.add_argument("--out", help="output CSV path (overrides out_path)")
        return sp

    sp = with_config("simulate", "run one scenario and write its time series")
    sp.set_defaults(func=cmd_simulate)

    sp = with_config("convergence", "spatial convergence study against a refined reference")
    sp.add_argument("--meshes", type=_positive_int, nargs="+", default=[10, 20, 40, 80])
    sp.add_argument("--ref-factor", type=_positive_int, default=8)
    sp.add_argument("--t-eval", type=float, default=None, help="default: t_end of the config")
    sp.add_argument("--jobs", type=_positive_int, default=1, help="concurrent runs")
    sp.set_defaults(func=cmd_convergence)

    sp = with_config("sweep-mu", "rerun a scenario for several mu and compare with mu = 0")
    sp.add_argument("--mus", type=float, nargs="+", default=[0.5, 0.1, 0.01, 0.001, 0.0])
    sp.add_argument("--jobs", type=_positive_int, default=1, help="concurrent runs")
    sp.set_defaults(func=cmd_sweep_mu)

    sub.add_parser("check", help="run the fast invariant suite").set_defaults(func=cmd_check)
    sub.add_parser("presets", help="list shipped scenarios").set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"bbmb: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NewtonDivergence as exc:
        print(f"bbmb: {exc}", file=sys.stderr)
        return EXIT_NEWTON
    except ValueError as exc:
        print(f"bbmb: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
