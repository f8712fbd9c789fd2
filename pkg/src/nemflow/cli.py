"""Command line entry point: ``nemflow <subcommand> ...``.

Exit codes: 0 when every verdict holds, 2 on an inequality violation,
3 on numerical blow-up, 4 on configuration or input errors.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys

from . import diagnostics as dg
from .errors import CheckpointError, ConfigurationError, NemflowError
from .harness import runner
from .harness.checkpoint import atomic_write_text, checkpoint_header, read_checkpoint
from .harness.config import parse_config
from .harness.fitting import fit_decay
from .harness.plotting import PlotSeries, PlotStyle, emit_plot
from .integrator import Sample, Trajectory
from .model import energy_report


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc}") from exc


def _print(obj):
    sys.stdout.write(runner.dumps_json(obj))


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    summary = runner.run_simulation(cfg, output_dir=args.out)
    _print({"config_hash": summary.config_hash, "status": summary.status,
            "output_dir": args.out or cfg.output_dir,
            "verdicts": {k: v["holds"] for k, v in summary.verdicts.items()}})
    return summary.exit_code


def cmd_campaign(args) -> int:
    paths = sorted(glob.glob(os.path.join(args.config_dir, "*.cfg")))
    configs = [_load_config(p) for p in paths]
    out = args.out or os.path.join(args.config_dir, "campaign")
    table = runner.run_campaign(configs, workers=args.workers, output_dir=out)
    _print({"runs": len(table.rows), "output_dir": out,
            "failed": [r["config_hash"] for r in table.rows if r["status"] != "ok"]})
    codes = {r["exit_code"] for r in table.rows}
    for code in (runner.EXIT_CONFIG, runner.EXIT_BLOWUP, runner.EXIT_VIOLATION):
        if code in codes:
            return code
    return runner.EXIT_OK


def cmd_analyze(args) -> int:
    data = runner.read_series_csv(args.csv)
    if "t" not in data or "total" not in data:
        raise ConfigurationError(f"{args.csv!r} lacks the t and total columns")
    t, y = data["t"], data["total"]
    lo = args.t_lo if args.t_lo is not None else max(1.0, float(t[0]))
    hi = args.t_hi if args.t_hi is not None else float(t[-1])
    fits = {m: fit_decay(t, y, (lo, hi), m) for m in ("algebraic", "logarithmic")}
    svg_path = args.plot or os.path.splitext(args.csv)[0] + ".svg"
    atomic_write_text(svg_path, emit_plot(
        [PlotSeries(os.path.basename(args.csv), t, y, fits["algebraic"])],
        PlotStyle(title="decay analysis", reference_exponent=args.reference)))
    _print({"fits": {k: f.to_dict() for k, f in fits.items()}, "plot": svg_path})
    return runner.EXIT_OK


def load_checkpoint_trajectory(folder, nonlinear: bool = True) -> Trajectory:
    """Trajectory rebuilt from every checkpoint under ``folder``, ordered by time."""
    paths = sorted(glob.glob(os.path.join(folder, "checkpoints", "*.nemd"))
                   or glob.glob(os.path.join(folder, "*.nemd")))
    if len(paths) < 2:
        raise ConfigurationError(f"need at least two checkpoints in {folder!r}, found {len(paths)}")
    states = sorted((read_checkpoint(p) for p in paths), key=lambda s: s.t)
    first = states[0]
    probes = dg.standard_probes(first, digest=True, pointwise=True)
    traj = Trajectory(grid=first.grid, params=first.params, nonlinear=nonlinear)
    for s in states:
        traj.samples.append(Sample(s.t, energy_report(s), None,
                                   {k: fn(s) for k, fn in probes.items()}))
    return traj


def cmd_verify(args) -> int:
    nonlinear = True
    summary_path = os.path.join(args.trajectory_dir, "summary.json")
    if os.path.exists(summary_path):
        with open(summary_path, encoding="utf-8") as fh:
            text = json.load(fh).get("extra", {}).get("config", "")
        if text:
            nonlinear = parse_config(text).policy.nonlinear
    traj = load_checkpoint_trajectory(args.trajectory_dir, nonlinear)
    reports = {}
    spec = dg.MultiplierSpec(k=args.k)
    for name in dg.WEIGHTED:
        reports[name] = dg.verify_weighted_inequality(traj, spec, name).summary()
    reports["pointwise"] = dg.pointwise_fourier_bound(traj).summary()
    reports["coercive_budget"] = dg.coercive_budget(traj).summary()
    reports["energy_budget_max_residual"] = {"holds": True,
                                             "value": dg.energy_budget(traj).max_residual}
    _print({"samples": len(traj), "t_end": traj.times[-1], "reports": reports})
    ok = all(r["holds"] for r in reports.values())
    return runner.EXIT_OK if ok else runner.EXIT_VIOLATION


def cmd_selftest(args) -> int:
    results = runner.selftest()
    _print(results)
    return runner.EXIT_OK if results["all_ok"] else runner.EXIT_VIOLATION


def cmd_checkpoint_info(args) -> int:
    try:
        info = checkpoint_header(args.path)
    except OSError as exc:
        raise CheckpointError(f"cannot read {args.path!r}: {exc}") from exc
    _print(info)
    return runner.EXIT_OK if info["checksum_ok"] else runner.EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nemflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one configuration")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (overrides output.dir)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("campaign", help="run every *.cfg in a directory")
    p.add_argument("config_dir")
    p.add_argument("--out", help="campaign output directory (default <config_dir>/campaign)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("analyze", help="fit and plot a series CSV")
    p.add_argument("csv")
    p.add_argument("--t-lo", type=float, dest="t_lo")
    p.add_argument("--t-hi", type=float, dest="t_hi")
    p.add_argument("--reference", type=float, default=1.0, help="reference slope exponent")
    p.add_argument("--plot", help="SVG path (default next to the CSV)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="run the inequality suite on a checkpoint directory")
    p.add_argument("trajectory_dir")
    p.add_argument("--k", type=float, default=3.0, help="time weight exponent")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("selftest", help="run the oracle suite")
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("checkpoint-info", help="print a checkpoint header")
    p.add_argument("path")
    p.set_defaults(func=cmd_checkpoint_info)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NemflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return runner.EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
