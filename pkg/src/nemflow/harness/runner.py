"""Run orchestration: simulate, evaluate every enabled diagnostic, persist.

Outputs of a run directory:

* ``series.csv``: one row per sample, columns :data:`CSV_COLUMNS`
* ``summary.json``: configuration hash, final energies, verdicts, fits
* ``decay.svg``: log-log plot of the total energy with its fit
* ``timing.json``: wall-clock seconds (kept apart so the other files
  are byte-identical across reruns)
* ``checkpoints/ckpt_XXXXXX.nemd`` when checkpointing is enabled
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import diagnostics as dg
from .. import oracle
from ..errors import BlowUpError, NemflowError, NumericalInputError
from ..initdata import RNG_NAME, initial_state
from ..integrator import StepPolicy, Trajectory, evolve
from ..model import ANGLE, Params
from ..spectral import forward_transform, make_grid
from .checkpoint import atomic_write_text, crc64, write_checkpoint
from .config import RunConfig, config_hash, format_config, with_overrides
from .fitting import DecayFit, envelope_check, fit_decay
from .plotting import PlotSeries, PlotStyle, emit_plot

SCHEMA_VERSION = 1
CSV_COLUMNS = (
    "t", "kinetic", "elastic", "total", "viscous_diss", "director_diss", "min_d2",
    "rigidity_ratio", "low_freq_energy", "high_freq_energy", "weighted_energy_1t",
    "weighted_energy_log",
)
EXIT_OK, EXIT_VIOLATION, EXIT_BLOWUP, EXIT_CONFIG = 0, 2, 3, 4
MAX_PRINCIPLE_TOL = 1e-8
UNIT_TOL = {ANGLE: 1e-12, "vector": 1e-6}


@dataclass
class RunSummary:
    config_hash: str
    status: str
    exit_code: int
    final: dict
    verdicts: dict
    fits: dict
    steps: int
    samples: int
    wall_clock: float = 0.0
    extra: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict, repr=False)
    trajectory: Trajectory | None = field(default=None, repr=False)

    @property
    def holds(self) -> bool:
        return all(v.get("holds", True) for v in self.verdicts.values())

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config_hash": self.config_hash,
            "status": self.status,
            "exit_code": self.exit_code,
            "final": self.final,
            "verdicts": self.verdicts,
            "fits": self.fits,
            "steps": self.steps,
            "samples": self.samples,
            "extra": self.extra,
        }


# ---------------------------------------------------------------------------
# serialization helpers

def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def series_csv(series: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    cols = [np.asarray(series[c], dtype=float) for c in CSV_COLUMNS]
    for row in zip(*cols):
        writer.writerow([format(float(v), ".17g") for v in row])
    return buf.getvalue()


def read_series_csv(path) -> dict:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise NumericalInputError(f"{os.fspath(path)!r} is empty")
        data = [[float(x) for x in row] for row in reader if row]
    arr = np.array(data, dtype=float).reshape(-1, len(header))
    return {name: arr[:, i] for i, name in enumerate(header)}


# ---------------------------------------------------------------------------
# evaluation

class CheckpointProbe:
    """Writes a checkpoint whenever a sample lands on a multiple of ``interval``."""

    def __init__(self, folder, interval: float):
        self.folder = folder
        self.interval = interval
        self.count = 0

    def __call__(self, state):
        k = state.t / self.interval
        if abs(k - round(k)) > 1e-9 * max(1.0, k):
            return None
        path = os.path.join(self.folder, f"ckpt_{self.count:06d}.nemd")
        write_checkpoint(state, path)
        self.count += 1
        return os.path.basename(path)


def series_from_trajectory(traj: Trajectory, k: float = 3.0) -> dict:
    """CSV columns; the frequency split uses ``G(t) = (k / (2 (1+t)))^(1/2)``."""
    t = traj.times
    trace = dg.splitting_decay_trace(traj, dg.MultiplierSpec(k=k))
    ratios = []
    for r in traj.reports:
        ratios.append(r.grad_l4_fourth / r.lap_l2_sq if r.lap_l2_sq > 0 else math.nan)
    return {
        "t": t,
        "kinetic": traj.series("kinetic"),
        "elastic": traj.series("elastic"),
        "total": trace["total"],
        "viscous_diss": traj.series("viscous_dissipation"),
        "director_diss": traj.series("director_dissipation"),
        "min_d2": np.array(traj.probe("min_d2")),
        "rigidity_ratio": np.array(ratios),
        "low_freq_energy": trace["low"],
        "high_freq_energy": trace["high"],
        "weighted_energy_1t": trace["weighted_1t"],
        "weighted_energy_log": trace["weighted_log"],
    }


def evaluate_trajectory(traj: Trajectory, cfg: RunConfig) -> tuple[dict, dict]:
    """All enabled verdicts plus derived quantities for the summary."""
    verdicts = {}
    extra = {}
    ledger = dg.energy_budget(traj)
    verdicts["energy_budget"] = {
        "holds": bool(ledger.max_residual <= cfg.diag.budget_tol),
        "max_residual": ledger.max_residual, "tol": cfg.diag.budget_tol,
    }
    md2 = np.array(traj.probe("min_d2"))
    verdicts["max_principle"] = {
        "holds": bool(np.all(md2 >= md2[0] - MAX_PRINCIPLE_TOL)),
        "initial": float(md2[0]), "minimum": float(np.min(md2)), "tol": MAX_PRINCIPLE_TOL,
    }
    defect = float(np.max(traj.probe("unit_defect")))
    tol = UNIT_TOL[cfg.policy.mode]
    verdicts["unit_constraint"] = {"holds": defect <= tol, "max_defect": defect, "tol": tol}
    ratios = []
    in_hyp = []
    for r, m in zip(traj.reports, md2):
        rep = dg.rigidity_from_report(r, m, cfg.init.eps0)
        if rep.ratio is not None:
            ratios.append(rep.ratio)
            in_hyp.append(bool(rep.in_hypothesis))
    checked = [x for x, h in zip(ratios, in_hyp) if h or not cfg.diag.eps0_check]
    omega_bar = dg.empirical_omega(traj)
    verdicts["rigidity"] = {
        "holds": bool(all(x < 1.0 for x in checked)),
        "max_ratio": max(ratios) if ratios else None,
        "samples_checked": len(checked), "omega_bar": omega_bar,
        "zero_gradient": not ratios,
    }
    extra["omega_bar"] = omega_bar
    verdicts["coercive_budget"] = dg.coercive_budget(traj, omega_bar).summary()
    spec = dg.MultiplierSpec(k=cfg.diag.weight_exponent)
    for name in cfg.diag.inequalities:
        if name == "pointwise":
            verdicts[name] = dg.pointwise_fourier_bound(traj).summary()
        else:
            stride = cfg.diag.heat_stride if name == "heat_weighted" else 1
            verdicts[name] = dg.verify_weighted_inequality(traj, spec, name, stride=stride).summary()
    return verdicts, extra


def fit_summary(t, total, cfg: RunConfig) -> dict:
    """Decay fits of the total energy in the configured window."""
    if cfg.fit.model == "none":
        return {"skipped": True, "reason": "fitting disabled"}
    window = (cfg.fit.t_lo, cfg.fit.t_hi)
    sel = (t >= window[0] - 1e-9) & (t <= window[1] + 1e-9)
    if not np.any(total[sel] > 0):
        return {"skipped": True, "reason": "energy vanishes in the fit window"}
    out = {"skipped": False, "primary": cfg.fit.model, "target_exponent": cfg.fit.target}
    try:
        fits = {m: fit_decay(t, total, window, m) for m in ("algebraic", "logarithmic", "exponential")}
    except NemflowError as exc:
        return {"skipped": True, "reason": str(exc)}
    for name, f in fits.items():
        out[name] = f.to_dict()
    out["decay_kind"] = ("exponential" if fits["exponential"].residual < fits["algebraic"].residual
                         else "algebraic")
    out["algebraic_poor"] = fits["algebraic"].poor
    out["envelope"] = envelope_check(t, total, 0.9 * cfg.fit.target, window)
    return out


def _final(traj: Trajectory) -> dict:
    r = traj.reports[-1]
    return {"t": traj.times[-1], "kinetic": r.kinetic, "elastic": r.elastic,
            "total": r.kinetic + r.elastic, "viscous_dissipation": r.viscous_dissipation,
            "director_dissipation": r.director_dissipation}


def run_simulation(cfg: RunConfig, write: bool = True, keep_states: bool = False,
                   output_dir: str | None = None) -> RunSummary:
    """Evolve ``cfg``, run every enabled diagnostic and (optionally) persist.

    On blow-up the partial trajectory is still evaluated and written and
    the summary carries status ``blowup`` with exit code 3.
    """
    start = time.perf_counter()
    out = output_dir or cfg.output_dir
    grid = make_grid(cfg.grid.n, cfg.grid.length)
    state = initial_state(grid, cfg.params, cfg.init, cfg.policy.mode)
    weighted = any(name in dg.WEIGHTED for name in cfg.diag.inequalities)
    probes = dg.standard_probes(state, digest=weighted, pointwise="pointwise" in cfg.diag.inequalities)
    if write and cfg.diag.checkpoint_interval > 0:
        probes["checkpoint"] = CheckpointProbe(os.path.join(out, "checkpoints"),
                                               cfg.diag.checkpoint_interval)
    status, message = "ok", None
    try:
        traj = evolve(state, cfg.policy, probes=probes, keep_states=keep_states)
    except BlowUpError as exc:
        traj = exc.trajectory
        status, message = "blowup", str(exc)
    verdicts, extra = evaluate_trajectory(traj, cfg)
    series = series_from_trajectory(traj, cfg.diag.weight_exponent)
    fits = fit_summary(series["t"], series["total"], cfg)
    extra.update({"rng": RNG_NAME, "config": format_config(cfg)})
    if message:
        extra["blowup"] = {"message": message, "last_good_time": float(traj.times[-1])}
    if status == "blowup":
        code = EXIT_BLOWUP
    elif all(v.get("holds", True) for v in verdicts.values()):
        code = EXIT_OK
    else:
        status, code = "violation", EXIT_VIOLATION
    summary = RunSummary(config_hash(cfg), status, code, _final(traj), verdicts, fits,
                         traj.steps, len(traj), extra=extra, series=series, trajectory=traj)
    summary.wall_clock = time.perf_counter() - start
    if write:
        write_outputs(summary, out)
    return summary


def write_outputs(summary: RunSummary, folder: str):
    s = summary.series
    fit = None
    if not summary.fits.get("skipped", True):
        f = summary.fits[summary.fits["primary"]]
        fit = DecayFit(f["exponent"], f["amplitude"], tuple(f["window"]), f["residual"],
                       f["model"], f["samples"])
    atomic_write_text(os.path.join(folder, "series.csv"), series_csv(s))
    atomic_write_text(os.path.join(folder, "summary.json"), dumps_json(summary.to_json_dict()))
    if np.any(s["total"] > 0):
        target = summary.fits.get("target_exponent", 1.0)
        svg = emit_plot([PlotSeries("total", s["t"], s["total"], fit if fit and fit.model == "algebraic" else None)],
                        PlotStyle(title=f"run {summary.config_hash[:12]}", reference_exponent=target))
        atomic_write_text(os.path.join(folder, "decay.svg"), svg)
    atomic_write_text(os.path.join(folder, "timing.json"),
                      dumps_json({"wall_clock_s": summary.wall_clock, "steps": summary.steps}))


# ---------------------------------------------------------------------------
# campaigns

CAMPAIGN_COLUMNS = (
    "config_hash", "status", "exit_code", "family", "slope", "seed", "director_amplitude",
    "n", "length", "final_total", "alpha", "fit_residual", "omega_bar", "max_ratio",
    "all_hold", "error",
)


def _campaign_row(cfg: RunConfig, write_root: str | None) -> dict:
    h = config_hash(cfg)
    row = {"config_hash": h, "family": cfg.init.family, "slope": cfg.init.slope,
           "seed": cfg.init.seed, "director_amplitude": cfg.init.director_amplitude,
           "n": cfg.grid.n, "length": cfg.grid.length}
    try:
        folder = os.path.join(write_root, h[:16]) if write_root else None
        s = run_simulation(cfg, write=folder is not None, output_dir=folder)
    except (NemflowError, OSError) as exc:
        row.update(status="error", exit_code=EXIT_CONFIG, final_total=None, alpha=None,
                   fit_residual=None, omega_bar=None, max_ratio=None, all_hold=False,
                   error=f"{type(exc).__name__}: {exc}")
        return row
    alg = s.fits.get("algebraic") or {}
    row.update(status=s.status, exit_code=s.exit_code, final_total=s.final["total"],
               alpha=alg.get("exponent"), fit_residual=alg.get("residual"),
               omega_bar=s.extra["omega_bar"], max_ratio=s.verdicts["rigidity"]["max_ratio"],
               all_hold=s.holds, error="")
    return row


@dataclass
class CampaignTable:
    rows: list

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CAMPAIGN_COLUMNS)
        for row in self.rows:
            cells = []
            for c in CAMPAIGN_COLUMNS:
                v = row.get(c)
                cells.append("" if v is None else format(v, ".17g") if isinstance(v, float) else v)
            writer.writerow(cells)
        return buf.getvalue()

    def to_json(self) -> str:
        return dumps_json({"schema_version": SCHEMA_VERSION, "rows": self.rows})


def run_campaign(configs, workers: int = 1, output_dir: str | None = None) -> CampaignTable:
    """Run independent configs and gather one row each, sorted by config hash.

    A failing run is recorded in its row and the campaign continues.
    With ``output_dir`` every run writes into ``output_dir/<hash prefix>``
    and the table is saved as ``campaign.csv`` and ``campaign.json``.
    """
    configs = list(configs)
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_campaign_row, configs, [output_dir] * len(configs)))
    else:
        rows = [_campaign_row(c, output_dir) for c in configs]
    order = sorted(range(len(rows)), key=lambda i: (rows[i]["config_hash"], i))
    table = CampaignTable([rows[i] for i in order])
    if output_dir:
        atomic_write_text(os.path.join(output_dir, "campaign.csv"), table.to_csv())
        atomic_write_text(os.path.join(output_dir, "campaign.json"), table.to_json())
    return table


def saturation_time(traj: Trajectory, fraction: float = 0.5) -> float | None:
    """First sample time at which the lowest nonzero shell holds ``fraction`` of the energy."""
    for s in traj.samples:
        sp = s.probes["spectrum"]
        per_shell = sp["eu"] + sp["ed"]
        total = np.sum(per_shell)
        if total > 0 and per_shell[1] >= fraction * total:
            return float(s.t)
    return None


def box_convergence_study(base: RunConfig, lengths) -> list:
    """Repeat ``base`` on boxes of side ``lengths`` at its grid spacing.

    Each row carries ``L``, ``n``, the algebraic exponent fitted on
    ``[t_lo, min(t_end, c_sat L^2)]`` (the window widens with the box) and
    the saturation time.
    """
    dx = base.grid.length / base.grid.n
    rows = []
    for length in lengths:
        n = int(round(length / dx))
        n += n % 2
        t_hi = min(base.fit.c_sat * length ** 2, base.policy.t_end)
        cfg = with_overrides(base, grid={"n": n, "length": float(length)},
                             fit={"t_hi": t_hi}, diag={"inequalities": (), "checkpoint_interval": 0.0})
        s = run_simulation(cfg, write=False)
        alg = s.fits.get("algebraic") or {}
        rows.append({"length": float(length), "n": n, "window": [cfg.fit.t_lo, t_hi],
                     "alpha": alg.get("exponent"), "residual": alg.get("residual"),
                     "saturation_time": saturation_time(s.trajectory)})
    return rows


# ---------------------------------------------------------------------------
# self test

def selftest() -> dict:
    """Fast oracle checks; each entry has ``ok`` and the measured value."""
    results = {}
    rng = np.random.default_rng(12345)
    g8 = make_grid(8, 2 * math.pi)
    f = rng.standard_normal(g8.shape)
    err = float(np.max(np.abs(forward_transform(g8, f) - oracle.dft_bruteforce(f))))
    results["dft_bruteforce"] = {"ok": err <= 1e-12, "value": err}

    ts = np.array([1.0, 10.0, 100.0, 1000.0, 10000.0])
    for s in (0.0, 0.5, 1.0):
        vals = np.array([oracle.heat_energy_exact(s, t) for t in ts])
        slope = float(np.polyfit(np.log1p(ts), np.log(vals), 1)[0])
        results[f"heat_exponent_s{s:g}"] = {"ok": abs(slope + s + 1) <= 1e-10, "value": slope}

    from ..initdata import taylor_green

    g = make_grid(32, 2 * math.pi)
    tg = taylor_green(g, 1.0, Params())
    traj = evolve(tg, StepPolicy(t_end=0.1, sample_interval=0.1, dt=1e-3), keep_states=True)
    exact = oracle.taylor_green_exact(1.0, 1.0, 0.1, n=32)
    diff = abs(traj.samples[-1].report.kinetic / traj.samples[0].report.kinetic - math.exp(-0.4))
    uerr = float(np.max(np.abs(traj.samples[-1].state.u_hat - exact.u_hat)))
    results["taylor_green_energy"] = {"ok": diff <= 1e-10, "value": diff}
    results["taylor_green_field"] = {"ok": uerr <= 1e-10, "value": uerr}

    crc = crc64(b"123456789")
    results["crc64"] = {"ok": crc == 0x995DC9BBDF1939FA, "value": f"{crc:#018x}"}
    results["all_ok"] = all(v["ok"] for v in results.values())
    return results


__all__ = [
    "SCHEMA_VERSION", "CSV_COLUMNS", "RunSummary", "run_simulation", "evaluate_trajectory",
    "series_from_trajectory", "fit_summary", "write_outputs", "series_csv", "read_series_csv",
    "dumps_json", "run_campaign", "CampaignTable", "box_convergence_study", "saturation_time",
    "selftest", "CheckpointProbe", "EXIT_OK", "EXIT_VIOLATION", "EXIT_BLOWUP", "EXIT_CONFIG",
]
