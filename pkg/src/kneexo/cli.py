"""Batch command line: one subcommand per analysis, plot-ready CSV output.

Every CSV starts with a ``#`` comment line carrying the tool version, the
SHA-256 of the effective config, and the seed, followed by a header row.
Floats are written with ``repr`` (shortest round-trip form).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__, actuation, chain, config, gait, mechanism, statics
from .errors import ConfigError, KneexoError

SUBCOMMANDS = ("sweep", "optimize", "statics", "calibrate", "gait-sim", "inertia")

BENCH_FILE = "synthetic_bench.csv"
# planted values of the shipped bench file (see scripts/make_bench_data.py)
BENCH_PLANTED = {"k_nm_per_a": 0.62, "t_f_nm": 0.5, "noise_sigma_nm": 0.05, "n": 200, "seed": 0}


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


class Run:
    def __init__(self, cfg: config.RunConfig, out: Path, quiet: bool = False):
        self.cfg = cfg
        self.out = out
        self.quiet = quiet
        self.written: list[Path] = []

    def comment(self) -> str:
        return f"# kneexo {__version__} config_sha256={self.cfg.digest()} seed={self.cfg.seed}\n"

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        lines = [self.comment(), ",".join(header) + "\n"]
        lines += [",".join(fmt(v) for v in row) + "\n" for row in rows]
        path.write_text("".join(lines))
        self.written.append(path)
        return path

    def write_json(self, name: str, obj: dict) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        path.write_text(json.dumps(obj, indent=2) + "\n")
        self.written.append(path)
        return path

    def say(self, msg: str) -> None:
        if not self.quiet:
            print(msg)


def cmd_sweep(run: Run) -> None:
    cfg = run.cfg
    cc = cfg.chain_config()
    grid = chain.theta_grid(math.radians(cfg.sweep.theta_max_deg), cfg.sweep.grid_step_deg)
    rows = []
    for D in cfg.sweep.diameters_mm:
        for st in chain.sweep_slides(cc.with_diameter(D), grid):
            rows.append((float(D), math.degrees(st.theta), st.f, st.g, st.residual))
    run.write_csv("sweep.csv", ["D_mm", "theta_deg", "f_mm", "g_mm", "residual_mm"], rows)
    run.say(f"sweep: {len(rows)} states")


def cmd_optimize(run: Run) -> None:
    cfg = run.cfg
    op = cfg.optimize
    cc = cfg.chain_config()
    summary = []
    for tmax in op.theta_max_deg:
        res = chain.optimize_D(cc, (op.d_min_mm, op.d_max_mm), math.radians(tmax),
                               op.d_step_mm, op.tol_mm, op.grid_step_deg)
        run.write_csv(f"optimize_thmax{fmt(float(tmax))}.csv", ["D_mm", "phi_mm"], res.scan)
        summary.append((float(tmax), res.D_star, res.phi_star, res.phi_baseline, res.reduction, res.phi_reference))
        run.say(f"optimize: theta_max={tmax} deg D*={res.D_star:.2f} mm reduction={res.reduction:.4f}")
    run.write_csv("optimize_summary.csv",
                  ["theta_max_deg", "D_star_mm", "phi_star_mm", "phi_baseline_mm", "reduction", "phi_at_64mm_mm"],
                  summary)


def cmd_statics(run: Run) -> None:
    cfg = run.cfg
    layout = cfg.attachment_layout()
    load = cfg.load_case()
    res = statics.solve_attachment_forces(layout, load)
    labels = ["thigh_1", "thigh_2", "calf_1", "calf_2"]
    run.write_csv("statics.csv", ["attachment", "position_m", "F_p_N"],
                  zip(labels, res.positions, res.F_p))
    t, c = layout.thigh_attachments, layout.calf_attachments
    cases = [
        ("2+2", layout, False),
        ("2+2 tangential", layout, True),
        ("1+2", statics.AttachmentLayout(layout.thigh_length, layout.calf_length, t[:1], c), False),
        ("2+1", statics.AttachmentLayout(layout.thigh_length, layout.calf_length, t, c[:1]), False),
    ]
    rows = []
    for name, lay, tang in cases:
        sysm = statics.assemble(lay, load, tang)
        rows.append((name, tang, sysm.rank, sysm.rank_augmented, sysm.A.shape[1], sysm.verdict))
    run.write_csv("statics_verdicts.csv",
                  ["layout", "tangential", "rank", "rank_augmented", "n_unknowns", "verdict"], rows)
    run.say(f"statics: F_p = {np.round(res.F_p, 3).tolist()} N, residual {res.residual:.2e}")


def bench_samples_path() -> Path:
    return Path(str(resources.files("kneexo") / "data" / BENCH_FILE))


def cmd_calibrate(run: Run) -> None:
    path = run.cfg.calibration.samples_path or bench_samples_path()
    model, r2 = actuation.calibrate(actuation.read_calibration_csv(path))
    run.write_json("calibration.json", {"k_nm_per_a": model.k, "t_f_nm": model.T_f, "r_squared": r2})
    run.say(f"calibrate: k={model.k:.4f} Nm/A T_f={model.T_f:.4f} Nm R^2={r2:.4f}")


def read_imu_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    data = np.genfromtxt(path, delimiter=",", names=True, comments="#", dtype=float)
    if data.dtype.names != ("t_s", "omega_dps"):
        raise KneexoError(f"{path}: header must be 't_s,omega_dps'")
    return np.atleast_1d(data["t_s"]), np.atleast_1d(data["omega_dps"])


def cmd_gait_sim(run: Run) -> None:
    cfg = run.cfg
    params = cfg.detector_params()
    synthetic = None
    if cfg.gait.imu_path:
        t, omega = read_imu_csv(cfg.gait.imu_path)
    else:
        synthetic = gait.synthetic_gait(cfg.gait.n_strides, cfg.seed, cfg.gait.noise_dps, cfg.gait.sample_rate_hz)
        t, omega = synthetic.t, synthetic.omega
        run.write_csv("imu.csv", ["t_s", "omega_dps"], zip(t, omega))
    events = gait.detect_events((t, omega), params)
    score = gait.score_events(events, synthetic, params) if synthetic is not None else None
    run.write_csv("events.csv", ["t_s", "kind"], ((e.t, e.kind) for e in events))
    res = gait.simulate_tracking(cfg.assist_profile(), events, float(t[-1]), cfg.actuator_model(),
                                 cfg.plant_params(), cfg.profile.phase_mode, cfg.profile.nominal_stance_s)
    run.write_csv("trace.csv", ["t_s", "desired_nm", "actual_nm"], zip(res.t, res.desired, res.actual))
    summary = {"rms_error_nm": res.rms_error, "n_events": len(events),
               "peak_desired_nm": float(res.desired.max()) if res.desired.size else 0.0}
    if score is not None:
        summary.update(f1=score["f1"], max_timing_error_s=float(score["max_timing_error"]))
    run.write_json("gait_summary.json", summary)
    run.say(f"gait-sim: {len(events)} events, tracking RMS {res.rms_error:.4f} Nm")


def cmd_inertia(run: Run) -> None:
    cfg = run.cfg
    layouts = cfg.mass_layouts()
    point = cfg.inertia.point_m
    rows = [(name, mechanism.inertia_about_point(items, point)) for name, items in layouts.items()]
    if "conventional" in layouts and "distributed" in layouts:
        vals = dict(rows)
        rows.append(("reduction", vals["conventional"] - vals["distributed"]))
    run.write_csv("inertia.csv", ["layout", "inertia_kgm2"], rows)
    run.say("inertia: " + ", ".join(f"{n}={v:.4f}" for n, v in rows))


COMMANDS = {
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
    "statics": cmd_statics,
    "calibrate": cmd_calibrate,
    "gait-sim": cmd_gait_sim,
    "inertia": cmd_inertia,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kneexo", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"kneexo {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="JSON config; defaults used when omitted")
        sp.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
        sp.add_argument("--seed", type=int, help="64-bit seed for synthetic data")
        sp.add_argument("--grid-step-deg", type=float, help="theta grid step for sweep/optimize")
        sp.add_argument("--quiet", action="store_true")
    sub.add_parser("print-defaults", help="print the default config as JSON")
    return ap


def resolve_config(args) -> config.RunConfig:
    cfg = config.load_config(args.config) if args.config else config.RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.grid_step_deg is not None:
        cfg.sweep.grid_step_deg = args.grid_step_deg
        cfg.optimize.grid_step_deg = args.grid_step_deg
    if args.out is not None:
        cfg.output_dir = str(args.out)
    problems = config.validate(cfg)
    if not (0 <= cfg.seed < 2 ** 64):
        problems.append("seed: expected an integer in [0, 2^64)")
    if problems:
        raise ConfigError(problems)
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "print-defaults":
        sys.stdout.write(config.dumps(config.RunConfig()))
        return 0
    try:
        cfg = resolve_config(args)
        run = Run(cfg, Path(cfg.output_dir), args.quiet)
        COMMANDS[args.command](run)
    except ConfigError as exc:
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return 2
    except KneexoError as exc:
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return 1
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "io_error", "message": str(exc)}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
