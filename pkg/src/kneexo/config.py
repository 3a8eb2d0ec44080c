"""Run configuration: one JSON file, one section per model, degrees and
SI-ish units at this boundary only.

Every section is a dataclass whose defaults are the documented repo
defaults. Loading rejects unknown keys and reports every problem found.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import actuation, chain, gait, knee, mechanism, statics
from .errors import ConfigError, KneexoError
from .geometry import Transform2D


@dataclass
class KneeSection:
    semi_major_a_mm: float = knee.DEFAULT_SEMI_MAJOR_MM
    semi_minor_b_mm: float = knee.DEFAULT_SEMI_MINOR_MM
    sliding_ratio_rho: float | str = knee.DEFAULT_SLIDING_RATIO  # number or "inf"
    theta_max_deg: float = 150.0


@dataclass
class JointSection:
    roller_diameter_mm: float = mechanism.PUBLISHED_ROLLER_DIAMETER_MM
    kind: str = "rolling"


@dataclass
class ChainSection:
    thigh_anchors_mm: list = field(default_factory=lambda: [[0.0, 100.0], [0.0, 300.0]])
    calf_anchors_mm: list = field(default_factory=lambda: [[0.0, -100.0], [0.0, -330.0]])
    # null: exo joint at the knee ICR at full extension
    alignment: dict | None = None


@dataclass
class TransmissionSection:
    i1: float = mechanism.PUBLISHED_STAGE_RATIOS[0]
    i2: float = mechanism.PUBLISHED_STAGE_RATIOS[1]
    motor_peak_torque_nm: float = mechanism.MOTOR_PEAK_TORQUE_NM
    motor_rated_torque_nm: float = mechanism.MOTOR_RATED_TORQUE_NM


@dataclass
class StaticsSection:
    thigh_length_m: float = 0.42
    calf_length_m: float = 0.42
    thigh_attachments_m: list = field(default_factory=lambda: [0.08, 0.30])
    calf_attachments_m: list = field(default_factory=lambda: [0.08, 0.36])
    knee_torque_nm: float = 16.0
    knee_angle_deg: float = 20.0
    axial_load_n: float = 700.0


@dataclass
class ActuatorSection:
    k_nm_per_a: float = actuation.PUBLISHED_TORQUE_CONSTANT
    t_f_nm: float = actuation.PUBLISHED_FRICTION_TORQUE


@dataclass
class CalibrationSection:
    # null: the shipped synthetic bench file
    samples_path: str | None = None


@dataclass
class DetectorSection:
    omega_quiet_dps: float = 10.0
    quiet_window_s: float = 0.08
    omega_active_dps: float = 50.0


@dataclass
class ProfileSection:
    curve: list = field(default_factory=lambda: [list(p) for p in gait.DEFAULT_EXTENSION_MOMENT])
    scale: float = 0.40
    body_mass_kg: float = 80.0
    torque_cap_nm: float = 16.0
    phase_mode: str = "phase"
    nominal_stance_s: float = 0.6


@dataclass
class PlantSection:
    time_constant_s: float = 0.005
    dt_s: float = 0.001


@dataclass
class GaitSection:
    # null: generate a synthetic labelled stream from the run seed
    imu_path: str | None = None
    n_strides: int = 100
    noise_dps: float = 2.0
    sample_rate_hz: float = 200.0


@dataclass
class SweepSection:
    diameters_mm: list = field(default_factory=lambda: [0.0, 45.0, 90.0])
    theta_max_deg: float = 120.0
    grid_step_deg: float = 1.0


@dataclass
class OptimizeSection:
    d_min_mm: float = 0.0
    d_max_mm: float = 150.0
    d_step_mm: float = 1.0
    tol_mm: float = 0.1
    theta_max_deg: list = field(default_factory=lambda: [120.0, 75.0])
    grid_step_deg: float = 1.0


def _layout_rows(items):
    return [{"name": it.name, "mass_kg": it.mass, "x_m": it.position[0], "y_m": it.position[1]} for it in items]


@dataclass
class InertiaSection:
    layouts: dict = field(default_factory=lambda: {
        "conventional": _layout_rows(mechanism.CONVENTIONAL_LAYOUT),
        "distributed": _layout_rows(mechanism.DISTRIBUTED_LAYOUT),
    })
    point_m: list = field(default_factory=lambda: [0.0, 0.0])


@dataclass
class RunConfig:
    knee: KneeSection = field(default_factory=KneeSection)
    joint: JointSection = field(default_factory=JointSection)
    chain: ChainSection = field(default_factory=ChainSection)
    transmission: TransmissionSection = field(default_factory=TransmissionSection)
    statics: StaticsSection = field(default_factory=StaticsSection)
    actuator: ActuatorSection = field(default_factory=ActuatorSection)
    calibration: CalibrationSection = field(default_factory=CalibrationSection)
    detector: DetectorSection = field(default_factory=DetectorSection)
    profile: ProfileSection = field(default_factory=ProfileSection)
    plant: PlantSection = field(default_factory=PlantSection)
    gait: GaitSection = field(default_factory=GaitSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    optimize: OptimizeSection = field(default_factory=OptimizeSection)
    inertia: InertiaSection = field(default_factory=InertiaSection)
    seed: int = 20190101
    output_dir: str = "out"

    # model builders -------------------------------------------------------

    def knee_params(self) -> knee.KneeModelParams:
        rho = self.knee.sliding_ratio_rho
        rho = math.inf if rho == "inf" else float(rho)
        return knee.KneeModelParams(self.knee.semi_major_a_mm, self.knee.semi_minor_b_mm, rho,
                                    math.radians(self.knee.theta_max_deg))

    def chain_config(self) -> chain.ChainConfig:
        al = self.chain.alignment
        offset = None
        if al is not None:
            offset = Transform2D(math.radians(al.get("angle_deg", 0.0)), al.get("x_mm", 0.0), al.get("y_mm", 0.0))
        return chain.ChainConfig(
            knee=self.knee_params(),
            joint=mechanism.RollingJointParams(self.joint.roller_diameter_mm),
            thigh_anchors=tuple(tuple(map(float, a)) for a in self.chain.thigh_anchors_mm),
            calf_anchors=tuple(tuple(map(float, a)) for a in self.chain.calf_anchors_mm),
            alignment_offset=offset,
            joint_kind=self.joint.kind,
        )

    def transmission_params(self) -> mechanism.TransmissionParams:
        return mechanism.TransmissionParams(self.transmission.i1, self.transmission.i2)

    def attachment_layout(self) -> statics.AttachmentLayout:
        s = self.statics
        return statics.AttachmentLayout(s.thigh_length_m, s.calf_length_m,
                                        tuple(s.thigh_attachments_m), tuple(s.calf_attachments_m))

    def load_case(self) -> statics.LoadCase:
        s = self.statics
        return statics.LoadCase(s.knee_torque_nm, math.radians(s.knee_angle_deg), s.axial_load_n)

    def actuator_model(self) -> actuation.TorqueCurrentModel:
        return actuation.TorqueCurrentModel(self.actuator.k_nm_per_a, self.actuator.t_f_nm)

    def detector_params(self) -> gait.DetectorParams:
        d = self.detector
        return gait.DetectorParams(d.omega_quiet_dps, d.quiet_window_s, d.omega_active_dps)

    def assist_profile(self) -> gait.AssistProfile:
        p = self.profile
        return gait.AssistProfile(tuple((float(a), float(b)) for a, b in p.curve),
                                  p.scale, p.body_mass_kg, p.torque_cap_nm)

    def plant_params(self) -> actuation.PlantParams:
        return actuation.PlantParams(self.plant.time_constant_s, self.plant.dt_s)

    def mass_layouts(self) -> dict[str, list[mechanism.MassItem]]:
        return {name: [mechanism.MassItem(r["mass_kg"], (r["x_m"], r["y_m"]), r.get("name", ""))
                       for r in rows]
                for name, rows in self.inertia.layouts.items()}

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        """SHA-256 of the analysis inputs; the output location is left out."""
        d = self.to_dict()
        d.pop("output_dir")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


_SECTIONS = {f.name: f.default_factory for f in dataclasses.fields(RunConfig)
             if f.default_factory is not dataclasses.MISSING}


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check_type(path: str, value: Any, annotation: str, problems: list[str]) -> None:
    allowed = [a.strip() for a in annotation.split("|")]
    ok = False
    for a in allowed:
        if a == "None" and value is None:
            ok = True
        elif a == "float" and _is_number(value):
            ok = True
        elif a == "int" and isinstance(value, int) and not isinstance(value, bool):
            ok = True
        elif a == "str" and isinstance(value, str):
            ok = True
        elif a == "list" and isinstance(value, list):
            ok = True
        elif a == "dict" and isinstance(value, dict):
            ok = True
    if not ok:
        problems.append(f"{path}: expected {annotation}, got {type(value).__name__}")


def _build_section(name: str, raw: Any, problems: list[str]):
    cls = _SECTIONS[name]().__class__
    if not isinstance(raw, dict):
        problems.append(f"{name}: expected an object")
        return cls()
    known = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in raw.items():
        if key not in known:
            problems.append(f"{name}.{key}: unknown key")
            continue
        n_before = len(problems)
        _check_type(f"{name}.{key}", value, str(known[key].type), problems)
        if len(problems) == n_before:
            kwargs[key] = float(value) if str(known[key].type) == "float" else value
    return cls(**kwargs)


def from_dict(data: Any) -> RunConfig:
    """Build and validate a config; raises ``ConfigError`` listing every
    problem."""
    problems: list[str] = []
    if not isinstance(data, dict):
        raise ConfigError(["config root must be a JSON object"])
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        if key in _SECTIONS:
            kwargs[key] = _build_section(key, value, problems)
        elif key == "seed":
            if isinstance(value, int) and not isinstance(value, bool) and 0 <= value < 2 ** 64:
                kwargs[key] = value
            else:
                problems.append("seed: expected an integer in [0, 2^64)")
        elif key == "output_dir":
            if isinstance(value, str):
                kwargs[key] = value
            else:
                problems.append("output_dir: expected str")
        else:
            problems.append(f"{key}: unknown key")
    cfg = RunConfig(**kwargs)
    problems += validate(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


def _collect(problems: list[str], label: str, builder) -> Any:
    try:
        return builder()
    except (KneexoError, ValueError, TypeError, KeyError, IndexError) as exc:
        msg = str(exc)
        for part in msg.split("; "):
            problems.append(part if part.startswith(label) else f"{label}: {part}")
        return None


def validate(cfg: RunConfig) -> list[str]:
    """Check every module invariant; returns all violations."""
    p: list[str] = []
    k = cfg.knee
    rho = k.sliding_ratio_rho
    if isinstance(rho, str) and rho != "inf":
        p.append("knee.sliding_ratio_rho: must be a number or 'inf'")
    else:
        _collect(p, "knee", cfg.knee_params)
    if not cfg.joint.roller_diameter_mm >= 0:
        p.append("joint.roller_diameter_mm: must be >= 0 (roller_diameter_D >= 0)")
    if cfg.joint.kind not in chain.JOINT_KINDS:
        p.append(f"joint.kind: must be one of {chain.JOINT_KINDS}")
    for nm in ("thigh_anchors_mm", "calf_anchors_mm"):
        v = getattr(cfg.chain, nm)
        if not (len(v) == 2 and all(isinstance(a, list) and len(a) == 2 and all(map(_is_number, a)) for a in v)):
            p.append(f"chain.{nm}: expected two [x, y] pairs")
        elif v[0] == v[1]:
            p.append(f"chain.{nm}: anchors must be distinct")
    al = cfg.chain.alignment
    if al is not None:
        for key, val in al.items():
            if key not in ("angle_deg", "x_mm", "y_mm"):
                p.append(f"chain.alignment.{key}: unknown key")
            elif not _is_number(val):
                p.append(f"chain.alignment.{key}: expected float")
    if not cfg.transmission.i1 > 0:
        p.append("transmission.i1: must be > 0")
    if not cfg.transmission.i2 >= 0:
        p.append("transmission.i2: must be >= 0")
    s = cfg.statics
    if all(map(_is_number, s.thigh_attachments_m + s.calf_attachments_m)):
        _collect(p, "statics", cfg.attachment_layout)
    else:
        p.append("statics: attachment distances must be numbers")
    if not cfg.actuator.k_nm_per_a > 0:
        p.append("actuator.k_nm_per_a: must be > 0")
    if not cfg.actuator.t_f_nm >= 0:
        p.append("actuator.t_f_nm: must be >= 0")
    _collect(p, "detector", cfg.detector_params)
    if all(isinstance(r, list) and len(r) == 2 and all(map(_is_number, r)) for r in cfg.profile.curve):
        _collect(p, "profile", cfg.assist_profile)
    else:
        p.append("profile.curve: expected [fraction, value] pairs")
    if cfg.profile.phase_mode not in ("phase", "time"):
        p.append("profile.phase_mode: must be 'phase' or 'time'")
    if not cfg.profile.nominal_stance_s > 0:
        p.append("profile.nominal_stance_s: must be > 0")
    _collect(p, "plant", cfg.plant_params)
    if not cfg.gait.n_strides >= 1:
        p.append("gait.n_strides: must be >= 1")
    if not cfg.gait.noise_dps >= 0:
        p.append("gait.noise_dps: must be >= 0")
    if not cfg.gait.sample_rate_hz * cfg.detector.quiet_window_s >= 4:
        p.append("gait.sample_rate_hz: sampling period must be <= detector.quiet_window_s / 4")
    tmax = cfg.knee.theta_max_deg
    sw = cfg.sweep
    if not all(_is_number(d) and d >= 0 for d in sw.diameters_mm) or not sw.diameters_mm:
        p.append("sweep.diameters_mm: expected non-negative numbers")
    if not 5.0 < sw.theta_max_deg <= tmax:
        p.append("sweep.theta_max_deg: must be in (5, knee.theta_max_deg]")
    if not sw.grid_step_deg > 0:
        p.append("sweep.grid_step_deg: must be > 0")
    op = cfg.optimize
    if not 0 <= op.d_min_mm < op.d_max_mm <= 150:
        p.append("optimize: need 0 <= d_min_mm < d_max_mm <= 150")
    if not op.d_step_mm > 0:
        p.append("optimize.d_step_mm: must be > 0")
    if not op.tol_mm > 0:
        p.append("optimize.tol_mm: must be > 0")
    if not op.theta_max_deg or not all(_is_number(t) and 5.0 < t <= tmax for t in op.theta_max_deg):
        p.append("optimize.theta_max_deg: each value must be in (5, knee.theta_max_deg]")
    if not op.grid_step_deg > 0:
        p.append("optimize.grid_step_deg: must be > 0")
    for name, rows in cfg.inertia.layouts.items():
        if not isinstance(rows, list) or not rows:
            p.append(f"inertia.layouts.{name}: expected a non-empty list")
            continue
        for i, r in enumerate(rows):
            if not isinstance(r, dict) or set(r) - {"name", "mass_kg", "x_m", "y_m"} \
                    or not all(_is_number(r.get(key)) for key in ("mass_kg", "x_m", "y_m")):
                p.append(f"inertia.layouts.{name}[{i}]: expected {{name, mass_kg, x_m, y_m}}")
            elif not r["mass_kg"] > 0:
                p.append(f"inertia.layouts.{name}[{i}].mass_kg: must be > 0")
    if not (len(cfg.inertia.point_m) == 2 and all(map(_is_number, cfg.inertia.point_m))):
        p.append("inertia.point_m: expected [x, y]")
    return p


def loads(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from None
    return from_dict(data)


def load_config(path: str | Path) -> RunConfig:
    return loads(Path(path).read_text())


def dumps(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2) + "\n"


def write_config(cfg: RunConfig, path: str | Path) -> None:
    Path(path).write_text(dumps(cfg))
