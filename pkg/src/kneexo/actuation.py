"""Deadband torque-current actuator model, its calibration, and
passive-mode / sine-tracking metrics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CalibrationError, DomainError

PUBLISHED_TORQUE_CONSTANT = 0.62  # Nm/A
PUBLISHED_FRICTION_TORQUE = 0.5  # Nm
PUBLISHED_R_SQUARED = 0.9614
# Hardware measurements; not reproducible without the bench.
PUBLISHED_SINE_RMS_ERROR_NM = 0.88  # 10 Hz, +/-15 Nm reference
PUBLISHED_PASSIVE_RMS_NM = 1.03
PUBLISHED_PASSIVE_MAX_NM = 3.33

MAX_BRANCH_ROUNDS = 20


@dataclass(frozen=True)
class TorqueCurrentModel:
    k: float = PUBLISHED_TORQUE_CONSTANT
    T_f: float = PUBLISHED_FRICTION_TORQUE

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError("torque constant k must be > 0")
        if not self.T_f >= 0:
            raise DomainError("friction torque T_f must be >= 0")

    @property
    def deadband(self) -> float:
        return self.T_f / self.k


PUBLISHED_MODEL = TorqueCurrentModel(PUBLISHED_TORQUE_CONSTANT, PUBLISHED_FRICTION_TORQUE)


@dataclass(frozen=True)
class CalibrationSample:
    current_I: float
    torque_T: float


@dataclass(frozen=True)
class PassiveTrace:
    t: np.ndarray
    torque: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        tq = np.asarray(self.torque, dtype=float)
        if t.shape != tq.shape or t.ndim != 1:
            raise ValueError("time and torque must be 1-D arrays of equal length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("passive trace timestamps must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "torque", tq)


def torque_from_current(model: TorqueCurrentModel, I):
    """Output torque for motor current ``I`` (scalar or array)."""
    I_arr = np.asarray(I, dtype=float)
    T = np.where(I_arr > model.deadband, model.k * I_arr - model.T_f,
                 np.where(I_arr < -model.deadband, model.k * I_arr + model.T_f, 0.0))
    return float(T) if T.ndim == 0 else T


def current_for_torque(model: TorqueCurrentModel, T_des):
    """Smallest-magnitude current producing ``T_des``."""
    T = np.asarray(T_des, dtype=float)
    I = (T + np.sign(T) * model.T_f) / model.k
    return float(I) if I.ndim == 0 else I


def _fit_branches(I: np.ndarray, T: np.ndarray) -> tuple[float, float]:
    X = np.column_stack([I, -np.sign(I)])
    if np.linalg.matrix_rank(X) < 2:
        raise CalibrationError("ill-conditioned calibration: current spread too narrow")
    (k, T_f), *_ = np.linalg.lstsq(X, T, rcond=None)
    return float(k), float(T_f)


def calibrate(samples: Sequence[CalibrationSample]) -> tuple[TorqueCurrentModel, float]:
    """Fit (k, T_f) by iterated branch assignment.

    Start with no deadband, fit ``T = k I - T_f sign(I)`` on every sample with
    nonzero current, drop samples now inside the fitted deadband, refit, and
    repeat until the assignment stops changing. R^2 is over the sloped-branch
    samples of the final assignment.
    """
    if len(samples) < 4:
        raise CalibrationError("calibration needs at least 4 samples")
    I = np.array([s.current_I for s in samples], dtype=float)
    T = np.array([s.torque_T for s in samples], dtype=float)
    if not (np.all(np.isfinite(I)) and np.all(np.isfinite(T))):
        raise CalibrationError("calibration samples must be finite")
    if not (np.any(I > 0) and np.any(I < 0)):
        raise CalibrationError("ill-conditioned calibration: need currents of both signs")

    active = I != 0.0
    k, T_f = 0.0, 0.0
    for _ in range(MAX_BRANCH_ROUNDS):
        if not (np.any(I[active] > 0) and np.any(I[active] < 0)):
            raise CalibrationError("ill-conditioned calibration: a branch has no samples")
        k, T_f = _fit_branches(I[active], T[active])
        if k <= 0:
            raise CalibrationError("fitted torque constant is not positive")
        T_f = max(T_f, 0.0)
        new_active = np.abs(I) > T_f / k
        if np.array_equal(new_active, active):
            break
        active = new_active

    model = TorqueCurrentModel(k, T_f)
    Ta = T[active]
    pred = torque_from_current(model, I[active])
    ss_res = float(np.sum((Ta - pred) ** 2))
    ss_tot = float(np.sum((Ta - Ta.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return model, r2


def synthetic_calibration_samples(model: TorqueCurrentModel, n: int, noise_sigma: float,
                                  seed: int, current_limit: float = 10.0) -> list[CalibrationSample]:
    """Bench-style samples: currents uniform in +/-``current_limit`` A,
    Gaussian torque noise."""
    rng = np.random.default_rng(seed)
    I = rng.uniform(-current_limit, current_limit, size=n)
    T = torque_from_current(model, I) + rng.normal(0.0, noise_sigma, size=n)
    return [CalibrationSample(float(i), float(t)) for i, t in zip(I, T)]


def read_calibration_csv(path: str | Path) -> list[CalibrationSample]:
    """Read ``current_a,torque_nm`` rows; lines starting with ``#`` are skipped."""
    with open(path, newline="") as fh:
        rows = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(rows)
    if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != ["current_a", "torque_nm"]:
        raise CalibrationError(f"{path}: header must be 'current_a,torque_nm'")
    out = []
    for lineno, row in enumerate(reader, start=2):
        try:
            out.append(CalibrationSample(float(row["current_a"]), float(row["torque_nm"])))
        except (TypeError, ValueError) as exc:
            raise CalibrationError(f"{path}: bad row {lineno}: {exc}") from None
    return out


def passive_stats(trace: PassiveTrace) -> tuple[float, float]:
    """RMS and peak magnitude of the resistive torque (N m)."""
    if trace.torque.size < 2:
        raise ValueError("passive trace needs at least 2 samples")
    tq = trace.torque
    return float(np.sqrt(np.mean(tq ** 2))), float(np.max(np.abs(tq)))


def reference_passive_trace(n: int = 1000, duration: float = 10.0) -> PassiveTrace:
    """Synthetic no-load trace whose RMS and peak equal the published
    hardware figures by construction: one spike at the peak value and a
    sinusoid scaled so the overall RMS comes out exactly."""
    t = np.linspace(0.0, duration, n, endpoint=False)
    base = np.sin(2 * np.pi * 0.8 * t)
    spike = n // 3
    base[spike] = 0.0
    rest = n * PUBLISHED_PASSIVE_RMS_NM ** 2 - PUBLISHED_PASSIVE_MAX_NM ** 2
    amp = math.sqrt(rest / float(np.sum(base ** 2)))
    tq = amp * base
    tq[spike] = PUBLISHED_PASSIVE_MAX_NM
    return PassiveTrace(t, tq)


@dataclass(frozen=True)
class PlantParams:
    """First-order current loop: ``dI/dt = (I_cmd - I) / time_constant``."""

    time_constant: float = 0.005
    dt: float = 0.001

    def __post_init__(self):
        if not self.time_constant >= 0:
            raise DomainError("plant.time_constant must be >= 0")
        if not self.dt > 0:
            raise DomainError("plant.dt must be > 0")


def simulate_current_loop(command: np.ndarray, plant: PlantParams) -> np.ndarray:
    """Exact zero-order-hold response of the current loop to ``command``
    sampled every ``plant.dt``; starts at rest."""
    alpha = 1.0 if plant.time_constant == 0 else 1.0 - math.exp(-plant.dt / plant.time_constant)
    out = np.empty_like(command, dtype=float)
    I = 0.0
    for n, c in enumerate(command):
        I += alpha * (c - I)
        out[n] = I
    return out


def simulate_sine_tracking(model: TorqueCurrentModel = PUBLISHED_MODEL, plant: PlantParams = PlantParams(),
                           amplitude: float = 15.0, freq: float = 10.0, duration: float = 1.0):
    """Feedforward tracking of a sine torque reference. Returns
    ``(t, desired, actual, rms_error)``."""
    t = np.arange(0.0, duration, plant.dt)
    desired = amplitude * np.sin(2 * np.pi * freq * t)
    current = simulate_current_loop(current_for_torque(model, desired), plant)
    actual = torque_from_current(model, current)
    rms = float(np.sqrt(np.mean((actual - desired) ** 2)))
    return t, desired, actual, rms

