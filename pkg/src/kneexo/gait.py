"""Stance detection from foot angular velocity, stance-phase assistive
torque profile, and feedforward torque-tracking simulation."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .actuation import (PUBLISHED_MODEL, PlantParams, TorqueCurrentModel, current_for_torque,
                        simulate_current_loop, torque_from_current)
from .errors import DomainError, StreamError

STANCE_START = "stance_start"
STANCE_END = "stance_end"

PUBLISHED_SUBJECT_RMS_NM = 0.31  # hardware, three subjects; reference only
PUBLISHED_PEAK_ASSIST_NM = 16.0

# Normalised knee extension moment over the detected stance window (N m/kg).
# Repo default shape: peak 0.5 N m/kg at 15 % stance, back to zero by 45 %.
DEFAULT_EXTENSION_MOMENT = (
    (0.00, 0.00), (0.05, 0.20), (0.10, 0.42), (0.15, 0.50), (0.20, 0.46),
    (0.25, 0.36), (0.30, 0.24), (0.35, 0.13), (0.40, 0.05), (0.45, 0.00),
    (1.00, 0.00),
)


@dataclass(frozen=True)
class ImuSample:
    t: float
    omega: float  # deg/s


@dataclass(frozen=True)
class DetectorParams:
    omega_quiet: float = 10.0
    quiet_window: float = 0.08
    omega_active: float = 50.0

    def __post_init__(self):
        problems = []
        if not self.omega_quiet < self.omega_active:
            problems.append("detector.omega_quiet must be < omega_active")
        if not self.quiet_window > 0:
            problems.append("detector.quiet_window must be > 0")
        if problems:
            raise DomainError("; ".join(problems))


@dataclass(frozen=True)
class GaitEvent:
    kind: str
    t: float


class StanceDetector:
    """Two-state machine. Seeking: a stance starts once |omega| has stayed
    below ``omega_quiet`` for a full ``quiet_window``. In stance: it ends at
    the first sample with |omega| above ``omega_active``."""

    def __init__(self, params: DetectorParams = DetectorParams()):
        self.params = params
        self.in_stance = False
        self._quiet_since: float | None = None
        self._last_t = -math.inf

    def update(self, t: float, omega: float) -> GaitEvent | None:
        if not t > self._last_t:
            raise StreamError(f"timestamps must be strictly increasing (t={t} after {self._last_t})")
        self._last_t = t
        p = self.params
        if self.in_stance:
            if abs(omega) > p.omega_active:
                self.in_stance = False
                self._quiet_since = None
                return GaitEvent(STANCE_END, t)
            return None
        if abs(omega) < p.omega_quiet:
            if self._quiet_since is None:
                self._quiet_since = t
            if t - self._quiet_since >= p.quiet_window - 1e-9:
                self.in_stance = True
                return GaitEvent(STANCE_START, t)
        else:
            self._quiet_since = None
        return None


def _as_arrays(stream) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(stream, tuple) and len(stream) == 2:
        t, w = stream
        return np.asarray(t, dtype=float), np.asarray(w, dtype=float)
    samples = list(stream)
    return (np.array([s.t for s in samples], dtype=float),
            np.array([s.omega for s in samples], dtype=float))


def detect_events(stream: Iterable[ImuSample] | tuple, params: DetectorParams = DetectorParams()) -> list[GaitEvent]:
    """Run the detector over a whole stream (``ImuSample``s or a ``(t, omega)``
    pair of arrays)."""
    t, w = _as_arrays(stream)
    if t.size >= 2:
        dt = np.diff(t)
        if np.any(dt <= 0):
            raise StreamError("timestamps must be strictly increasing")
        if dt.max() > params.quiet_window / 4 + 1e-12:
            raise StreamError("sampling period exceeds quiet_window / 4")
    det = StanceDetector(params)
    events = []
    for ti, wi in zip(t.tolist(), w.tolist()):
        ev = det.update(ti, wi)
        if ev is not None:
            events.append(ev)
    return events


@dataclass(frozen=True)
class AssistProfile:
    normalized_curve: tuple[tuple[float, float], ...] = DEFAULT_EXTENSION_MOMENT
    scale: float = 0.40
    body_mass: float = 80.0
    torque_cap: float = 16.0

    def __post_init__(self):
        problems = []
        xs = [p[0] for p in self.normalized_curve]
        ys = [p[1] for p in self.normalized_curve]
        if len(xs) < 2 or any(b <= a for a, b in zip(xs, xs[1:])):
            problems.append("profile.normalized_curve fractions must be strictly increasing")
        elif xs[0] != 0.0 or xs[-1] != 1.0:
            problems.append("profile.normalized_curve must span stance fraction 0..1")
        if any(y < 0 for y in ys):
            problems.append("profile.normalized_curve values must be >= 0")
        if not 0 < self.scale <= 1:
            problems.append("profile.scale must be in (0, 1]")
        if not self.body_mass > 0:
            problems.append("profile.body_mass must be > 0")
        if not self.torque_cap > 0:
            problems.append("profile.torque_cap must be > 0")
        if problems:
            raise DomainError("; ".join(problems))


def desired_torque(profile: AssistProfile, stance_fraction):
    """Assistive torque (N m) at a stance fraction in [0, 1]."""
    s = np.asarray(stance_fraction, dtype=float)
    if np.any(s < 0) or np.any(s > 1) or np.any(~np.isfinite(s)):
        raise ValueError("stance fraction must lie in [0, 1]")
    xs, ys = zip(*profile.normalized_curve)
    tq = np.interp(s, xs, ys) * profile.scale * profile.body_mass
    tq = np.minimum(tq, profile.torque_cap)
    return float(tq) if tq.ndim == 0 else tq


class StancePhaseEstimator:
    """Online stance fraction: elapsed time over the trailing mean of the
    last ``window`` stance durations."""

    def __init__(self, window: int = 3, initial_duration: float = 0.6):
        self.durations: deque[float] = deque(maxlen=window)
        self.initial = initial_duration

    @property
    def expected(self) -> float:
        return sum(self.durations) / len(self.durations) if self.durations else self.initial

    def record(self, duration: float) -> None:
        self.durations.append(duration)


@dataclass
class TrackingResult:
    t: np.ndarray
    desired: np.ndarray
    actual: np.ndarray
    in_stance: np.ndarray
    rms_error: float


def stance_intervals(events: Sequence[GaitEvent], t_end: float) -> list[tuple[float, float]]:
    out = []
    start = None
    last_t = -math.inf
    for ev in events:
        if ev.t <= last_t:
            raise StreamError("events must have increasing timestamps")
        last_t = ev.t
        if ev.kind == STANCE_START:
            if start is not None:
                raise StreamError("two stance_start events in a row")
            start = ev.t
        elif ev.kind == STANCE_END:
            if start is None:
                raise StreamError("stance_end without a stance_start")
            out.append((start, ev.t))
            start = None
        else:
            raise StreamError(f"unknown event kind {ev.kind!r}")
    if start is not None and start < t_end:
        out.append((start, t_end))
    return out


def simulate_tracking(profile: AssistProfile, events: Sequence[GaitEvent], t_end: float,
                      model: TorqueCurrentModel = PUBLISHED_MODEL, plant: PlantParams = PlantParams(),
                      phase_mode: str = "phase", nominal_duration: float = 0.6,
                      phase_window: int = 3) -> TrackingResult:
    """Trigger the profile on each detected stance, command current by
    feedforward inversion of the actuator model, pass it through the
    current loop and compare output torque with the reference.

    ``phase_mode="phase"`` scales elapsed stance time by the trailing mean
    stance duration; ``"time"`` uses the fixed ``nominal_duration``.
    """
    if phase_mode not in ("phase", "time"):
        raise DomainError("phase_mode must be 'phase' or 'time'")
    n = int(math.floor(t_end / plant.dt + 1e-9)) + 1
    t = np.arange(n) * plant.dt
    desired = np.zeros(n)
    in_stance = np.zeros(n, dtype=bool)
    est = StancePhaseEstimator(phase_window, nominal_duration)
    for start, end in stance_intervals(events, t_end):
        mask = (t >= start) & (t < end)
        duration = est.expected if phase_mode == "phase" else nominal_duration
        frac = np.clip((t[mask] - start) / duration, 0.0, 1.0)
        desired[mask] = desired_torque(profile, frac)
        in_stance |= mask
        est.record(end - start)
    current = simulate_current_loop(current_for_torque(model, desired), plant)
    actual = torque_from_current(model, current)
    err = (actual - desired)[in_stance]
    rms = float(np.sqrt(np.mean(err ** 2))) if err.size else 0.0
    return TrackingResult(t, desired, actual, in_stance, rms)


@dataclass
class SyntheticGait:
    t: np.ndarray
    omega: np.ndarray
    foot_flat: np.ndarray  # true stance onsets, s
    heel_off: np.ndarray  # true stance ends, s
    seed: int = 0
    meta: dict = field(default_factory=dict)


def synthetic_gait(n_strides: int, seed: int, noise_sigma: float = 2.0, fs: float = 200.0,
                   swing_amplitude: tuple[float, float] = (370.0, 430.0),
                   swing_duration: tuple[float, float] = (0.42, 0.48),
                   stance_duration: tuple[float, float] = (0.50, 0.65)) -> SyntheticGait:
    """Labelled foot-gyroscope corpus.

    Each stride is a swing (one full sine period of random amplitude) followed
    by a flat-foot stance at zero angular velocity; a final swing closes the
    last stance. Gaussian noise is added everywhere.
    """
    rng = np.random.default_rng(seed)
    segments = []  # (t0, t1, amplitude or None)
    t0 = 0.0
    foot_flat, heel_off = [], []
    for _ in range(n_strides):
        sw = rng.uniform(*swing_duration)
        amp = rng.uniform(*swing_amplitude)
        segments.append((t0, t0 + sw, amp))
        t0 += sw
        st = rng.uniform(*stance_duration)
        segments.append((t0, t0 + st, None))
        foot_flat.append(t0)
        heel_off.append(t0 + st)
        t0 += st
    sw = rng.uniform(*swing_duration)
    amp = rng.uniform(*swing_amplitude)
    segments.append((t0, t0 + sw, amp))
    t_end = t0 + sw

    t = np.arange(int(math.floor(t_end * fs))) / fs
    omega = np.zeros_like(t)
    bounds = np.array([s[0] for s in segments])
    idx = np.searchsorted(bounds, t, side="right") - 1
    for k, (a, b, amp) in enumerate(segments):
        if amp is None:
            continue
        m = idx == k
        omega[m] = amp * np.sin(2 * np.pi * (t[m] - a) / (b - a))
    omega += rng.normal(0.0, noise_sigma, size=t.size)
    return SyntheticGait(t, omega, np.array(foot_flat), np.array(heel_off), seed,
                         {"fs": fs, "noise_sigma": noise_sigma, "n_strides": n_strides})


def score_events(events: Sequence[GaitEvent], gait: SyntheticGait, params: DetectorParams,
                 tolerance: float = 0.02) -> dict:
    """Match detections to labels one-to-one within ``tolerance``.

    A stance_start label sits at foot-flat plus ``quiet_window`` (the
    detector's confirmation latency by design); a stance_end label sits at
    heel-off.
    """
    labels = {STANCE_START: list(gait.foot_flat + params.quiet_window),
              STANCE_END: list(gait.heel_off)}
    tp = fp = 0
    errors = []
    used = {k: [False] * len(v) for k, v in labels.items()}
    for ev in events:
        cands = labels[ev.kind]
        best, best_d = None, math.inf
        for i, lt in enumerate(cands):
            d = abs(ev.t - lt)
            if not used[ev.kind][i] and d < best_d:
                best, best_d = i, d
        if best is not None and best_d <= tolerance:
            used[ev.kind][best] = True
            tp += 1
            errors.append(best_d)
        else:
            fp += 1
    fn = sum(not u for v in used.values() for u in v)
    f1 = 2 * tp / (2 * tp + fp + fn) if (tp + fp + fn) else 1.0
    return {"tp": tp, "fp": fp, "fn": fn, "f1": f1,
            "max_timing_error": max(errors) if errors else 0.0}
