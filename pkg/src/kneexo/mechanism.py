"""Exoskeleton-side models: rolling knee joint, double-hinge torque split,
two-stage belt reduction and point-mass inertia."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .geometry import Transform2D

# Published design figures, kept for reference and reporting.
PUBLISHED_ROLLER_DIAMETER_MM = 64.0
PUBLISHED_STAGE_RATIOS = (4.0, 3.43)
PUBLISHED_TOTAL_REDUCTION = 8.85  # rounded; exact product of the stage ratios is 8.86
PUBLISHED_PEAK_TORQUE_NM = 15.93
PUBLISHED_RATED_TORQUE_NM = 5.99
PUBLISHED_INERTIA_REDUCTION_KGM2 = 0.074

# Motor-side torques back-derived from the published outputs and 8.85.
MOTOR_PEAK_TORQUE_NM = PUBLISHED_PEAK_TORQUE_NM / PUBLISHED_TOTAL_REDUCTION
MOTOR_RATED_TORQUE_NM = PUBLISHED_RATED_TORQUE_NM / PUBLISHED_TOTAL_REDUCTION


@dataclass(frozen=True)
class RollingJointParams:
    roller_diameter_D: float = PUBLISHED_ROLLER_DIAMETER_MM

    def __post_init__(self):
        if not self.roller_diameter_D >= 0:
            raise DomainError("joint.roller_diameter_D must be >= 0")


@dataclass(frozen=True)
class TransmissionParams:
    i1: float = PUBLISHED_STAGE_RATIOS[0]
    i2: float = PUBLISHED_STAGE_RATIOS[1]

    def __post_init__(self):
        problems = []
        if not self.i1 > 0:
            problems.append("transmission.i1 must be > 0")
        if not self.i2 >= 0:
            problems.append("transmission.i2 must be >= 0")
        if problems:
            raise DomainError("; ".join(problems))


@dataclass(frozen=True)
class HingeAngles:
    alpha: float
    beta: float

    def __post_init__(self):
        if abs(self.alpha - self.beta) > math.pi / 2 + 1e-12:
            raise DomainError("|alpha - beta| exceeds the 90 deg hard stop")


@dataclass(frozen=True)
class MassItem:
    mass: float
    position: tuple[float, float]
    name: str = ""

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"mass item {self.name!r}: mass must be > 0")


def rolling_joint_pose(params: RollingJointParams, phi: float) -> Transform2D:
    """Pose of the calf-side roller frame in the thigh-side roller frame.

    Both frames have their origin at the roller contact point of the
    reference pose; the thigh roller centre sits at ``(0, D/2)`` and the calf
    roller centre at ``(0, -D/2)``. The gears enforce pure rolling of equal
    circles, so the calf roller centre orbits the thigh roller centre by
    ``phi/2`` while the calf frame turns by ``phi``. ``D = 0`` is a revolute
    joint at the origin.
    """
    if abs(phi) > math.radians(150.0) + 1e-12:
        raise DomainError("rolling joint angle beyond +/-150 deg")
    D = params.roller_diameter_D
    if D == 0.0:
        return Transform2D(phi, 0.0, 0.0)
    h, r = 0.5 * phi, 0.5 * D
    ch, sh = math.cos(h), math.sin(h)
    c, s = math.cos(phi), math.sin(phi)
    # thigh centre + orbit offset - rotated calf centre
    x = D * sh - r * s
    y = r - D * ch + r * c
    return Transform2D(phi, x, y)


def rolling_joint_contact(params: RollingJointParams, phi: float) -> np.ndarray:
    """Current roller contact point in the thigh-side roller frame."""
    r = 0.5 * params.roller_diameter_D
    h = 0.5 * phi
    return np.array([r * math.sin(h), r - r * math.cos(h)])


def hinge_decompose(tau_s: float, angles: HingeAngles) -> tuple[float, float]:
    """Split the sagittal torque across the double hinge into the part about
    the knee axis and the part twisting the calf."""
    d = angles.alpha - angles.beta
    return tau_s * math.cos(d), tau_s * math.sin(d)


def total_reduction(params: TransmissionParams) -> float:
    """Two-stage belt reduction with the second stage acting through the
    rolling joint, lever arm (R2 + r2) / 2."""
    return params.i1 * (params.i2 + 1.0) / 2.0


def output_torque(motor_torque: float, params: TransmissionParams) -> float:
    if not math.isfinite(motor_torque):
        raise DomainError("motor torque must be finite")
    return motor_torque * total_reduction(params)


def reflected_inertia(motor_inertia: float, params: TransmissionParams) -> float:
    return motor_inertia * total_reduction(params) ** 2


def inertia_about_point(items: Sequence[MassItem], point: Sequence[float] = (0.0, 0.0)) -> float:
    """Point-mass moment of inertia (kg m^2) about ``point`` in the sagittal plane."""
    if len(items) == 0:
        raise ValueError("inertia_about_point needs at least one mass item")
    px, py = float(point[0]), float(point[1])
    return float(sum(it.mass * ((it.position[0] - px) ** 2 + (it.position[1] - py) ** 2) for it in items))


def mass_centroid(items: Sequence[MassItem]) -> np.ndarray:
    m = np.array([it.mass for it in items])
    pos = np.array([it.position for it in items], dtype=float)
    return (m[:, None] * pos).sum(axis=0) / m.sum()


# Assumed mass layouts about the human CoM (x anterior, y up, metres). The
# published 3.2 kg total is matched; the split between components is a
# repo assumption because no mass table was published.
_FRAMES = [
    MassItem(0.60, (0.06, -0.30), "thigh frame + brace"),
    MassItem(0.50, (0.06, -0.50), "rolling joint + S2 belt"),
    MassItem(0.65, (0.06, -0.72), "calf frame + brace"),
    MassItem(0.30, (0.00, -0.05), "waist belt"),
]

CONVENTIONAL_LAYOUT = _FRAMES + [
    MassItem(0.80, (0.07, -0.33), "motor on leg unit"),
    MassItem(0.25, (0.07, -0.33), "battery on leg unit"),
    MassItem(0.10, (0.07, -0.33), "processor on leg unit"),
]

DISTRIBUTED_LAYOUT = _FRAMES + [
    MassItem(0.80, (0.07, -0.25), "motor at proximal thigh"),
    MassItem(0.25, (0.00, -0.05), "battery at waist"),
    MassItem(0.10, (0.00, -0.05), "processor at waist"),
]
