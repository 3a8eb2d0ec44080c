"""Biological knee: an elliptical femoral condyle rolling and sliding on a
flat tibial plateau.

The tibia frame has its origin at the contact point of the standing pose and
the plateau along its x-axis. The femur frame coincides with it at zero
flexion; the condyle ellipse is centred at ``(0, b)`` in the femur frame with
its semi-major axis ``a`` anterior-posterior. Flexion rotates the femur
counter-clockwise relative to the tibia.

The contact point travels an arc length ``sigma`` over the condyle surface.
Of that, a fraction ``rho / (1 + rho)`` is rolled (the contact advances the
same distance posteriorly along the plateau) and the rest is slip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ellipeinc

from .errors import DomainError
from .geometry import Transform2D, icr, inverse

PURE_ROLLING = math.inf

# Repo defaults, not values from any published knee fit.
DEFAULT_SEMI_MAJOR_MM = 32.0
DEFAULT_SEMI_MINOR_MM = 25.0
DEFAULT_SLIDING_RATIO = 2.0
DEFAULT_THETA_MAX = math.radians(150.0)


@dataclass(frozen=True)
class KneeModelParams:
    semi_major_a: float = DEFAULT_SEMI_MAJOR_MM
    semi_minor_b: float = DEFAULT_SEMI_MINOR_MM
    sliding_ratio_rho: float = DEFAULT_SLIDING_RATIO
    theta_max: float = DEFAULT_THETA_MAX

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise DomainError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if not self.semi_minor_b > 0:
            out.append("knee.semi_minor_b must be > 0")
        if not self.semi_major_a >= self.semi_minor_b:
            out.append("knee.semi_major_a must be >= semi_minor_b")
        if not self.sliding_ratio_rho >= 0:
            out.append("knee.sliding_ratio_rho must be >= 0")
        if not 0 < self.theta_max <= math.radians(150.0) + 1e-12:
            out.append("knee.theta_max must be in (0, 150] deg")
        return out

    @property
    def rolled_fraction(self) -> float:
        rho = self.sliding_ratio_rho
        return 1.0 if math.isinf(rho) else rho / (1.0 + rho)


def _contact_parameter(a: float, b: float, theta: float) -> float:
    # ellipse point where the outward normal, rotated by theta, points -y
    return math.atan2(-a * math.sin(theta), b * math.cos(theta))


def condyle_arc_length(a: float, b: float, t: float) -> float:
    """Arc length of the condyle ellipse from the standing contact (t = 0) to
    parameter ``t``; always non-negative."""
    if a == b:
        return a * abs(t)
    m = 1.0 - (b * b) / (a * a)
    return abs(a * float(ellipeinc(t, m)))


def _check_theta(params: KneeModelParams, theta: float) -> None:
    if not (0.0 <= theta <= params.theta_max + 1e-12):
        raise DomainError(
            f"theta={math.degrees(theta):.6g} deg outside [0, {math.degrees(params.theta_max):.6g}] deg"
        )


@lru_cache(maxsize=65536)
def _femur_pose(a: float, b: float, rolled: float, theta: float) -> Transform2D:
    t = _contact_parameter(a, b, theta)
    sigma = condyle_arc_length(a, b, t)
    s = -rolled * sigma
    ex, ey = a * math.sin(t), b - b * math.cos(t)
    c, sn = math.cos(theta), math.sin(theta)
    return Transform2D(theta, s - (c * ex - sn * ey), -(sn * ex + c * ey))


def femur_pose(params: KneeModelParams, theta: float) -> Transform2D:
    """Pose of the femur frame in the tibia frame at flexion ``theta`` (rad)."""
    _check_theta(params, theta)
    return _femur_pose(params.semi_major_a, params.semi_minor_b, params.rolled_fraction, float(theta))


def tibia_pose(params: KneeModelParams, theta: float) -> Transform2D:
    """Pose of the tibia frame in the femur frame (thigh taken as ground)."""
    return inverse(femur_pose(params, theta))


def contact_state(params: KneeModelParams, theta: float) -> dict:
    """Contact bookkeeping at ``theta``: condyle parameter, condyle arc
    length, plateau position, rolled and slid distances (mm)."""
    _check_theta(params, theta)
    a, b = params.semi_major_a, params.semi_minor_b
    t = _contact_parameter(a, b, theta)
    sigma = condyle_arc_length(a, b, t)
    rolled = params.rolled_fraction * sigma
    return {"t": t, "arc": sigma, "plateau_x": -rolled, "rolled": rolled, "slid": sigma - rolled}


def radius_of_curvature(a: float, b: float, t: float) -> float:
    return (a * a * math.cos(t) ** 2 + b * b * math.sin(t) ** 2) ** 1.5 / (a * b)


def analytic_icr(params: KneeModelParams, theta: float) -> np.ndarray:
    """Closed-form ICR in the tibia frame.

    It lies on the contact normal, above the contact point by the slip
    fraction of the local condyle radius of curvature.
    """
    cs = contact_state(params, theta)
    rc = radius_of_curvature(params.semi_major_a, params.semi_minor_b, cs["t"])
    return np.array([cs["plateau_x"], (1.0 - params.rolled_fraction) * rc])


def extension_icr(params: KneeModelParams) -> np.ndarray:
    """ICR at full extension; the default placement of the exoskeleton joint."""
    return analytic_icr(params, 0.0)


def icr_trajectory(params: KneeModelParams, thetas) -> np.ndarray:
    """ICR (tibia frame, mm) at each interior point of ``thetas``, from
    central differences of the pose field. Returns shape ``(n - 2, 2)``."""
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 1 or thetas.size < 3:
        raise ValueError("icr_trajectory needs at least 3 grid points")
    if np.any(np.diff(thetas) <= 0):
        raise ValueError("theta grid must be strictly increasing")
    poses = [femur_pose(params, float(th)) for th in thetas]
    out = np.empty((thetas.size - 2, 2))
    for i in range(1, thetas.size - 1):
        out[i - 1] = icr(poses[i - 1], poses[i], poses[i + 1], thetas[i + 1] - thetas[i - 1])
    return out
