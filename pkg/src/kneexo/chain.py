"""Closed kinematic chain of leg and exoskeleton in the sagittal plane.

Thigh is ground. The loop runs thigh -> knee -> shank -> calf attachments ->
calf frame -> rolling joint -> thigh frame -> thigh attachments -> thigh.
Each exo frame rides on its segment through two parallel prismatic
attachments along the segment axis (+y of the femur/tibia frame), so the
frame can only translate along the segment: by ``f`` on the thigh and ``g``
on the shank, positive toward proximal. Rotational closure fixes the exo
joint angle at ``-theta``; translational closure leaves two equations in
``(f, g)`` that Newton's method solves. At full extension the thigh and shank
axes are collinear and the pair of equations is singular, which is why the
misalignment factor is evaluated from 5 deg onward.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, SingularityError, SolverError
from .geometry import Transform2D, compose, inverse
from .knee import KneeModelParams, extension_icr, tibia_pose
from .mechanism import PUBLISHED_ROLLER_DIAMETER_MM, RollingJointParams, rolling_joint_pose

THETA_MIN = math.radians(5.0)
RESIDUAL_TOL_MM = 1e-9
MAX_ITER = 50
FD_REL_STEP = 1e-6

JOINT_KINDS = ("rolling", "knee_replica")


@dataclass(frozen=True)
class ChainConfig:
    """One simulated leg/exoskeleton pair.

    Anchors are attachment centres in the segment frame at the reference
    pose (mm). ``alignment_offset`` is the pose of the exo joint frame (the
    roller contact point) relative to the knee reference frame; ``None``
    places it at the knee ICR at full extension.
    ``joint_kind="knee_replica"`` swaps the rolling joint for a joint that
    copies the knee kinematics exactly (the matched chain).
    """

    knee: KneeModelParams = field(default_factory=KneeModelParams)
    joint: RollingJointParams = field(default_factory=RollingJointParams)
    thigh_anchors: tuple[tuple[float, float], tuple[float, float]] = ((0.0, 100.0), (0.0, 300.0))
    calf_anchors: tuple[tuple[float, float], tuple[float, float]] = ((0.0, -100.0), (0.0, -330.0))
    alignment_offset: Transform2D | None = None
    joint_kind: str = "rolling"

    def __post_init__(self):
        problems = []
        for name, pair in (("thigh_anchors", self.thigh_anchors), ("calf_anchors", self.calf_anchors)):
            if len(pair) != 2:
                problems.append(f"chain.{name} needs exactly 2 anchors")
            elif tuple(pair[0]) == tuple(pair[1]):
                problems.append(f"chain.{name} must be distinct")
        if self.joint_kind not in JOINT_KINDS:
            problems.append(f"chain.joint_kind must be one of {JOINT_KINDS}")
        if problems:
            raise DomainError("; ".join(problems))

    @property
    def alignment(self) -> Transform2D:
        if self.alignment_offset is not None:
            return self.alignment_offset
        x, y = extension_icr(self.knee)
        return Transform2D(0.0, float(x), float(y))

    def with_diameter(self, D: float) -> "ChainConfig":
        return replace(self, joint=RollingJointParams(D))

    @classmethod
    def matched(cls, knee: KneeModelParams | None = None) -> "ChainConfig":
        return cls(knee=knee or KneeModelParams(), alignment_offset=Transform2D(), joint_kind="knee_replica")


@dataclass(frozen=True)
class ChainState:
    theta: float
    f: float
    g: float
    residual: float
    iterations: int = 0


@dataclass
class MisalignmentResult:
    D_star: float
    phi_star: float
    phi_baseline: float
    reduction: float
    theta_max: float
    phi_reference: float = math.nan  # at the built 64 mm roller, when in range
    scan: list[tuple[float, float]] = field(default_factory=list)
    degenerate: bool = False


def exo_joint_pose(config: ChainConfig, phi: float) -> Transform2D:
    if config.joint_kind == "knee_replica":
        return tibia_pose(config.knee, -phi)
    return rolling_joint_pose(config.joint, phi)


def _closure_error(config: ChainConfig, theta: float, f: float, g: float,
                   shank: Transform2D, joint: Transform2D) -> Transform2D:
    o = config.alignment
    left = compose(compose(Transform2D(0.0, 0.0, f), o), joint)
    right = compose(compose(shank, Transform2D(0.0, 0.0, g)), o)
    return compose(inverse(left), right)


def loop_residual(config: ChainConfig, theta: float, f: float, g: float) -> np.ndarray:
    """Translational mismatch (mm) of the open loop at slides ``(f, g)``."""
    shank = tibia_pose(config.knee, theta)
    joint = exo_joint_pose(config, -theta)
    e = _closure_error(config, theta, f, g, shank, joint)
    return np.array([e.x, e.y])


def _anchor_slides(config: ChainConfig, theta: float, f: float, g: float,
                   shank: Transform2D, joint: Transform2D) -> list[tuple[float, float]]:
    """Slide and lateral offset of every anchor, each measured through the
    exo side of the loop and expressed in its own segment frame."""
    o = config.alignment
    thigh_frame = compose(Transform2D(0.0, 0.0, f), o)
    calf_frame_via_exo = compose(thigh_frame, joint)
    to_shank = inverse(shank)
    out = []
    for ax, ay in config.thigh_anchors:
        lx, ly = inverse(o).apply_xy(ax, ay)
        wx, wy = thigh_frame.apply_xy(lx, ly)
        out.append((wy - ay, wx - ax))
    for ax, ay in config.calf_anchors:
        lx, ly = inverse(o).apply_xy(ax, ay)
        wx, wy = to_shank.apply_xy(*calf_frame_via_exo.apply_xy(lx, ly))
        out.append((wy - ay, wx - ax))
    return out


def _check_theta(config: ChainConfig, theta: float) -> None:
    if not (THETA_MIN - 1e-12 <= theta <= config.knee.theta_max + 1e-12):
        raise DomainError(
            f"theta={math.degrees(theta):.6g} deg outside [5, {math.degrees(config.knee.theta_max):.6g}] deg"
        )


def solve_slides(config: ChainConfig, theta: float, guess: Sequence[float] = (0.0, 0.0),
                 tol: float = RESIDUAL_TOL_MM, max_iter: int = MAX_ITER) -> ChainState:
    """Newton solve of the loop closure for the attachment slides at ``theta``."""
    _check_theta(config, theta)
    shank = tibia_pose(config.knee, theta)
    joint = exo_joint_pose(config, -theta)

    def r(x):
        e = _closure_error(config, theta, x[0], x[1], shank, joint)
        return np.array([e.x, e.y])

    x = np.array(guess, dtype=float)
    res = r(x)
    norm = float(np.hypot(*res))
    it = 0
    while norm >= tol:
        if it >= max_iter:
            raise SolverError(f"no convergence after {max_iter} iterations", residual=norm, theta=theta)
        jac = np.empty((2, 2))
        for k in range(2):
            h = FD_REL_STEP * max(1.0, abs(x[k]))
            dx = np.zeros(2)
            dx[k] = h
            jac[:, k] = (r(x + dx) - r(x - dx)) / (2 * h)
        det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
        if abs(det) < 1e-10 * max(1.0, float(np.abs(jac).max()) ** 2):
            raise SingularityError("closure Jacobian is singular", residual=norm, theta=theta)
        x = x - np.linalg.solve(jac, res)
        res = r(x)
        norm = float(np.hypot(*res))
        it += 1

    e = _closure_error(config, theta, x[0], x[1], shank, joint)
    if abs(e.angle) > 1e-12:
        raise SolverError("rotational closure violated", residual=abs(e.angle), theta=theta)
    slides = _anchor_slides(config, theta, x[0], x[1], shank, joint)
    expect = [x[0], x[0], x[1], x[1]]
    worst = max(max(abs(s - ex), abs(lat)) for (s, lat), ex in zip(slides, expect))
    if worst > max(10 * tol, 1e-9):
        raise SolverError("passive attachment constraints not satisfied", residual=worst, theta=theta)
    return ChainState(float(theta), float(x[0]), float(x[1]), norm, it)


def theta_grid(theta_max: float, step_deg: float = 1.0, theta_min: float = THETA_MIN) -> np.ndarray:
    """Grid from ``theta_min`` to ``theta_max`` (both included), in radians."""
    if step_deg <= 0:
        raise ValueError("grid step must be positive")
    lo, hi = math.degrees(theta_min), math.degrees(theta_max)
    n = int(math.floor((hi - lo) / step_deg + 1e-9))
    degs = [lo + k * step_deg for k in range(n + 1)]
    if hi - degs[-1] > 1e-9:
        degs.append(hi)
    return np.radians(degs)


def sweep_slides(config: ChainConfig, thetas) -> list[ChainState]:
    """Solve every grid point, warm-starting from the previous solution."""
    thetas = np.asarray(thetas, dtype=float)
    if np.any(np.diff(thetas) <= 0):
        raise ValueError("theta grid must be strictly increasing")
    out = []
    guess = (0.0, 0.0)
    for th in thetas:
        try:
            st = solve_slides(config, float(th), guess)
        except SolverError as exc:
            exc.theta = float(th)
            raise
        out.append(st)
        guess = (st.f, st.g)
    return out


def phi(config: ChainConfig, D: float, theta_max: float, step_deg: float = 1.0) -> float:
    """Misalignment factor: worst slide norm over [5 deg, theta_max] with
    roller diameter ``D``."""
    if theta_max > config.knee.theta_max + 1e-12:
        raise DomainError("theta_max exceeds the knee model range")
    states = sweep_slides(config.with_diameter(D), theta_grid(theta_max, step_deg))
    return max(math.hypot(s.f, s.g) for s in states)


def golden_section_minimize(fun: Callable[[float], float], lo: float, hi: float,
                            tol: float) -> tuple[float, float]:
    """Minimise a unimodal ``fun`` on ``[lo, hi]`` until the bracket is
    narrower than ``tol``."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    x = 0.5 * (a + b)
    return x, fun(x)


def optimize_D(config: ChainConfig, D_range: tuple[float, float] = (0.0, 150.0),
               theta_max: float = math.radians(120.0), D_step: float = 1.0,
               tol: float = 0.1, step_deg: float = 1.0) -> MisalignmentResult:
    """Grid scan of the misalignment factor over roller diameter, then a
    golden-section refinement of the best cell."""
    lo, hi = D_range
    if not (0.0 <= lo < hi <= 150.0):
        raise DomainError("D_range must lie within [0, 150] mm with lo < hi")
    n = int(math.floor((hi - lo) / D_step + 1e-9))
    Ds = [lo + k * D_step for k in range(n + 1)]
    if hi - Ds[-1] > 1e-9:
        Ds.append(hi)
    scan = [(D, phi(config, D, theta_max, step_deg)) for D in Ds]
    baseline = scan[0][1] if lo == 0.0 else phi(config, 0.0, theta_max, step_deg)
    ref = phi(config, PUBLISHED_ROLLER_DIAMETER_MM, theta_max, step_deg) if lo <= PUBLISHED_ROLLER_DIAMETER_MM <= hi else math.nan

    if baseline <= RESIDUAL_TOL_MM:
        warnings.warn("joint already aligned (phi(0) = 0); reduction is undefined", RuntimeWarning)
        return MisalignmentResult(lo, scan[0][1], baseline, math.nan, theta_max, ref, scan, degenerate=True)

    values = [v for _, v in scan]
    i = int(np.argmin(values))  # first minimum: smallest D wins ties
    best_D, best_v = scan[i]
    a = Ds[max(i - 1, 0)]
    b = Ds[min(i + 1, len(Ds) - 1)]
    if b > a:
        gD, gv = golden_section_minimize(lambda D: phi(config, D, theta_max, step_deg), a, b, tol)
        if gv < best_v - 1e-12:
            best_D, best_v = gD, gv
    return MisalignmentResult(best_D, best_v, baseline, 1.0 - best_v / baseline, theta_max, ref, scan)
