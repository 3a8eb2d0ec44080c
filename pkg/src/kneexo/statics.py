"""Sagittal statics of the leg/exoskeleton system.

Four rigid bodies: exo thigh frame, exo calf frame, human thigh, human calf.
The actuator torque acts between the two exo frames, which reach the leg only
through the strap attachments. Unknowns are the attachment forces
(perpendicular, optionally tangential), the exo joint force, the human knee
joint force and the net human knee moment. Equations are force and moment
balance of every body (12 rows), so the perpendicular-only two-per-segment
layout is overdetermined; it is consistent because the exo is
self-equilibrated and the simplified gait load is a spring-loaded inverted
pendulum force along the hip-ankle line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InconsistentSystemError

UNIQUE = "unique"
INCONSISTENT = "inconsistent"
UNDERDETERMINED = "underdetermined"

RANK_RTOL = 1e-10


@dataclass(frozen=True)
class AttachmentLayout:
    thigh_length: float = 0.42
    calf_length: float = 0.42
    thigh_attachments: tuple[float, ...] = (0.08, 0.30)
    calf_attachments: tuple[float, ...] = (0.08, 0.36)

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise DomainError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        for seg, length, atts in (("thigh", self.thigh_length, self.thigh_attachments),
                                  ("calf", self.calf_length, self.calf_attachments)):
            if not length > 0:
                out.append(f"statics.{seg}_length must be > 0")
            for d in atts:
                if not 0 < d < length:
                    out.append(f"statics.{seg}_attachments: {d} not strictly inside (0, {length})")
            if len(set(atts)) != len(atts):
                out.append(f"statics.{seg}_attachments must be pairwise distinct")
        return out

    @property
    def counts(self) -> tuple[int, int]:
        return len(self.thigh_attachments), len(self.calf_attachments)


@dataclass(frozen=True)
class SegmentLoad:
    """Extra load on one human segment: a force (N) applied at ``at`` metres
    from the knee along the segment, plus a pure moment (N m)."""

    fx: float = 0.0
    fy: float = 0.0
    at: float = 0.0
    moment: float = 0.0


@dataclass(frozen=True)
class LoadCase:
    """Exo knee torque ``knee_torque_tau`` (N m, extension positive: acts on
    the calf frame, reaction on the thigh frame), knee flexion angle, and the
    axial hip-to-ankle leg load of the simplified stance model (N,
    compressive positive)."""

    knee_torque_tau: float = 16.0
    knee_angle: float = math.radians(20.0)
    axial_load: float = 700.0
    thigh_extra: SegmentLoad = field(default_factory=SegmentLoad)
    calf_extra: SegmentLoad = field(default_factory=SegmentLoad)

    def __post_init__(self):
        vals = [self.knee_torque_tau, self.knee_angle, self.axial_load]
        for sl in (self.thigh_extra, self.calf_extra):
            vals += [sl.fx, sl.fy, sl.at, sl.moment]
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("load case values must be finite")


@dataclass
class InteractionForces:
    F_p: np.ndarray  # perpendicular attachment forces on the leg, thigh first
    N_joint: np.ndarray  # human knee force on the thigh, from the calf
    N_exo: np.ndarray  # exo joint force on the thigh frame, from the calf frame
    knee_moment: float  # net human moment on the calf about the knee
    residual: float
    F_s: np.ndarray | None = None
    labels: list[str] = field(default_factory=list)
    positions: list[float] = field(default_factory=list)


@dataclass
class StaticsSystem:
    A: np.ndarray
    b: np.ndarray
    columns: list[str]
    rank: int
    rank_augmented: int

    @property
    def verdict(self) -> str:
        if self.rank_augmented > self.rank:
            return INCONSISTENT
        if self.rank < self.A.shape[1]:
            return UNDERDETERMINED
        return UNIQUE


def _segment_axes(knee_angle: float):
    """Unit vectors knee->hip and knee->ankle, with the thigh vertical."""
    u_t = np.array([0.0, 1.0])
    # flexion swings the calf posteriorly
    u_c = np.array([-math.sin(knee_angle), -math.cos(knee_angle)])
    return u_t, u_c


def _perp(u: np.ndarray) -> np.ndarray:
    return np.array([-u[1], u[0]])


def _cross(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def assemble(layout: AttachmentLayout, load: LoadCase, tangential: bool = False) -> StaticsSystem:
    """Build ``A x = b``. Rows: exo thigh (Fx, Fy, M), exo calf, human thigh,
    human calf; moments about the knee point."""
    u_t, u_c = _segment_axes(load.knee_angle)
    atts = [("thigh", i, d, u_t) for i, d in enumerate(layout.thigh_attachments, 1)]
    atts += [("calf", i, d, u_c) for i, d in enumerate(layout.calf_attachments, 1)]

    cols: list[str] = []
    blocks: list[np.ndarray] = []  # each column is a 12-vector

    def body_rows(body: int, force: np.ndarray, point: np.ndarray) -> np.ndarray:
        col = np.zeros(12)
        col[3 * body: 3 * body + 2] = force
        col[3 * body + 2] = _cross(point, force)
        return col

    EXO_T, EXO_C, HUM_T, HUM_C = range(4)
    for seg, i, d, u in atts:
        p = d * u
        n = _perp(u)
        human, exo = (HUM_T, EXO_T) if seg == "thigh" else (HUM_C, EXO_C)
        cols.append(f"{seg}_{i}.F_p")
        blocks.append(body_rows(human, n, p) - body_rows(exo, n, p))
        if tangential:
            cols.append(f"{seg}_{i}.F_s")
            blocks.append(body_rows(human, u, p) - body_rows(exo, u, p))

    origin = np.zeros(2)
    for k, e in enumerate(np.eye(2)):
        cols.append("N_exo." + "xy"[k])
        blocks.append(body_rows(EXO_T, e, origin) - body_rows(EXO_C, e, origin))
    for k, e in enumerate(np.eye(2)):
        cols.append("N_joint." + "xy"[k])
        blocks.append(body_rows(HUM_T, e, origin) - body_rows(HUM_C, e, origin))
    m = np.zeros(12)
    m[3 * HUM_C + 2] = 1.0
    m[3 * HUM_T + 2] = -1.0
    cols.append("knee_moment")
    blocks.append(m)

    A = np.column_stack(blocks)

    # known loads moved to the right-hand side
    known = np.zeros(12)
    known[3 * EXO_C + 2] += load.knee_torque_tau
    known[3 * EXO_T + 2] -= load.knee_torque_tau
    hip = layout.thigh_length * u_t
    ankle = layout.calf_length * u_c
    axis = (ankle - hip) / np.linalg.norm(ankle - hip)
    known += body_rows(HUM_T, load.axial_load * axis, hip)
    known += body_rows(HUM_C, -load.axial_load * axis, ankle)
    for body, u, extra in ((HUM_T, u_t, load.thigh_extra), (HUM_C, u_c, load.calf_extra)):
        known += body_rows(body, np.array([extra.fx, extra.fy]), extra.at * u)
        known[3 * body + 2] += extra.moment
    b = -known

    scale = max(1.0, float(np.abs(A).max()))
    tol = RANK_RTOL * scale * max(A.shape)
    rank = int(np.linalg.matrix_rank(A, tol=tol))
    bn = b / max(1.0, float(np.linalg.norm(b)))
    rank_aug = int(np.linalg.matrix_rank(np.column_stack([A, bn]), tol=tol))
    return StaticsSystem(A, b, cols, rank, rank_aug)


def layout_feasibility(layout: AttachmentLayout, load: LoadCase, tangential: bool = False) -> str:
    """Rank verdict of the statics system: unique, inconsistent or
    underdetermined."""
    k_t, k_c = layout.counts
    if not (0 <= k_t <= 3 and 0 <= k_c <= 3):
        raise DomainError("feasibility analysis supports 0-3 attachments per segment")
    return assemble(layout, load, tangential).verdict


def solve_attachment_forces(layout: AttachmentLayout, load: LoadCase) -> InteractionForces:
    """Unique perpendicular attachment forces for a two-per-segment layout."""
    if layout.counts != (2, 2):
        raise DomainError("solve_attachment_forces needs exactly 2 attachments per segment")
    sysm = assemble(layout, load)
    if sysm.verdict != UNIQUE:
        raise InconsistentSystemError(
            f"statics system is {sysm.verdict}", sysm.rank, sysm.rank_augmented, sysm.A.shape[1]
        )
    x, *_ = np.linalg.lstsq(sysm.A, sysm.b, rcond=None)
    residual = float(np.linalg.norm(sysm.A @ x - sysm.b)) / max(1.0, float(np.linalg.norm(sysm.b)))
    labels = [c.split(".")[0] for c in sysm.columns[:4]]
    positions = list(layout.thigh_attachments) + list(layout.calf_attachments)
    return InteractionForces(
        F_p=x[:4].copy(),
        N_exo=x[4:6].copy(),
        N_joint=x[6:8].copy(),
        knee_moment=float(x[8]),
        residual=residual,
        labels=labels,
        positions=positions,
    )


def segment_equilibrium(layout: AttachmentLayout, load: LoadCase, forces: InteractionForces) -> np.ndarray:
    """Net (Fx, Fy, M) on each of the four bodies for a solved force set,
    summed term by term from the free-body diagrams. Shape ``(4, 3)``."""
    u_t, u_c = _segment_axes(load.knee_angle)
    n_t, n_c = _perp(u_t), _perp(u_c)
    tau = load.knee_torque_tau
    net = np.zeros((4, 3))

    def add(body, f, p):
        net[body, :2] += f
        net[body, 2] += _cross(p, f)

    F = forces.F_p
    for F_i, d in zip(F[:2], layout.thigh_attachments):
        add(2, F_i * n_t, d * u_t)
        add(0, -F_i * n_t, d * u_t)
    for F_i, d in zip(F[2:], layout.calf_attachments):
        add(3, F_i * n_c, d * u_c)
        add(1, -F_i * n_c, d * u_c)
    o = np.zeros(2)
    add(0, forces.N_exo, o)
    add(1, -forces.N_exo, o)
    add(2, forces.N_joint, o)
    add(3, -forces.N_joint, o)
    net[0, 2] -= tau
    net[1, 2] += tau
    net[3, 2] += forces.knee_moment
    net[2, 2] -= forces.knee_moment
    hip, ankle = layout.thigh_length * u_t, layout.calf_length * u_c
    axis = (ankle - hip) / np.linalg.norm(ankle - hip)
    add(2, load.axial_load * axis, hip)
    add(3, -load.axial_load * axis, ankle)
    for body, u, ex in ((2, u_t, load.thigh_extra), (3, u_c, load.calf_extra)):
        add(body, np.array([ex.fx, ex.fy]), ex.at * u)
        net[body, 2] += ex.moment
    return net
