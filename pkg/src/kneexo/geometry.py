"""Planar rigid transforms.

Frame convention (sagittal plane, right-handed): +x anterior, +y proximal,
counter-clockwise angles positive. Angles are radians and are never wrapped,
so poses stay continuous along a motion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Transform2D:
    """Rotation by ``angle`` followed by translation by ``(x, y)`` in mm."""

    angle: float = 0.0
    x: float = 0.0
    y: float = 0.0

    @classmethod
    def identity(cls) -> "Transform2D":
        return cls()

    @classmethod
    def rotation(cls, angle: float) -> "Transform2D":
        return cls(angle, 0.0, 0.0)

    @classmethod
    def translation(cls, x: float, y: float) -> "Transform2D":
        return cls(0.0, x, y)

    @classmethod
    def rotation_about(cls, angle: float, cx: float, cy: float) -> "Transform2D":
        c, s = math.cos(angle), math.sin(angle)
        return cls(angle, cx - (c * cx - s * cy), cy - (s * cx + c * cy))

    @property
    def t(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def __matmul__(self, other: "Transform2D") -> "Transform2D":
        return compose(self, other)

    def apply_xy(self, px: float, py: float) -> tuple[float, float]:
        c, s = math.cos(self.angle), math.sin(self.angle)
        return c * px - s * py + self.x, s * px + c * py + self.y


def compose(a: Transform2D, b: Transform2D) -> Transform2D:
    """Return ``a ∘ b``: the result applies ``b`` first, then ``a``."""
    c, s = math.cos(a.angle), math.sin(a.angle)
    return Transform2D(
        a.angle + b.angle,
        c * b.x - s * b.y + a.x,
        s * b.x + c * b.y + a.y,
    )


def inverse(t: Transform2D) -> Transform2D:
    c, s = math.cos(t.angle), math.sin(t.angle)
    return Transform2D(-t.angle, -(c * t.x + s * t.y), -(-s * t.x + c * t.y))


def apply(t: Transform2D, p) -> np.ndarray:
    """Rotate then translate the point ``p`` (mm)."""
    x, y = t.apply_xy(float(p[0]), float(p[1]))
    return np.array([x, y])


def icr(before: Transform2D, at: Transform2D, after: Transform2D, span: float) -> np.ndarray:
    """Instantaneous centre of rotation of ``at`` by central differencing.

    ``before``/``after`` are poses of the same body at parameter values
    ``span`` apart, bracketing ``at``.
    """
    omega = (after.angle - before.angle) / span
    if omega == 0.0:
        raise ZeroDivisionError("pure translation has no finite ICR")
    vx = (after.x - before.x) / span
    vy = (after.y - before.y) / span
    # zero-velocity point: p = d + J v / omega, J = +90 deg rotation
    return np.array([at.x - vy / omega, at.y + vx / omega])
