"""Independent reference implementations used only by the tests.

They share no code with the package: homogeneous 3x3 matrices instead of
Transform2D, root finding instead of closed-form contact parameters,
adaptive quadrature instead of elliptic integrals, and brute-force grid
search instead of Newton iteration.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq


def hmat(angle: float, x: float, y: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, x], [s, c, y], [0.0, 0.0, 1.0]])


def ellipse_arc(a: float, b: float, t: float) -> float:
    val, _ = quad(lambda u: math.hypot(a * math.cos(u), b * math.sin(u)), 0.0, t, epsabs=1e-13, epsrel=1e-13)
    return abs(val)


def contact_param(a: float, b: float, theta: float) -> float:
    """Condyle parameter whose tangent is horizontal after rotating by theta."""
    if theta == 0.0:
        return 0.0

    def tangent_y(t):
        return math.sin(theta) * a * math.cos(t) + math.cos(theta) * b * math.sin(t)

    return brentq(tangent_y, -math.pi + 1e-12, 0.0, xtol=1e-15)


def femur_in_tibia(a: float, b: float, rho: float, theta: float) -> np.ndarray:
    t = contact_param(a, b, theta)
    rolled = 1.0 if math.isinf(rho) else rho / (1.0 + rho)
    s = -rolled * ellipse_arc(a, b, t)
    c, sn = math.cos(theta), math.sin(theta)
    ex, ey = a * math.sin(t), b - b * math.cos(t)
    return hmat(theta, s - (c * ex - sn * ey), -(sn * ex + c * ey))


def tibia_in_femur(a: float, b: float, rho: float, theta: float) -> np.ndarray:
    return np.linalg.inv(femur_in_tibia(a, b, rho, theta))


def rolling_joint(D: float, phi: float) -> np.ndarray:
    """Two equal rollers in pure rolling, built from the roller centres."""
    r = D / 2.0
    c_thigh = np.array([0.0, r])
    c_calf = c_thigh + D * np.array([math.sin(phi / 2), -math.cos(phi / 2)])
    R = hmat(phi, 0.0, 0.0)[:2, :2]
    origin = c_calf - R @ np.array([0.0, -r])
    return hmat(phi, origin[0], origin[1])


def slides_grid_search(a, b, rho, D, theta, offset, span=300.0, levels=(1.0, 0.1, 0.01, 1e-3, 1e-4), window=15):
    """(f, g) minimising the world-frame mismatch of the calf exo frame
    origin reached along the exo and the leg, by nested grid search."""
    O = hmat(*offset)
    S = tibia_in_femur(a, b, rho, theta)
    J = rolling_joint(D, -theta)
    # exo path origin: (0, f) + (O J) origin; leg path: S((0, g) + O origin)
    p_exo = (O @ J)[:2, 2]
    p_leg = S[:2, :2] @ O[:2, 2] + S[:2, 2]
    col_g = S[:2, :2] @ np.array([0.0, 1.0])

    def mismatch(F, G):
        dx = p_exo[0] - p_leg[0] - G * col_g[0]
        dy = p_exo[1] + F - p_leg[1] - G * col_g[1]
        return dx * dx + dy * dy

    cf, cg = 0.0, 0.0
    half = span
    for h in levels:
        fs = cf + np.arange(-half, half + h / 2, h)
        gs = cg + np.arange(-half, half + h / 2, h)
        F, G = np.meshgrid(fs, gs, indexing="ij")
        m = mismatch(F, G)
        i, j = np.unravel_index(np.argmin(m), m.shape)
        cf, cg = fs[i], gs[j]
        half = window * h
    return float(cf), float(cg), float(math.sqrt(mismatch(cf, cg)))
