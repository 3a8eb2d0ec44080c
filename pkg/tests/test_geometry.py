import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kneexo.geometry import Transform2D, apply, compose, icr, inverse

angles = st.floats(-10.0, 10.0)
coords = st.floats(-1e3, 1e3)
transforms = st.builds(Transform2D, angles, coords, coords)


def test_rotation_quarter_turn():
    p = apply(Transform2D.rotation(math.pi / 2), (1.0, 0.0))
    assert p == pytest.approx([0.0, 1.0], abs=1e-15)


def test_compose_applies_right_operand_first():
    a = Transform2D.translation(1.0, 0.0)
    b = Transform2D.rotation(math.pi / 2)
    # rotate (1, 0) to (0, 1), then shift by (1, 0)
    assert apply(a @ b, (1.0, 0.0)) == pytest.approx([1.0, 1.0])
    assert apply(b @ a, (1.0, 0.0)) == pytest.approx([0.0, 2.0])


def test_rotation_about_keeps_centre_fixed():
    t = Transform2D.rotation_about(0.7, 3.0, -2.0)
    assert apply(t, (3.0, -2.0)) == pytest.approx([3.0, -2.0], abs=1e-12)


@given(transforms, coords, coords)
def test_inverse_round_trip(t, px, py):
    q = apply(compose(inverse(t), t), (px, py))
    assert q == pytest.approx([px, py], abs=1e-9)


@given(transforms, coords, coords, coords, coords)
def test_rigid_transforms_preserve_distance(t, x1, y1, x2, y2):
    d0 = math.hypot(x2 - x1, y2 - y1)
    p, q = apply(t, (x1, y1)), apply(t, (x2, y2))
    assert float(np.linalg.norm(p - q)) == pytest.approx(d0, abs=1e-9)


@given(transforms, transforms, transforms)
def test_composition_is_associative(a, b, c):
    l, r = (a @ b) @ c, a @ (b @ c)
    assert l.angle == pytest.approx(r.angle)
    assert (l.x, l.y) == pytest.approx((r.x, r.y), abs=1e-8)


def test_icr_of_rotation_about_a_point():
    c = (12.0, -4.0)
    h = 1e-6
    poses = [Transform2D.rotation_about(th, *c) for th in (0.3 - h, 0.3, 0.3 + h)]
    assert icr(*poses, 2 * h) == pytest.approx(c, abs=1e-6)


def test_icr_rejects_pure_translation():
    with pytest.raises(ZeroDivisionError):
        icr(Transform2D(0, 0, 0), Transform2D(0, 1, 0), Transform2D(0, 2, 0), 1.0)
