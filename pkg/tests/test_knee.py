import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from kneexo.errors import DomainError
from kneexo.geometry import apply
from kneexo.knee import (PURE_ROLLING, KneeModelParams, analytic_icr, condyle_arc_length, contact_state,
                         extension_icr, femur_pose, icr_trajectory, tibia_pose)


def test_identity_at_full_extension():
    p = femur_pose(KneeModelParams(), 0.0)
    assert (p.angle, p.x, p.y) == pytest.approx((0.0, 0.0, 0.0), abs=1e-15)


@pytest.mark.parametrize("theta", [0.1, 0.8, 1.7, 2.5])
def test_rolling_circle_traces_a_cycloid(theta):
    r = 25.0
    p = femur_pose(KneeModelParams(r, r, PURE_ROLLING), theta)
    # circle rolling backwards along the plateau: d = (-r th + r sin th, r - r cos th) for its lowest point
    centre = apply(p, (0.0, r))
    assert centre == pytest.approx([-r * theta, r], abs=1e-12)
    assert (p.x, p.y) == pytest.approx([-r * theta + r * math.sin(theta), r - r * math.cos(theta)], abs=1e-12)


def test_pure_slide_circle_has_fixed_icr():
    params = KneeModelParams(25.0, 25.0, 0.0)
    h = 1e-5
    for th in np.linspace(0.05, 2.5, 12):
        pt = icr_trajectory(params, [th - h, th, th + h])[0]
        assert pt == pytest.approx([0.0, 25.0], abs=1e-5)


def test_rolling_circle_icr_on_the_plateau():
    params = KneeModelParams(25.0, 25.0, PURE_ROLLING)
    th = np.array([1.0 - 1e-4, 1.0, 1.0 + 1e-4])
    x, y = icr_trajectory(params, th)[0]
    assert y == pytest.approx(0.0, abs=1e-6)
    assert x == pytest.approx(-25.0, abs=1e-6)


@pytest.mark.parametrize("rho", [0.0, 0.5, 2.0, 10.0, PURE_ROLLING])
@pytest.mark.parametrize("theta", [0.2, 1.0, 2.0])
def test_finite_difference_icr_matches_closed_form(rho, theta):
    params = KneeModelParams(32.0, 25.0, rho)
    h = 1e-4
    coarse = icr_trajectory(params, [theta - h, theta, theta + h])[0]
    fine = icr_trajectory(params, [theta - h / 2, theta, theta + h / 2])[0]
    assert np.linalg.norm(coarse - fine) < 1e-4
    assert fine == pytest.approx(analytic_icr(params, theta), abs=1e-5)


def test_extension_icr_default():
    # rho = 2: slip third of the curvature radius a^2/b
    assert extension_icr(KneeModelParams()) == pytest.approx([0.0, 32.0 ** 2 / 25.0 / 3.0])


@pytest.mark.parametrize("rho", [0.5, 2.0, 7.0])
def test_rolled_to_slid_ratio(rho):
    cs = contact_state(KneeModelParams(32.0, 25.0, rho), 1.2)
    assert cs["rolled"] / cs["slid"] == pytest.approx(rho, rel=1e-12)
    assert cs["rolled"] + cs["slid"] == pytest.approx(cs["arc"])


@given(st.floats(20.0, 30.0), st.floats(1.0, 1.6), st.floats(-3.0, 0.0))
@settings(max_examples=40, deadline=None)
def test_arc_length_matches_quadrature(b, ratio, t):
    a = b * ratio
    assert condyle_arc_length(a, b, t) == pytest.approx(oracles.ellipse_arc(a, b, t), rel=1e-10, abs=1e-10)


@given(st.floats(20.0, 30.0), st.floats(1.0, 1.5), st.floats(0.0, 20.0), st.floats(0.0, 2.6))
@settings(max_examples=60, deadline=None)
def test_pose_matches_independent_construction(b, ratio, rho, theta):
    a = b * ratio
    p = femur_pose(KneeModelParams(a, b, rho), theta)
    ref = oracles.femur_in_tibia(a, b, rho, theta)
    assert (p.x, p.y) == pytest.approx((ref[0, 2], ref[1, 2]), abs=1e-8)


def test_condyle_stays_on_plateau():
    params = KneeModelParams()
    for th in np.linspace(0, params.theta_max, 31):
        p = femur_pose(params, float(th))
        a, b = params.semi_major_a, params.semi_minor_b
        pts = np.array([apply(p, (a * math.sin(u), b - b * math.cos(u)))
                        for u in np.linspace(-math.pi, math.pi, 7201)])
        assert pts[:, 1].min() == pytest.approx(0.0, abs=1e-4)
        assert pts[:, 1].min() > -1e-9


def test_pose_is_continuous():
    params = KneeModelParams()
    th = np.linspace(0.0, params.theta_max, 3001)
    xy = np.array([[femur_pose(params, float(t)).x, femur_pose(params, float(t)).y] for t in th])
    assert np.abs(np.diff(xy, axis=0)).max() < 0.1


def test_tibia_pose_inverts_femur_pose():
    params = KneeModelParams()
    c = tibia_pose(params, 1.1) @ femur_pose(params, 1.1)
    assert (c.angle, c.x, c.y) == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)
    assert tibia_pose(params, 1.1).angle == pytest.approx(-1.1)


@pytest.mark.parametrize("kwargs", [
    dict(semi_major_a=20.0, semi_minor_b=25.0),
    dict(semi_minor_b=0.0),
    dict(sliding_ratio_rho=-1.0),
    dict(theta_max=math.radians(151.0)),
])
def test_invalid_params(kwargs):
    with pytest.raises(DomainError):
        KneeModelParams(**kwargs)


@pytest.mark.parametrize("theta", [-0.01, math.radians(150.5)])
def test_theta_out_of_range(theta):
    with pytest.raises(DomainError):
        femur_pose(KneeModelParams(), theta)


def test_icr_trajectory_needs_three_points():
    with pytest.raises(ValueError):
        icr_trajectory(KneeModelParams(), [0.1, 0.2])
