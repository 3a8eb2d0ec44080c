import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kneexo import actuation as a
from kneexo.errors import CalibrationError, DomainError

M = a.PUBLISHED_MODEL


@pytest.mark.parametrize("I, T", [(5.0, 2.6), (-5.0, -2.6), (0.0, 0.0), (0.5, 0.0), (-0.8, 0.0), (10.0, 5.7)])
def test_torque_hand_values(I, T):
    assert a.torque_from_current(M, I) == pytest.approx(T, abs=1e-12)


def test_deadband_edge():
    assert M.deadband == pytest.approx(0.5 / 0.62)
    assert a.torque_from_current(M, M.deadband) == 0.0


@given(st.floats(-20.0, 20.0))
def test_torque_is_odd(I):
    assert a.torque_from_current(M, -I) == -a.torque_from_current(M, I)


def test_torque_monotone():
    I = np.linspace(-10, 10, 2001)
    assert np.all(np.diff(a.torque_from_current(M, I)) >= 0)


@given(st.floats(-15.0, 15.0).filter(lambda t: abs(t) > 1e-9))
def test_current_round_trip(T):
    I = a.current_for_torque(M, T)
    assert a.torque_from_current(M, I) == pytest.approx(T, abs=1e-12)
    assert abs(I) > M.deadband


def test_current_for_zero_torque():
    assert a.current_for_torque(M, 0.0) == 0.0


def samples_from(model, I):
    return [a.CalibrationSample(float(i), float(t)) for i, t in zip(I, a.torque_from_current(model, I))]


@given(st.floats(0.1, 5.0), st.floats(0.0, 2.0))
@settings(max_examples=60, deadline=None)
def test_noiseless_recovery(k, T_f):
    true = a.TorqueCurrentModel(k, T_f)
    lim = 3 * true.deadband + 5.0
    I = np.linspace(-lim, lim, 41)
    fit, r2 = a.calibrate(samples_from(true, I))
    assert fit.k == pytest.approx(k, abs=1e-9)
    assert fit.T_f == pytest.approx(T_f, abs=1e-9)
    assert r2 == pytest.approx(1.0, abs=1e-12)


def test_noisy_recovery_fixed_seed():
    samples = a.synthetic_calibration_samples(M, 200, 0.05, seed=0)
    fit, r2 = a.calibrate(samples)
    assert fit.k == pytest.approx(0.62, rel=0.03)
    assert fit.T_f == pytest.approx(0.5, rel=0.03)
    assert r2 > 0.95


def test_deadband_samples_do_not_bias_fit():
    # many samples parked inside the deadband read zero torque
    I = np.concatenate([np.linspace(-8, 8, 40), np.linspace(-0.7, 0.7, 60)])
    fit, _ = a.calibrate(samples_from(M, I))
    assert (fit.k, fit.T_f) == pytest.approx((0.62, 0.5), abs=1e-9)


@pytest.mark.parametrize("I", [
    [1.0, 2.0, 3.0, 4.0],  # one sign only
    [1.0, -1.0],  # too few
    [2.0, 2.0, -2.0, -2.0],  # no spread per branch
])
def test_ill_conditioned(I):
    with pytest.raises(CalibrationError):
        a.calibrate(samples_from(M, np.array(I)))


def test_calibration_csv(tmp_path):
    p = tmp_path / "bench.csv"
    p.write_text("# comment\ncurrent_a,torque_nm\n5.0,2.6\n-5.0,-2.6\n8.0,4.46\n-8.0,-4.46\n")
    fit, _ = a.calibrate(a.read_calibration_csv(p))
    assert (fit.k, fit.T_f) == pytest.approx((0.62, 0.5))
    bad = tmp_path / "bad.csv"
    bad.write_text("amps,nm\n1,2\n")
    with pytest.raises(CalibrationError):
        a.read_calibration_csv(bad)


def test_model_domain():
    with pytest.raises(DomainError):
        a.TorqueCurrentModel(0.0, 0.5)
    with pytest.raises(DomainError):
        a.TorqueCurrentModel(0.6, -0.1)


@pytest.mark.parametrize("amp", [1.0, 3.33])
def test_passive_stats_sine(amp):
    t = np.linspace(0, 1, 1000, endpoint=False)
    rms, peak = a.passive_stats(a.PassiveTrace(t, amp * np.sin(2 * np.pi * 5 * t)))
    assert rms == pytest.approx(amp / math.sqrt(2), rel=1e-9)
    assert peak == pytest.approx(amp, rel=1e-6)


def test_passive_stats_constant():
    t = np.arange(10.0)
    assert a.passive_stats(a.PassiveTrace(t, np.full(10, -2.0))) == pytest.approx((2.0, 2.0))


def test_reference_passive_trace():
    rms, peak = a.passive_stats(a.reference_passive_trace())
    assert rms == pytest.approx(a.PUBLISHED_PASSIVE_RMS_NM, rel=1e-12)
    assert peak == pytest.approx(a.PUBLISHED_PASSIVE_MAX_NM, rel=1e-12)


def test_passive_trace_validation():
    with pytest.raises(ValueError):
        a.PassiveTrace(np.array([0.0, 0.0]), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        a.passive_stats(a.PassiveTrace(np.array([0.0]), np.array([1.0])))


def test_current_loop_step_response():
    plant = a.PlantParams(0.01, 0.001)
    out = a.simulate_current_loop(np.ones(50), plant)
    n = np.arange(1, 51)
    assert out == pytest.approx(1 - np.exp(-n * 0.001 / 0.01), rel=1e-12)


def test_ideal_loop_tracks_exactly():
    *_, rms = a.simulate_sine_tracking(plant=a.PlantParams(0.0, 0.001))
    assert rms < 1e-12


def test_tracking_error_grows_with_lag():
    errs = [a.simulate_sine_tracking(plant=a.PlantParams(tc, 0.001))[3] for tc in (0.0005, 0.002, 0.005)]
    assert errs[0] < errs[1] < errs[2]


def test_plant_domain():
    with pytest.raises(DomainError):
        a.PlantParams(-1.0)
    with pytest.raises(DomainError):
        a.PlantParams(0.01, 0.0)
