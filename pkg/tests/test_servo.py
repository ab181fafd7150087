"""Servo discretization, disturbance signals, and increment quadrature."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dobkit import (
    Constant,
    ContinuousServoModel,
    MultiSine,
    PlantState,
    Ramp,
    SineProduct,
    Sinusoid,
    Zero,
    benchmark_disturbance,
    discretize,
    disturbance_input,
    eval_disturbance,
    exact_disturbance_increment,
    increment_series,
    plant_step,
)
from dobkit.servo import Sampled, increment_weights


def test_discretize_unit_model_closed_form():
    # J = 1, b = 1, Ts = 1: every entry reduces to a polynomial in e^{-1}
    m = discretize(ContinuousServoModel(1.0, 1.0), 1.0)
    e1 = math.exp(-1.0)
    assert abs(m.A[0, 0] - 1.0) < 1e-15
    assert abs(m.A[0, 1] - (1.0 - e1)) < 1e-15
    assert abs(m.A[1, 0]) == 0.0
    assert abs(m.A[1, 1] - e1) < 1e-15
    assert np.allclose(m.B, [e1, 1.0 - e1], rtol=0, atol=1e-15)
    assert np.allclose(m.D1, [0.5 - e1, e1], rtol=0, atol=1e-15)


def test_discretize_frictionless_closed_form():
    # b = 0: double integrator, A = [[1, Ts], [0, 1]], B = [Ts^2/2, Ts] / J
    Ts = 1e-3
    m = discretize(ContinuousServoModel(1.0, 0.0), Ts)
    assert np.allclose(m.A, [[1.0, Ts], [0.0, 1.0]], rtol=0, atol=0)
    assert np.allclose(m.B, [5e-7, 1e-3], rtol=1e-15, atol=0)
    # D1 = [Ts^3/6, Ts^2/2] / J
    assert np.allclose(m.D1, [Ts**3 / 6.0, Ts**2 / 2.0], rtol=1e-15, atol=0)


def test_control_and_disturbance_share_a_channel():
    m = discretize(ContinuousServoModel(5e-3, 1e-2), 1e-3)
    assert np.array_equal(m.B, m.D0)


def test_discretize_semigroup_property():
    model = ContinuousServoModel(5e-3, 1e-2)
    a1 = discretize(model, 1e-3).A
    a2 = discretize(model, 2e-3).A
    assert np.allclose(a1 @ a1, a2, rtol=1e-14, atol=1e-16)


def test_discretize_continuous_across_series_switch():
    # phi evaluation switches algorithm at |b Ts| = 1; the matrices must
    # agree with the matrix-exponential oracle on both sides of the seam
    scipy_linalg = pytest.importorskip("scipy.linalg")
    J, Ts = 0.7, 1.0
    for b in (0.5, 0.999999, 1.0, 1.000001, 2.5):
        m = discretize(ContinuousServoModel(J, b * J), Ts)
        Ac = np.array([[0.0, 1.0], [0.0, -b]])
        Dc = np.array([0.0, 1.0 / J])
        M = np.zeros((3, 3))
        M[:2, :2] = Ac
        M[:2, 2] = Dc
        E = scipy_linalg.expm(M * Ts)
        assert np.allclose(m.A, E[:2, :2], rtol=1e-12, atol=1e-15)
        assert np.allclose(m.D0, E[:2, 2], rtol=1e-12, atol=1e-15)


def test_discrete_eigenvalues_are_one_and_decay_factor():
    model = ContinuousServoModel(2e-3, 4e-2)
    Ts = 5e-4
    m = discretize(model, Ts)
    eigs = sorted(np.linalg.eigvals(m.A))
    assert abs(eigs[0] - math.exp(-model.friction_rate * Ts)) < 1e-14
    assert abs(eigs[1] - 1.0) < 1e-14


def test_disturbance_input_order_zero_matches_b():
    model = ContinuousServoModel(5e-3, 1e-2)
    m = discretize(model, 1e-3)
    assert np.allclose(disturbance_input(model, 1e-3, 0), m.B, rtol=0, atol=0)
    assert np.allclose(disturbance_input(model, 1e-3, 1), m.D1, rtol=0, atol=0)


def test_disturbance_input_frictionless_general_order():
    # D_i = [Ts^(i+2)/(i+2)!, Ts^(i+1)/(i+1)!] / J when b = 0
    J, Ts = 2.0, 0.01
    model = ContinuousServoModel(J, 0.0)
    for i in range(4):
        want = np.array(
            [
                Ts ** (i + 2) / math.factorial(i + 2),
                Ts ** (i + 1) / math.factorial(i + 1),
            ]
        ) / J
        assert np.allclose(disturbance_input(model, Ts, i), want, rtol=1e-14, atol=0)


@settings(max_examples=60, deadline=None)
@given(
    J=st.floats(1e-5, 10.0),
    bTs=st.floats(0.0, 5.0),
    Ts=st.floats(1e-5, 0.5),
)
def test_discretize_matches_exponential_oracle(J, bTs, Ts):
    scipy_linalg = pytest.importorskip("scipy.linalg")
    b = bTs / Ts
    m = discretize(ContinuousServoModel(J, b * J), Ts)
    Ac = np.array([[0.0, 1.0], [0.0, -b]])
    E = scipy_linalg.expm(Ac * Ts)
    assert np.allclose(m.A, E, rtol=1e-11, atol=1e-14)


def test_model_validation():
    with pytest.raises(ValueError):
        ContinuousServoModel(0.0, 1e-2)
    with pytest.raises(ValueError):
        ContinuousServoModel(-1.0, 1e-2)
    with pytest.raises(ValueError):
        ContinuousServoModel(1.0, -1e-3)
    with pytest.raises(ValueError):
        discretize(ContinuousServoModel(1.0, 0.0), 0.0)
    with pytest.raises(ValueError):
        discretize(ContinuousServoModel(1.0, 0.0), -1e-3)


# ---------------------------------------------------------------------------
# Disturbance signals


def test_benchmark_disturbance_frozen_samples():
    bench = benchmark_disturbance()
    assert eval_disturbance(bench, 3.0) == pytest.approx(0.47, abs=1e-15)
    assert eval_disturbance(bench, 3.2) == pytest.approx(
        0.3101284022651619, abs=1e-12
    )
    assert eval_disturbance(bench, 2.999) == 0.0
    assert eval_disturbance(bench, 8.001) == 0.0


def test_benchmark_window_is_configurable():
    bench = benchmark_disturbance(t_on=1.0, t_off=2.0)
    assert eval_disturbance(bench, 1.0) == pytest.approx(0.47, abs=1e-15)
    assert eval_disturbance(bench, 2.5) == 0.0


def test_simple_signal_values_and_derivatives():
    assert eval_disturbance(Zero(), 1.23) == 0.0
    assert eval_disturbance(Constant(2.5), 7.0) == 2.5
    assert eval_disturbance(Constant(2.5), 7.0, order=1) == 0.0
    assert eval_disturbance(Ramp(0.5), 4.0) == 2.0
    assert eval_disturbance(Ramp(0.5), 4.0, order=1) == 0.5
    assert eval_disturbance(Ramp(0.5), 4.0, order=2) == 0.0
    sig = Sinusoid(2.0, 0.25, phase=0.3)
    w = 2.0 * math.pi * 0.25
    t = 1.7
    assert eval_disturbance(sig, t) == pytest.approx(
        2.0 * math.sin(w * t + 0.3), abs=1e-14
    )
    assert eval_disturbance(sig, t, order=1) == pytest.approx(
        2.0 * w * math.cos(w * t + 0.3), abs=1e-13
    )
    assert eval_disturbance(sig, t, order=2) == pytest.approx(
        -2.0 * w * w * math.sin(w * t + 0.3), abs=1e-12
    )


def test_multisine_derivative_matches_finite_difference():
    bench = benchmark_disturbance()
    h = 1e-6
    for t in (3.5, 4.2, 6.9):
        fd = (eval_disturbance(bench, t + h) - eval_disturbance(bench, t - h)) / (
            2.0 * h
        )
        assert eval_disturbance(bench, t, order=1) == pytest.approx(fd, abs=1e-6)


def test_vectorized_evaluation_matches_scalar():
    bench = benchmark_disturbance()
    t = np.array([2.0, 3.0, 3.2, 5.5, 9.0])
    v = eval_disturbance(bench, t)
    assert v.shape == t.shape
    for i, ti in enumerate(t):
        assert v[i] == eval_disturbance(bench, float(ti))


def test_sampled_signal_hold_rules():
    values = np.array([0.0, 1.0, 3.0])
    zoh = Sampled(values=values, Ts_signal=0.5, hold="zoh")
    assert eval_disturbance(zoh, 0.25) == 0.0
    assert eval_disturbance(zoh, 0.75) == 1.0
    assert eval_disturbance(zoh, 10.0) == 3.0
    lin = Sampled(values=values, Ts_signal=0.5, hold="linear")
    assert eval_disturbance(lin, 0.25) == pytest.approx(0.5, abs=1e-15)
    assert eval_disturbance(lin, 0.75) == pytest.approx(2.0, abs=1e-15)
    assert eval_disturbance(lin, -1.0) == 0.0


def test_signal_validation():
    with pytest.raises(ValueError):
        MultiSine(terms=(), t_on=2.0, t_off=1.0)
    with pytest.raises(ValueError):
        SineProduct(amplitude=1.0, factors=(("tan", 1.0),))
    with pytest.raises(ValueError):
        Sampled(values=np.zeros(3), Ts_signal=0.0)
    with pytest.raises(ValueError):
        Sampled(values=np.zeros(3), Ts_signal=0.5, hold="cubic")


# ---------------------------------------------------------------------------
# Increment quadrature


def test_constant_increment_is_d0_exactly():
    model = ContinuousServoModel(5e-3, 1e-2)
    m = discretize(model, 1e-3)
    inc = exact_disturbance_increment(m, Constant(3.0), k=17)
    assert np.allclose(inc, 3.0 * m.D0, rtol=1e-12, atol=1e-18)


def test_ramp_increment_matches_taylor_weights_when_frictionless():
    # linear disturbance: Pi(k) = D0 tau(k Ts) + D1 tau_dot, Simpson exact
    model = ContinuousServoModel(1.0, 0.0)
    Ts = 1e-2
    m = discretize(model, Ts)
    slope = 0.75
    for k in (0, 3, 11):
        want = m.D0 * (slope * k * Ts) + m.D1 * slope
        inc = exact_disturbance_increment(m, Ramp(slope), k=k)
        assert np.allclose(inc, want, rtol=1e-12, atol=1e-18)


def test_increment_series_matches_per_step_calls():
    model = ContinuousServoModel(5e-3, 1e-2)
    m = discretize(model, 1e-3)
    bench = benchmark_disturbance(t_on=0.0, t_off=1.0)
    series = increment_series(m, bench, 40, substeps=8)
    for k in range(40):
        single = exact_disturbance_increment(m, bench, k, substeps=8)
        assert np.allclose(series[k], single, rtol=1e-12, atol=1e-15)


def test_quadrature_converges_with_substeps():
    # with friction the integrand is non-polynomial; refining panels
    # must converge at fourth order toward the fine reference
    model = ContinuousServoModel(5e-3, 1e-2)
    m = discretize(model, 0.05)
    sig = Sinusoid(1.0, 3.0)
    ref = exact_disturbance_increment(m, sig, k=2, substeps=512)
    err = []
    for n in (2, 4, 8):
        got = exact_disturbance_increment(m, sig, k=2, substeps=n)
        err.append(np.max(np.abs(got - ref)))
    assert err[1] < err[0] / 8.0
    assert err[2] < err[1] / 8.0


def test_increment_weights_validation():
    m = discretize(ContinuousServoModel(1.0, 0.0), 1e-3)
    with pytest.raises(ValueError):
        increment_weights(m, 0)


def test_plant_step_recursion():
    m = discretize(ContinuousServoModel(1.0, 0.0), 0.1)
    x = PlantState(1.0, -2.0)
    inc = np.array([0.3, 0.4])
    nxt = plant_step(m, x, 2.0, inc)
    want = m.A @ np.array([1.0, -2.0]) + m.B * 2.0 - inc
    assert nxt.q == pytest.approx(want[0], abs=0)
    assert nxt.dq == pytest.approx(want[1], abs=0)


def test_plant_state_roundtrip():
    x = PlantState(0.5, -1.5)
    assert PlantState.from_array(x.as_array()) == x


@settings(max_examples=40, deadline=None)
@given(
    level=st.floats(-5.0, 5.0),
    J=st.floats(1e-3, 1.0),
    bTs=st.floats(0.0, 2.0),
)
def test_constant_increment_property(level, J, bTs):
    # analytic value is level * D0; Simpson at 64 panels resolves the
    # exponential integrand to ~1e-12 relative at the stiffest rate here
    Ts = 1e-2
    model = ContinuousServoModel(J, bTs / Ts * J)
    m = discretize(model, Ts)
    inc = exact_disturbance_increment(m, Constant(level), k=5)
    assert np.allclose(inc, level * m.D0, rtol=1e-8, atol=1e-12)


def test_discretize_is_deterministic():
    model = ContinuousServoModel(5e-3, 1e-2)
    a = discretize(model, 1e-3)
    b = discretize(model, 1e-3)
    assert np.array_equal(a.A, b.A)
    assert np.array_equal(a.B, b.B)
    assert np.array_equal(a.D1, b.D1)
