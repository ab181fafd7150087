"""Auxiliary-variable observer construction and recursion conformance."""
import math

import numpy as np
import pytest

from dobkit import (
    FIRST_ORDER,
    HIGH_PERFORMANCE,
    ZERO_ORDER,
    Constant,
    ContinuousServoModel,
    ObserverGains,
    ObserverKind,
    PlantState,
    Ramp,
    Sinusoid,
    build,
    build_fo,
    build_ho,
    build_zo,
    discretize,
    disturbance_input,
    estimate,
    eval_disturbance,
    initial_state,
    observer_update,
    reconstruct,
    taylor_kind,
    truncation_residuals,
    tune_fo,
    tune_hp,
    tune_zo,
)
from dobkit.defaults import MAX_TAYLOR_ORDER
from dobkit.observers import ObserverState, build_hp, estimate_index
from dobkit.stability import EigenSpec


def desk_nominal():
    return discretize(ContinuousServoModel(5e-3, 1e-2), 1e-3)


# ---------------------------------------------------------------------------
# Kinds and gains containers


def test_observer_kind_dimensions():
    assert ZERO_ORDER.dim == 1
    assert FIRST_ORDER.dim == 2
    assert HIGH_PERFORMANCE.dim == 2
    assert taylor_kind(3).dim == 4


def test_observer_kind_validation():
    with pytest.raises(ValueError):
        ObserverKind("banana")
    with pytest.raises(ValueError):
        taylor_kind(MAX_TAYLOR_ORDER + 1)
    with pytest.raises(ValueError):
        taylor_kind(-1)


def test_observer_gains_row_count_checked():
    with pytest.raises(ValueError):
        ObserverGains(FIRST_ORDER, (np.zeros(2),))
    with pytest.raises(ValueError):
        ObserverGains(ZERO_ORDER, (np.zeros(3),))


def test_estimate_index_selects_current_sample_channel():
    assert estimate_index(ZERO_ORDER) == 0
    assert estimate_index(FIRST_ORDER) == 0
    assert estimate_index(taylor_kind(2)) == 0
    assert estimate_index(HIGH_PERFORMANCE) == 1


# ---------------------------------------------------------------------------
# Frozen recursion matrices


def test_zero_order_gamma_is_one_minus_l0():
    dyn = build(desk_nominal(), tune_zo(desk_nominal(), 0.275))
    assert dyn.Gamma.shape == (1, 1)
    assert dyn.Gamma[0, 0] == pytest.approx(0.725, abs=1e-14)


def test_first_order_parametrized_gamma_corners():
    from dobkit.stability import fo_gains_from_params

    nominal = desk_nominal()
    dyn = build(nominal, fo_gains_from_params(nominal, 0.15, 10.0))
    assert dyn.Gamma[0, 0] == pytest.approx(0.7, abs=1e-14)
    assert dyn.Gamma[1, 0] == pytest.approx(-20.0, abs=1e-12)


def test_high_performance_frozen_gamma():
    nominal = desk_nominal()
    dyn = build(nominal, tune_hp(nominal, EigenSpec((0.5, 0.25))))
    want = np.array([[0.0, 0.125], [-1.0, 0.75]])
    assert np.allclose(dyn.Gamma, want, rtol=0, atol=1e-13)


def test_generalized_taylor_with_zero_gains_is_shift_matrix():
    # L = 0 leaves the pure Taylor propagation Gamma[i, j] = Ts^(j-i)/(j-i)!
    nominal = desk_nominal()
    Ts = nominal.Ts
    m = 2
    L = tuple(np.zeros(2) for _ in range(m + 1))
    dyn = build_ho(nominal, L, m)
    want = np.array(
        [[1.0, Ts, Ts**2 / 2.0], [0.0, 1.0, Ts], [0.0, 0.0, 1.0]]
    )
    assert np.allclose(dyn.Gamma, want, rtol=0, atol=0)
    assert np.allclose(dyn.Omega_x, 0.0, atol=0)


def test_generalized_taylor_specializes_to_zo_and_fo():
    nominal = desk_nominal()
    gz = tune_zo(nominal, 0.3)
    a = build_zo(nominal, gz.L[0])
    b = build_ho(nominal, (gz.L[0],), 0)
    assert np.allclose(a.Gamma, b.Gamma, rtol=0, atol=1e-12)
    assert np.allclose(a.Omega_x, b.Omega_x, rtol=0, atol=1e-12)
    assert np.allclose(a.Omega_u, b.Omega_u, rtol=0, atol=1e-12)

    # gain rows scale like 1/Ts^2, so the match is relative at 1e-12
    gf = tune_fo(nominal, EigenSpec((0.8, 0.6)))
    c = build_fo(nominal, gf.L[0], gf.L[1])
    d = build_ho(nominal, (gf.L[0], gf.L[1]), 1)
    assert np.allclose(c.Gamma, d.Gamma, rtol=1e-12, atol=1e-12)
    assert np.allclose(c.Omega_x, d.Omega_x, rtol=1e-12, atol=1e-12)
    assert np.allclose(c.Omega_u, d.Omega_u, rtol=1e-12, atol=1e-12)


def test_build_ho_rejects_orders_beyond_cap():
    nominal = desk_nominal()
    L = tuple(np.zeros(2) for _ in range(MAX_TAYLOR_ORDER + 2))
    with pytest.raises(ValueError):
        build_ho(nominal, L, MAX_TAYLOR_ORDER + 1)


# ---------------------------------------------------------------------------
# Recursion conformance against the true auxiliary variables


def _simulate_aux_identity(kind_name, signal, n_steps=400):
    """Drive the true plant with the observer's own truncated disturbance
    model and verify z(k+1) = Gamma z + Omega_x x + Omega_u u + Lambda(k)
    holds for the true auxiliary variables z_i = tau^(i) + L_i' x."""
    model = ContinuousServoModel(5e-3, 1e-2)
    Ts = 1e-3
    nominal = discretize(model, Ts)
    if kind_name == "zo":
        gains = tune_zo(nominal, 0.4)
        m_trunc = 0
    elif kind_name == "fo":
        gains = tune_fo(nominal, EigenSpec((0.7, 0.5)))
        m_trunc = 1
    elif kind_name == "hp":
        gains = tune_hp(nominal, EigenSpec((0.6, 0.4)))
        m_trunc = 0
    else:
        gains = ObserverGains(
            taylor_kind(2), tuple(0.1 * np.ones(2) for _ in range(3))
        )
        m_trunc = 2
    dyn = build(nominal, gains)
    lam = truncation_residuals(dyn, signal, n_steps)

    t = np.arange(n_steps + 1) * Ts
    derivs = [
        eval_disturbance(signal, t, order=j) for j in range(m_trunc + 1)
    ]
    Dj = [disturbance_input(model, Ts, j) for j in range(m_trunc + 1)]

    rng = np.random.default_rng(7)
    u_seq = rng.normal(size=n_steps)
    x = np.array([0.1, -0.2])
    worst = 0.0
    for k in range(n_steps):
        if kind_name == "hp":
            tau_now = eval_disturbance(signal, k * Ts)
            tau_prev = eval_disturbance(signal, (k - 1) * Ts)
            z_true = np.array(
                [tau_prev + dyn.gains.L[0] @ x, tau_now + dyn.gains.L[1] @ x]
            )
        else:
            z_true = np.array(
                [derivs[i][k] + dyn.gains.L[i] @ x for i in range(m_trunc + 1)]
            )
        inc = sum(Dj[j] * derivs[j][k] for j in range(m_trunc + 1))
        x_next = nominal.A @ x + nominal.B * u_seq[k] - inc
        if kind_name == "hp":
            tau_next = eval_disturbance(signal, (k + 1) * Ts)
            z_next_true = np.array(
                [
                    eval_disturbance(signal, k * Ts) + dyn.gains.L[0] @ x_next,
                    tau_next + dyn.gains.L[1] @ x_next,
                ]
            )
        else:
            z_next_true = np.array(
                [
                    derivs[i][k + 1] + dyn.gains.L[i] @ x_next
                    for i in range(m_trunc + 1)
                ]
            )
        pred = (
            dyn.Gamma @ z_true
            + dyn.Omega_x @ x
            + dyn.Omega_u[:, 0] * u_seq[k]
            + lam[k]
        )
        # auxiliary variables scale with the gain rows (up to ~1/Ts^2), so
        # the identity holds in a relative sense
        scale = max(1.0, float(np.max(np.abs(z_next_true))))
        worst = max(worst, float(np.max(np.abs(z_next_true - pred))) / scale)
        x = x_next
    return worst


@pytest.mark.parametrize("kind_name", ["zo", "fo", "hp", "ho"])
def test_recursion_identity_under_smooth_disturbance(kind_name):
    worst = _simulate_aux_identity(kind_name, Sinusoid(0.8, 2.0))
    assert worst < 1e-9


@pytest.mark.parametrize("kind_name", ["zo", "fo", "hp", "ho"])
def test_recursion_identity_under_ramp(kind_name):
    worst = _simulate_aux_identity(kind_name, Ramp(0.6))
    assert worst < 1e-9


def test_truncation_residual_rows_zero_order():
    nominal = desk_nominal()
    dyn = build(nominal, tune_zo(nominal, 0.3))
    lam = truncation_residuals(dyn, Ramp(2.0), 5)
    # forward difference of a ramp: slope * Ts each step
    assert np.allclose(lam[:, 0], 2.0 * nominal.Ts, rtol=1e-12, atol=1e-15)
    lam_const = truncation_residuals(dyn, Constant(5.0), 5)
    assert np.allclose(lam_const, 0.0, atol=0)


def test_truncation_residual_rows_first_order():
    nominal = desk_nominal()
    dyn = build(nominal, tune_fo(nominal, EigenSpec((0.7, 0.5))))
    lam = truncation_residuals(dyn, Ramp(2.0), 5)
    # a ramp is inside the first-order model: both residual rows vanish
    assert np.allclose(lam, 0.0, atol=1e-15)


def test_truncation_residual_rows_high_performance():
    nominal = desk_nominal()
    Ts = nominal.Ts
    dyn = build(nominal, tune_hp(nominal, EigenSpec((0.6, 0.4))))
    lam = truncation_residuals(dyn, Ramp(2.0), 8)
    # row 0 is structurally zero; the second difference of a ramp vanishes
    # away from the kink at t = 0
    assert np.allclose(lam[:, 0], 0.0, atol=0)
    assert np.allclose(lam[2:, 1], 0.0, atol=1e-15)
    sig = Sinusoid(1.0, 5.0)
    lam_s = truncation_residuals(dyn, sig, 200)
    t = np.arange(200) * Ts
    second_diff = (
        eval_disturbance(sig, t + Ts)
        - 2.0 * eval_disturbance(sig, t)
        + eval_disturbance(sig, t - Ts)
    )
    assert np.allclose(lam_s[:, 1], second_diff, rtol=1e-12, atol=1e-15)


# ---------------------------------------------------------------------------
# State helpers


def test_initial_state_gives_zero_estimates():
    nominal = desk_nominal()
    dyn = build(nominal, tune_fo(nominal, EigenSpec((0.7, 0.5))))
    x0 = PlantState(0.4, -1.2)
    st = initial_state(dyn, x0)
    assert np.allclose(reconstruct(dyn, st, x0), 0.0, atol=1e-15)
    assert estimate(dyn, st, x0) == pytest.approx(0.0, abs=1e-15)


def test_observer_update_matches_matrix_recursion():
    nominal = desk_nominal()
    dyn = build(nominal, tune_hp(nominal, EigenSpec((0.6, 0.4))))
    st = ObserverState(np.array([0.3, -0.1]))
    x = PlantState(0.05, 0.8)
    nxt = observer_update(dyn, st, x, u=1.7)
    want = (
        dyn.Gamma @ st.z_hat + dyn.Omega_x @ x.as_array() + dyn.Omega_u[:, 0] * 1.7
    )
    assert np.allclose(nxt.z_hat, want, rtol=0, atol=0)


def test_hp_constant_disturbance_fixed_point():
    # with tau constant the true auxiliary pair is a fixed point of the
    # recursion: estimates stay exact once converged
    model = ContinuousServoModel(5e-3, 1e-2)
    nominal = discretize(model, 1e-3)
    dyn = build(nominal, tune_hp(nominal, EigenSpec((0.6, 0.4))))
    tau = 2.0
    rng = np.random.default_rng(3)
    x = np.array([0.2, -0.5])
    z = np.array([tau + dyn.gains.L[0] @ x, tau + dyn.gains.L[1] @ x])
    for _ in range(50):
        u = float(rng.normal())
        x_next = nominal.A @ x + nominal.B * u - nominal.D0 * tau
        z = dyn.Gamma @ z + dyn.Omega_x @ x + dyn.Omega_u[:, 0] * u
        x = x_next
        est = z[1] - dyn.gains.L[1] @ x
        assert est == pytest.approx(tau, abs=1e-9)


def test_estimation_error_contraction_rate():
    # e_z(k+1) = Gamma e_z(k) when the disturbance sits inside the model:
    # a wrong initial z must contract at the placed eigenvalue rate
    nominal = desk_nominal()
    dyn = build(nominal, tune_zo(nominal, 0.5))
    tau = 1.0
    x = np.array([0.0, 0.0])
    z_true = np.array([tau + dyn.gains.L[0] @ x])
    z_off = z_true + 1.0
    for k in range(30):
        u = 0.3
        x_next = nominal.A @ x + nominal.B * u - nominal.D0 * tau
        z_true = dyn.Gamma @ z_true + dyn.Omega_x @ x + dyn.Omega_u[:, 0] * u
        z_off = dyn.Gamma @ z_off + dyn.Omega_x @ x + dyn.Omega_u[:, 0] * u
        x = x_next
        gap = float(abs(z_off[0] - z_true[0]))
        assert gap == pytest.approx(0.5 ** (k + 1), rel=1e-10)
