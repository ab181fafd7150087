"""Servo axis models, exact discretization, and disturbance signals.

The continuous plant is a rigid servo axis with inertia J and viscous
friction b_visc driven by a torque input u and loaded by an external
disturbance torque tau_d:

    dq/dt  = dq
    J ddq/dt = u - b_visc * dq - tau_d

In state-space form with x = [q, dq] and b = b_visc / J the friction entry
is dissipative (the velocity mode decays as exp(-b*t)):

    A_c = [[0, 1], [0, -b]],   B_c = D_c = [0, 1/J]

Sampling with a zero-order hold on u gives the exact discrete model

    A = exp(A_c Ts)
    B = int_0^Ts exp(A_c s) B_c ds

plus a family of disturbance input vectors

    D_i = int_0^Ts exp(A_c s) (Ts - s)^i / i!  ds * D_c

where D_0 weights the sampled disturbance and D_1 its first derivative.
All of these reduce to evaluations of the phi functions
phi_k(z) = sum_n z^n / (n + k)! at z = -b*Ts:

    A[0,1] = Ts phi_1,  B = D_0 = [Ts^2 phi_2, Ts phi_1] / J,
    D_i = [Ts^(i+2) phi_(i+2), Ts^(i+1) phi_(i+1)] / J
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .defaults import DEFAULT_SUBSTEPS, SERIES_SWITCH

__all__ = [
    "ContinuousServoModel",
    "DiscreteServoModel",
    "PlantState",
    "Zero",
    "Constant",
    "Ramp",
    "Sinusoid",
    "SineProduct",
    "MultiSine",
    "Sampled",
    "DisturbanceSignal",
    "discretize",
    "disturbance_input",
    "eval_disturbance",
    "exact_disturbance_increment",
    "increment_weights",
    "increment_series",
    "plant_step",
]


@dataclass(frozen=True)
class ContinuousServoModel:
    """Rigid servo axis.

    Parameters
    ----------
    J : float
        Rotor inertia, kg m^2. Strictly positive.
    b_visc : float
        Viscous friction coefficient, N m s / rad. Non-negative.
    """

    J: float
    b_visc: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.J) and self.J > 0.0):
            raise ValueError(f"inertia must be finite and positive, got {self.J}")
        if not (math.isfinite(self.b_visc) and self.b_visc >= 0.0):
            raise ValueError(
                f"viscous friction must be finite and non-negative, got {self.b_visc}"
            )

    @property
    def friction_rate(self) -> float:
        """Friction to inertia ratio b = b_visc / J in 1/s."""
        return self.b_visc / self.J


@dataclass(frozen=True, eq=False)
class DiscreteServoModel:
    """Zero-order-hold discretization of a ContinuousServoModel.

    Attributes
    ----------
    A : (2, 2) ndarray
        State transition matrix.
    B : (2,) ndarray
        Control input vector. Equals D0 because control and disturbance
        enter through the same channel.
    D0 : (2,) ndarray
        Zero-order disturbance input vector.
    D1 : (2,) ndarray
        First-order disturbance input vector (weights the sampled
        disturbance derivative).
    Ts : float
        Sampling time, s.
    source : ContinuousServoModel
        The continuous model this was built from.
    """

    A: np.ndarray
    B: np.ndarray
    D0: np.ndarray
    D1: np.ndarray
    Ts: float
    source: ContinuousServoModel


@dataclass(frozen=True)
class PlantState:
    """Plant state sample: position q (rad) and velocity dq (rad/s)."""

    q: float
    dq: float

    def as_array(self) -> np.ndarray:
        return np.array([self.q, self.dq])

    @staticmethod
    def from_array(x: np.ndarray) -> "PlantState":
        return PlantState(float(x[0]), float(x[1]))


def _phi_family(z: float, kmax: int) -> np.ndarray:
    """Evaluate phi_k(z) = sum_{n>=0} z^n / (n+k)! for k = 0 .. kmax.

    For |z| < SERIES_SWITCH each value is summed directly; the series is
    fast and free of cancellation there. For larger |z| the upward
    recurrence phi_{k+1} = (phi_k - 1/k!) / z from phi_0 = exp(z) is
    stable. Naive closed forms lose up to six digits near small |z| for
    k >= 3, which is why the series region is this wide.
    """
    out = np.empty(kmax + 1)
    if abs(z) < SERIES_SWITCH:
        for k in range(kmax + 1):
            total = 0.0
            term = 1.0 / math.factorial(k)
            n = 0
            while True:
                total += term
                n += 1
                term *= z / (n + k)
                if abs(term) <= 1e-20 * abs(total) or n > 60:
                    total += term
                    break
            out[k] = total
    else:
        out[0] = math.exp(z)
        if kmax >= 1:
            # expm1 keeps phi_1 accurate for all z < 0
            out[1] = -math.expm1(z) / (-z) if z != 0.0 else 1.0
        for k in range(2, kmax + 1):
            out[k] = (out[k - 1] - 1.0 / math.factorial(k - 1)) / z
    return out


def discretize(model: ContinuousServoModel, Ts: float) -> DiscreteServoModel:
    """Exact zero-order-hold discretization.

    Parameters
    ----------
    model : ContinuousServoModel
    Ts : float
        Sampling time in seconds, strictly positive and finite.

    Returns
    -------
    DiscreteServoModel
        With A, B, D0, D1 evaluated in closed form via the phi family.
    """
    if not (math.isfinite(Ts) and Ts > 0.0):
        raise ValueError(f"sampling time must be finite and positive, got {Ts}")
    b = model.friction_rate
    ph = _phi_family(-b * Ts, 3)
    A = np.array([[1.0, Ts * ph[1]], [0.0, math.exp(-b * Ts)]])
    D0 = np.array([Ts * Ts * ph[2], Ts * ph[1]]) / model.J
    D1 = np.array([Ts ** 3 * ph[3], Ts * Ts * ph[2]]) / model.J
    return DiscreteServoModel(A=A, B=D0.copy(), D0=D0, D1=D1, Ts=Ts, source=model)


def disturbance_input(model: ContinuousServoModel, Ts: float, order: int) -> np.ndarray:
    """Disturbance input vector of the given Taylor order.

    D_order = int_0^Ts exp(A_c s) (Ts - s)^order / order! ds * D_c,
    evaluated as [Ts^(order+2) phi_(order+2), Ts^(order+1) phi_(order+1)] / J.
    Order 0 equals the control input vector B; order 1 weights the sampled
    disturbance derivative.
    """
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    if not (math.isfinite(Ts) and Ts > 0.0):
        raise ValueError(f"sampling time must be finite and positive, got {Ts}")
    b = model.friction_rate
    ph = _phi_family(-b * Ts, order + 2)
    return np.array(
        [Ts ** (order + 2) * ph[order + 2], Ts ** (order + 1) * ph[order + 1]]
    ) / model.J


# ---------------------------------------------------------------------------
# Disturbance signals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Zero:
    """Identically zero disturbance."""


@dataclass(frozen=True)
class Constant:
    """Constant torque, N m."""

    level: float


@dataclass(frozen=True)
class Ramp:
    """Linearly growing torque: slope * t for t >= 0, zero before."""

    slope: float


@dataclass(frozen=True)
class Sinusoid:
    """amplitude * sin(2 pi frequency t + phase)."""

    amplitude: float
    frequency: float
    phase: float = 0.0


@dataclass(frozen=True)
class SineProduct:
    """One additive term of a MultiSine: amplitude times a product of
    sinusoidal factors, each factor ("sin" | "cos", angular_rate) evaluated
    at the window-relative time t - t_on.
    """

    amplitude: float
    factors: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        for kind, _ in self.factors:
            if kind not in ("sin", "cos"):
                raise ValueError(f"factor kind must be 'sin' or 'cos', got {kind!r}")


@dataclass(frozen=True)
class MultiSine:
    """Sum of sine-product terms, active on the window [t_on, t_off]."""

    terms: tuple[SineProduct, ...]
    t_on: float
    t_off: float

    def __post_init__(self) -> None:
        if not self.t_off > self.t_on:
            raise ValueError("t_off must exceed t_on")


@dataclass(frozen=True, eq=False)
class Sampled:
    """Pre-sampled series with a hold rule.

    values[i] applies at t = i * Ts_signal. hold "zoh" holds each value
    until the next sample; "linear" interpolates between samples. Outside
    the sampled range the edge value is held.
    """

    values: np.ndarray
    Ts_signal: float
    hold: str = "zoh"

    def __post_init__(self) -> None:
        if self.hold not in ("zoh", "linear"):
            raise ValueError(f"hold must be 'zoh' or 'linear', got {self.hold!r}")
        if self.Ts_signal <= 0.0:
            raise ValueError("signal sampling time must be positive")


DisturbanceSignal = Union[Zero, Constant, Ramp, Sinusoid, MultiSine, Sampled]


def _trig(kind: str, arg: np.ndarray, order: int, rate: float) -> np.ndarray:
    # d^order/dt^order of sin/cos(rate * t) evaluated with a phase shift
    shift = order * math.pi / 2.0
    base = arg + shift if kind == "sin" else arg + shift + math.pi / 2.0
    return rate ** order * np.sin(base)


def eval_disturbance(signal: DisturbanceSignal, t, order: int = 0):
    """Evaluate a disturbance signal or one of its time derivatives.

    Parameters
    ----------
    signal : DisturbanceSignal
    t : float or ndarray
        Evaluation time(s), s.
    order : int
        Derivative order; 0 returns the signal itself. Windowed signals are
        differentiated inside their window only (the window edges are
        treated one-sidedly). Sampled signals support order 0, and order 1
        for linear hold.

    Returns
    -------
    float or ndarray matching the shape of t.
    """
    scalar = np.isscalar(t)
    tt = np.asarray(t, dtype=float)
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    if isinstance(signal, Zero):
        out = np.zeros_like(tt)
    elif isinstance(signal, Constant):
        out = np.full_like(tt, signal.level) if order == 0 else np.zeros_like(tt)
    elif isinstance(signal, Ramp):
        if order == 0:
            out = np.where(tt >= 0.0, signal.slope * tt, 0.0)
        elif order == 1:
            out = np.where(tt >= 0.0, signal.slope, 0.0)
        else:
            out = np.zeros_like(tt)
    elif isinstance(signal, Sinusoid):
        w = 2.0 * math.pi * signal.frequency
        out = signal.amplitude * _trig("sin", w * tt + signal.phase, order, w)
    elif isinstance(signal, MultiSine):
        s = tt - signal.t_on
        out = np.zeros_like(tt)
        for term in signal.terms:
            out = out + _sine_product_deriv(term, s, order)
        out = np.where((tt >= signal.t_on) & (tt <= signal.t_off), out, 0.0)
    elif isinstance(signal, Sampled):
        out = _eval_sampled(signal, tt, order)
    else:
        raise TypeError(f"unknown disturbance signal {type(signal).__name__}")
    return float(out) if scalar else out


def _sine_product_deriv(term: SineProduct, s: np.ndarray, order: int) -> np.ndarray:
    # Leibniz expansion over the (at most few) factors
    factors = term.factors
    if len(factors) == 0:
        return np.full_like(s, term.amplitude) if order == 0 else np.zeros_like(s)
    if len(factors) == 1:
        kind, w = factors[0]
        return term.amplitude * _trig(kind, w * s, order, w)
    if len(factors) == 2:
        (k1, w1), (k2, w2) = factors
        out = np.zeros_like(s)
        for j in range(order + 1):
            out = out + (
                math.comb(order, j)
                * _trig(k1, w1 * s, j, w1)
                * _trig(k2, w2 * s, order - j, w2)
            )
        return term.amplitude * out
    raise ValueError("sine-product terms support at most two factors")


def _eval_sampled(signal: Sampled, tt: np.ndarray, order: int) -> np.ndarray:
    n = len(signal.values)
    idx = np.floor(tt / signal.Ts_signal).astype(int)
    idx = np.clip(idx, 0, n - 1)
    if signal.hold == "zoh":
        if order == 0:
            return np.asarray(signal.values, dtype=float)[idx]
        return np.zeros_like(tt)
    # linear hold
    idx_hi = np.clip(idx + 1, 0, n - 1)
    frac = tt / signal.Ts_signal - idx
    frac = np.clip(frac, 0.0, 1.0)
    v = np.asarray(signal.values, dtype=float)
    if order == 0:
        return v[idx] * (1.0 - frac) + v[idx_hi] * frac
    if order == 1:
        return (v[idx_hi] - v[idx]) / signal.Ts_signal
    return np.zeros_like(tt)


# ---------------------------------------------------------------------------
# Exact disturbance increment and the plant step
# ---------------------------------------------------------------------------


def increment_weights(model: DiscreteServoModel, substeps: int):
    """Composite-Simpson nodes and weight vectors for the increment integral.

    The increment over step k is
        Pi(k) = int_0^Ts exp(A_c s) D_c tau_d((k+1) Ts - s) ds
    so with nodes s_j in [0, Ts] the rule reduces to a weighted sum of
    disturbance samples at times (k+1) Ts - s_j. The state-dependent part
    exp(A_c s_j) D_c is fixed per model, so it is folded into the weights.

    Parameters
    ----------
    model : DiscreteServoModel
    substeps : int
        Number of Simpson panels (>= 1). Each panel contributes two
        sub-intervals, giving 2 * substeps + 1 nodes.

    Returns
    -------
    (nodes, W) : ndarray (m,), ndarray (m, 2)
        Node offsets s_j and per-node weight vectors.
    """
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")
    Ts = model.Ts
    b = model.source.friction_rate
    J = model.source.J
    m = 2 * substeps
    h = Ts / m
    s = np.linspace(0.0, Ts, m + 1)
    coeff = np.ones(m + 1)
    coeff[1:-1:2] = 4.0
    coeff[2:-1:2] = 2.0
    # columns of exp(A_c s) D_c: [phi-like velocity integral, exp decay] / J
    if b == 0.0:
        psi1 = s.copy()
    else:
        psi1 = -np.expm1(-b * s) / b
    psi2 = np.exp(-b * s)
    W = np.stack([psi1, psi2], axis=1) * (coeff * h / 3.0)[:, None] / J
    return s, W


def exact_disturbance_increment(
    model: DiscreteServoModel,
    signal: DisturbanceSignal,
    k: int,
    substeps: int = DEFAULT_SUBSTEPS,
) -> np.ndarray:
    """State increment contributed by the disturbance over step k.

    Composite-Simpson quadrature of the convolution integral. Exact (to
    rounding) for signals that are polynomial in time up to cubic inside
    the step when the axis is frictionless; order-4 convergent otherwise.
    """
    nodes, W = increment_weights(model, substeps)
    times = (k + 1) * model.Ts - nodes
    tau = eval_disturbance(signal, times)
    return np.asarray(tau) @ W


def increment_series(
    model: DiscreteServoModel,
    signal: DisturbanceSignal,
    n_steps: int,
    substeps: int = DEFAULT_SUBSTEPS,
) -> np.ndarray:
    """All increments Pi(k) for k = 0 .. n_steps-1 as an (n_steps, 2) array.

    Identical values to calling exact_disturbance_increment per step, but
    evaluated in one vectorized sweep since the disturbance is exogenous.
    """
    nodes, W = increment_weights(model, substeps)
    times = (np.arange(1, n_steps + 1)[:, None] * model.Ts) - nodes[None, :]
    tau = eval_disturbance(signal, times.reshape(-1)).reshape(n_steps, -1)
    return tau @ W


def plant_step(
    model: DiscreteServoModel,
    x: PlantState,
    u: float,
    increment: np.ndarray,
) -> PlantState:
    """Advance the plant one sample: x+ = A x + B u - increment."""
    xv = model.A @ x.as_array() + model.B * u - np.asarray(increment)
    return PlantState.from_array(xv)
