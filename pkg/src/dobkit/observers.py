"""Discrete disturbance observers in state space.

Each observer estimates the fictitious nominal disturbance torque acting on
the sampled servo axis from measured state and applied control only. The
common construction introduces auxiliary variables

    z_i = tau^(i) + L_i' x

(the i-th disturbance derivative shifted by a gain row), whose exact
dynamics under the truncated disturbance model collapse to a linear
recursion

    z(k+1) = Gamma z(k) + Omega_x x(k) + Omega_u u(k) + Lambda(k)

with Lambda the truncation residual. The observer propagates z_hat through
the same recursion without Lambda, so the estimation error obeys
e(k+1) = Gamma e(k) + Lambda(k) and the estimate is recovered as
tau_hat^(i) = z_hat_i - L_i' x.

Four variants are provided:

* zero order ("zo"): scalar z, models the disturbance as constant across
  one sample; estimation error is first order in Ts.
* first order ("fo"): two states, models disturbance plus derivative;
  error is second order in Ts and a derivative estimate comes for free.
* generalized Taylor family ("ho"): m-th order truncation of the same
  construction, capped at MAX_TAYLOR_ORDER.
* high performance ("hp"): two states built from the current and previous
  disturbance samples instead of derivatives; the residual is a second
  difference, so it reaches second-order accuracy while only using the
  zero-order plant model.

Lambda is never formed inside an observer. truncation_residuals computes
it from the true disturbance for conformance diagnostics only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .defaults import MAX_TAYLOR_ORDER
from .servo import (
    DiscreteServoModel,
    DisturbanceSignal,
    PlantState,
    disturbance_input,
    eval_disturbance,
)

__all__ = [
    "ObserverKind",
    "ZERO_ORDER",
    "FIRST_ORDER",
    "HIGH_PERFORMANCE",
    "taylor_kind",
    "ObserverGains",
    "AuxiliaryDynamics",
    "ObserverState",
    "build_zo",
    "build_fo",
    "build_hp",
    "build_ho",
    "build",
    "initial_state",
    "observer_update",
    "reconstruct",
    "estimate",
    "estimate_index",
    "truncation_residuals",
]


@dataclass(frozen=True)
class ObserverKind:
    """Observer family tag. name is one of "zo", "fo", "ho", "hp";
    taylor_order is meaningful for "ho" only."""

    name: str
    taylor_order: int = 0

    def __post_init__(self) -> None:
        if self.name not in ("zo", "fo", "ho", "hp"):
            raise ValueError(f"unknown observer kind {self.name!r}")
        if self.name == "ho":
            if not (0 <= self.taylor_order <= MAX_TAYLOR_ORDER):
                raise ValueError(
                    f"taylor_order must be in [0, {MAX_TAYLOR_ORDER}], "
                    f"got {self.taylor_order}"
                )
        elif self.taylor_order != 0:
            raise ValueError("taylor_order applies to the 'ho' kind only")

    @property
    def dim(self) -> int:
        if self.name == "zo":
            return 1
        if self.name in ("fo", "hp"):
            return 2
        return self.taylor_order + 1


ZERO_ORDER = ObserverKind("zo")
FIRST_ORDER = ObserverKind("fo")
HIGH_PERFORMANCE = ObserverKind("hp")


def taylor_kind(order: int) -> ObserverKind:
    """Generalized Taylor observer of the given truncation order."""
    return ObserverKind("ho", order)


@dataclass(frozen=True, eq=False)
class ObserverGains:
    """Gain rows L_i, one 2-vector per auxiliary state, plus the scalar
    free parameters they were derived from (empty when L was given
    directly)."""

    kind: ObserverKind
    L: tuple[np.ndarray, ...]
    free_params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if len(self.L) != self.kind.dim:
            raise ValueError(
                f"{self.kind.name} needs {self.kind.dim} gain rows, got {len(self.L)}"
            )
        for Li in self.L:
            arr = np.asarray(Li, dtype=float)
            if arr.shape != (2,) or not np.all(np.isfinite(arr)):
                raise ValueError("each gain row must be a finite 2-vector")


@dataclass(frozen=True, eq=False)
class AuxiliaryDynamics:
    """The built observer recursion matrices."""

    Gamma: np.ndarray
    Omega_x: np.ndarray
    Omega_u: np.ndarray
    gains: ObserverGains
    nominal: DiscreteServoModel

    @property
    def dim(self) -> int:
        return self.Gamma.shape[0]

    @property
    def kind(self) -> ObserverKind:
        return self.gains.kind


@dataclass(frozen=True, eq=False)
class ObserverState:
    """Auxiliary state estimate z_hat."""

    z_hat: np.ndarray


def _as_gain(L) -> np.ndarray:
    arr = np.asarray(L, dtype=float).reshape(2)
    if not np.all(np.isfinite(arr)):
        raise ValueError("gain row must be finite")
    return arr


def build_zo(nominal: DiscreteServoModel, L0) -> AuxiliaryDynamics:
    """Zero-order observer: scalar auxiliary state z = tau + L0' x.

    Gamma = 1 - L0' D0, Omega_x = L0' (A + D0 L0' - I), Omega_u = L0' B.
    """
    L0 = _as_gain(L0)
    A, B, D0 = nominal.A, nominal.B, nominal.D0
    g = 1.0 - L0 @ D0
    Gamma = np.array([[g]])
    Omega_x = (L0 @ (A + np.outer(D0, L0) - np.eye(2)))[None, :]
    Omega_u = np.array([[L0 @ B]])
    gains = ObserverGains(ZERO_ORDER, (L0,))
    return AuxiliaryDynamics(Gamma, Omega_x, Omega_u, gains, nominal)


def build_fo(nominal: DiscreteServoModel, L0, L1) -> AuxiliaryDynamics:
    """First-order observer: z = [tau + L0' x, tau_dot + L1' x]."""
    L0, L1 = _as_gain(L0), _as_gain(L1)
    A, B, D0, D1, Ts = nominal.A, nominal.B, nominal.D0, nominal.D1, nominal.Ts
    Gamma = np.array(
        [
            [1.0 - L0 @ D0, Ts - L0 @ D1],
            [-(L1 @ D0), 1.0 - L1 @ D1],
        ]
    )
    Omega_x = np.vstack(
        [
            L0 @ A - Gamma[0, 0] * L0 - Gamma[0, 1] * L1,
            L1 @ A - Gamma[1, 0] * L0 - Gamma[1, 1] * L1,
        ]
    )
    Omega_u = np.array([[L0 @ B], [L1 @ B]])
    gains = ObserverGains(FIRST_ORDER, (L0, L1))
    return AuxiliaryDynamics(Gamma, Omega_x, Omega_u, gains, nominal)


def build_hp(nominal: DiscreteServoModel, L0, L1) -> AuxiliaryDynamics:
    """High-performance observer.

    z0 = tau(k-1) + L0' x(k) and z1 = tau(k) + L1' x(k), so the residual is
    the second difference of the disturbance. Substituting the zero-order
    plant model into the definitions gives

        Gamma = [[0, 1 - L0' D0], [-1, 2 - L1' D0]]
        Omega_x row 0 = L0' A - (1 - L0' D0) L1'
        Omega_x row 1 = L1' A + L0' - (2 - L1' D0) L1'

    The L0' term in row 1 comes from eliminating tau(k-1) = z0 - L0' x and
    is required for the constant-disturbance fixed point to be exact.
    """
    L0, L1 = _as_gain(L0), _as_gain(L1)
    A, B, D0 = nominal.A, nominal.B, nominal.D0
    g0 = 1.0 - L0 @ D0
    g1 = 2.0 - L1 @ D0
    Gamma = np.array([[0.0, g0], [-1.0, g1]])
    Omega_x = np.vstack(
        [
            L0 @ A - g0 * L1,
            L1 @ A + L0 - g1 * L1,
        ]
    )
    Omega_u = np.array([[L0 @ B], [L1 @ B]])
    gains = ObserverGains(HIGH_PERFORMANCE, (L0, L1))
    return AuxiliaryDynamics(Gamma, Omega_x, Omega_u, gains, nominal)


def build_ho(
    nominal: DiscreteServoModel, L: Sequence, taylor_order: int
) -> AuxiliaryDynamics:
    """Generalized Taylor observer of arbitrary order m <= MAX_TAYLOR_ORDER.

    With T the upper-triangular Taylor shift T[i, j] = Ts^(j-i) / (j-i)!
    and D_j the order-j disturbance input vectors,

        Gamma[i, j] = T[i, j] - L_i' D_j
        Omega_x row i = L_i' A - sum_j Gamma[i, j] L_j'
        Omega_u[i] = L_i' B

    Orders 0 and 1 reproduce build_zo and build_fo exactly.
    """
    kind = taylor_kind(taylor_order)
    m = taylor_order
    rows = [_as_gain(Li) for Li in L]
    if len(rows) != m + 1:
        raise ValueError(f"order {m} needs {m + 1} gain rows, got {len(rows)}")
    A, B, Ts = nominal.A, nominal.B, nominal.Ts
    Dvecs = [disturbance_input(nominal.source, Ts, j) for j in range(m + 1)]
    n = m + 1
    Gamma = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            shift = Ts ** (j - i) / math.factorial(j - i) if j >= i else 0.0
            Gamma[i, j] = shift - rows[i] @ Dvecs[j]
    Omega_x = np.zeros((n, 2))
    for i in range(n):
        Omega_x[i] = rows[i] @ A - sum(Gamma[i, j] * rows[j] for j in range(n))
    Omega_u = np.array([[Li @ B] for Li in rows])
    gains = ObserverGains(kind, tuple(rows))
    return AuxiliaryDynamics(Gamma, Omega_x, Omega_u, gains, nominal)


def build(nominal: DiscreteServoModel, gains: ObserverGains) -> AuxiliaryDynamics:
    """Build the recursion for pre-assembled gains."""
    k = gains.kind
    if k.name == "zo":
        return build_zo(nominal, gains.L[0])
    if k.name == "fo":
        return build_fo(nominal, gains.L[0], gains.L[1])
    if k.name == "hp":
        return build_hp(nominal, gains.L[0], gains.L[1])
    return build_ho(nominal, gains.L, k.taylor_order)


def initial_state(dyn: AuxiliaryDynamics, x0: PlantState) -> ObserverState:
    """z_hat(0) = L_i' x(0), which makes every initial estimate zero."""
    xv = x0.as_array()
    return ObserverState(np.array([Li @ xv for Li in dyn.gains.L]))


def observer_update(
    dyn: AuxiliaryDynamics, state: ObserverState, x: PlantState, u: float
) -> ObserverState:
    """One recursion step driven by measured state and applied control."""
    z = dyn.Gamma @ state.z_hat + dyn.Omega_x @ x.as_array() + dyn.Omega_u[:, 0] * u
    return ObserverState(z)


def reconstruct(
    dyn: AuxiliaryDynamics, state: ObserverState, x: PlantState
) -> np.ndarray:
    """All reconstructed channels tau_hat_i = z_hat_i - L_i' x.

    For the Taylor kinds index i is the i-th disturbance derivative. For
    the high-performance kind index 1 is the current-sample estimate and
    index 0 is the one-sample-delayed estimate (diagnostics only).
    """
    xv = x.as_array()
    return np.array([z - Li @ xv for z, Li in zip(state.z_hat, dyn.gains.L)])


def estimate_index(kind: ObserverKind) -> int:
    """Index of the primary disturbance estimate within reconstruct()."""
    return 1 if kind.name == "hp" else 0


def estimate(dyn: AuxiliaryDynamics, state: ObserverState, x: PlantState) -> float:
    """The primary disturbance estimate used for compensation."""
    i = estimate_index(dyn.kind)
    return float(state.z_hat[i] - dyn.gains.L[i] @ x.as_array())


def truncation_residuals(
    dyn: AuxiliaryDynamics, signal: DisturbanceSignal, n_steps: int
) -> np.ndarray:
    """Analytic residual sequence Lambda(k), k = 0 .. n_steps-1.

    Computed from the true disturbance, for conformance diagnostics only.
    Rows follow the exact recursion residual, so for the first-order kind
    row 0 carries the (second order in Ts) forward-difference remainder
    tau(k+1) - tau(k) - Ts tau_dot(k) rather than the idealized zero.

    * zo:      [tau(k+1) - tau(k)]
    * fo:      [tau(k+1) - tau(k) - Ts tau_dot(k), tau_dot(k+1) - tau_dot(k)]
    * hp:      [0, tau(k+1) - 2 tau(k) + tau(k-1)]
    * ho(m):   row i = tau^(i)(k+1) - sum_j Ts^(j-i)/(j-i)! tau^(j)(k)
    """
    Ts = dyn.nominal.Ts
    k = np.arange(n_steps)
    kind = dyn.kind
    if kind.name == "hp":
        tau_prev = eval_disturbance(signal, (k - 1) * Ts)
        tau_now = eval_disturbance(signal, k * Ts)
        tau_next = eval_disturbance(signal, (k + 1) * Ts)
        lam = np.zeros((n_steps, 2))
        lam[:, 1] = tau_next - 2.0 * tau_now + tau_prev
        return lam
    m = 0 if kind.name == "zo" else (1 if kind.name == "fo" else kind.taylor_order)
    derivs_now = [eval_disturbance(signal, k * Ts, order=i) for i in range(m + 1)]
    derivs_next = [eval_disturbance(signal, (k + 1) * Ts, order=i) for i in range(m + 1)]
    lam = np.zeros((n_steps, m + 1))
    for i in range(m + 1):
        shift = sum(
            Ts ** (j - i) / math.factorial(j - i) * derivs_now[j]
            for j in range(i, m + 1)
        )
        lam[:, i] = derivs_next[i] - shift
    return lam
