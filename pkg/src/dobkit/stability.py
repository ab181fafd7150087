"""Gain tuning, stability constraints, and loop analysis.

Covers four concerns around the observer recursion z(k+1) = Gamma z(k) + ...:

* tuning: choose gain rows so Gamma has prescribed eigenvalues. The
  zero-order observer exposes one free parameter l0 with Gamma = 1 - l0;
  the first-order and high-performance observers are tuned by matching
  the trace and determinant of Gamma to two desired real eigenvalues.
* constraints: the scalar inequalities 0 < l0 < 2 (open loop) and
  0 < alpha*l0 < 2 (disturbance estimate fed back, alpha the nominal to
  true inertia ratio), plus the general spectral-radius condition.
* certification: a discrete Lyapunov certificate with an ultimate bound
  on the estimation error under bounded truncation residuals.
* loop analysis: the augmented inner-loop matrix with its structural
  unit eigenvalue, and the outer-loop closed system in a modal basis
  where the feedback provably cannot move the observer eigenvalue.

Conventions: eigenvalue specifications are real and strictly inside the
unit circle; the Lyapunov pair is normalized so lambda_min(Q) = 2, which
fixes the otherwise free scale of P and makes reports reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .defaults import (
    CONDITION_LIMIT,
    FRICTION_RATIO_TOL,
    UNIT_EIGEN_TOL,
)
from .observers import (
    FIRST_ORDER,
    HIGH_PERFORMANCE,
    ZERO_ORDER,
    AuxiliaryDynamics,
    ObserverGains,
    ObserverKind,
    build,
    build_fo,
    build_hp,
    build_zo,
)
from .servo import ContinuousServoModel, DiscreteServoModel, discretize

__all__ = [
    "EigenSpec",
    "PlacementError",
    "CertificationError",
    "LyapunovCertificate",
    "ConstraintRow",
    "StabilityReport",
    "LoopConfig",
    "ObserverSetup",
    "InnerLoop",
    "ClosedLoop",
    "SweepRow",
    "l0_from_bandwidth",
    "tune_zo",
    "check_zo",
    "ZoCheck",
    "tune_fo",
    "tune_hp",
    "fo_direction",
    "hp_direction",
    "spectral_radius",
    "certify",
    "analyze",
    "inner_loop_matrix",
    "closed_loop_matrix",
    "sweep_stability",
]


class PlacementError(RuntimeError):
    """Eigenvalue placement failed; carries the residual achieved."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class CertificationError(RuntimeError):
    """No certificate exists; carries the offending eigenvalues."""

    def __init__(self, message: str, eigenvalues: np.ndarray):
        super().__init__(message)
        self.eigenvalues = eigenvalues


@dataclass(frozen=True)
class EigenSpec:
    """Desired observer eigenvalues: real, strictly inside the unit circle."""

    desired: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.desired) == 0:
            raise ValueError("at least one desired eigenvalue required")
        clean = []
        for lam in self.desired:
            if isinstance(lam, complex):
                if lam.imag != 0.0:
                    raise ValueError(
                        "complex desired eigenvalues are not supported; "
                        "specify real values strictly inside the unit circle"
                    )
                lam = lam.real
            lam = float(lam)
            if not math.isfinite(lam):
                raise ValueError("desired eigenvalues must be finite")
            if abs(lam) >= 1.0:
                raise ValueError(
                    f"desired eigenvalue {lam} violates |lambda| < 1"
                )
            clean.append(lam)
        object.__setattr__(self, "desired", tuple(clean))

    def pair(self) -> tuple[float, float]:
        if len(self.desired) != 2:
            raise ValueError("this observer takes exactly two eigenvalues")
        return self.desired[0], self.desired[1]


def spectral_radius(M: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(np.atleast_2d(M)))))


# ---------------------------------------------------------------------------
# Tuning


def l0_from_bandwidth(bandwidth: float, Ts: float) -> float:
    """Convert a continuous estimator bandwidth to a discrete gain.

    Uses the labeled convention l0 = 1 - exp(-bandwidth * Ts), the value
    that places the zero-order estimation-error mode at the sampled decay
    of a first-order lag with the given bandwidth.

    Parameters
    ----------
    bandwidth : float
        Estimator bandwidth, rad/s. Must be finite and nonnegative.
    Ts : float
        Sampling time, s. Must be positive.

    Returns
    -------
    float
        Gain parameter in [0, 1]; rounds to the deadbeat value 1.0 once
        bandwidth * Ts exceeds roughly 37.

    Notes
    -----
    This is one convention among several in circulation; gains quoted for
    a particular rig do not necessarily follow it. When a specific l0 is
    known, pass it directly instead of converting.
    """
    bandwidth = float(bandwidth)
    Ts = float(Ts)
    if not (math.isfinite(bandwidth) and bandwidth >= 0.0):
        raise ValueError("bandwidth must be finite and nonnegative")
    if not (Ts > 0.0):
        raise ValueError("Ts must be positive")
    return -math.expm1(-bandwidth * Ts)


def tune_zo(nominal: DiscreteServoModel, l0: float) -> ObserverGains:
    """Zero-order gain row L0 = (l0 / ||D0||_1) [1, 1]'.

    Both components of D0 are positive for the dissipative axis, so
    L0' D0 = l0 exactly and Gamma = 1 - l0.
    """
    l0 = float(l0)
    if not math.isfinite(l0):
        raise ValueError("l0 must be finite")
    v = np.ones(2)
    scale = l0 / float(np.sum(np.abs(nominal.D0)))
    return ObserverGains(ZERO_ORDER, (scale * v,), (l0,))


@dataclass(frozen=True)
class ZoCheck:
    """Both scalar constraint verdicts for a zero-order gain."""

    l0: float
    alpha: float
    open_loop_pass: bool
    inner_loop_pass: bool
    governing: str  # which constraint the caller asked about


def check_zo(l0: float, alpha: float = 1.0, inner_loop: bool = False) -> ZoCheck:
    """Evaluate 0 < l0 < 2 and 0 < alpha*l0 < 2 (both strict)."""
    if not (alpha > 0.0):
        raise ValueError("alpha must be positive")
    open_ok = 0.0 < l0 < 2.0
    inner_ok = 0.0 < alpha * l0 < 2.0
    return ZoCheck(
        l0=float(l0),
        alpha=float(alpha),
        open_loop_pass=open_ok,
        inner_loop_pass=inner_ok,
        governing="inner-loop" if inner_loop else "open-loop",
    )


def fo_direction(nominal: DiscreteServoModel) -> np.ndarray:
    """Direction vector [6/D0_1, -4/D0_2] shared by both first-order rows."""
    return np.array([6.0 / nominal.D0[0], -4.0 / nominal.D0[1]])


def hp_direction(nominal: DiscreteServoModel) -> np.ndarray:
    """Direction vector [1/D0_1, 1/D0_2] shared by both HP rows."""
    return np.array([1.0 / nominal.D0[0], 1.0 / nominal.D0[1]])


def fo_gains_from_params(
    nominal: DiscreteServoModel, l0: float, l1: float
) -> ObserverGains:
    """First-order rows L0 = l0 v, L1 = l1 v along the shared direction."""
    v = fo_direction(nominal)
    return ObserverGains(FIRST_ORDER, (l0 * v, l1 * v), (float(l0), float(l1)))


def hp_gains_from_params(
    nominal: DiscreteServoModel, l0: float, l1: float
) -> ObserverGains:
    """HP rows L0 = (0.5 + l0) v, L1 = (1 + l1) v along the shared direction."""
    v = hp_direction(nominal)
    return ObserverGains(
        HIGH_PERFORMANCE,
        ((0.5 + l0) * v, (1.0 + l1) * v),
        (float(l0), float(l1)),
    )


def _check_placement(
    dyn: AuxiliaryDynamics, spec: EigenSpec, tol: float, label: str
) -> None:
    # compare characteristic coefficients, not extracted roots: root
    # extraction is ill-conditioned at repeated eigenvalues while the
    # trace/determinant match is exact-arithmetic equivalent
    G = dyn.Gamma
    want = np.asarray(spec.desired)
    if G.shape[0] == 1:
        residual = abs(float(G[0, 0]) - want[0])
    else:
        tr = float(G[0, 0] + G[1, 1])
        det = float(G[0, 0] * G[1, 1] - G[0, 1] * G[1, 0])
        residual = max(abs(tr - want.sum()), abs(det - want.prod()))
    if residual > tol:
        raise PlacementError(
            f"{label} placement residual {residual:.3e} exceeds {tol:.1e}",
            residual,
        )


def tune_fo(
    nominal: DiscreteServoModel, spec: EigenSpec, Ts: Optional[float] = None
) -> ObserverGains:
    """Place both first-order eigenvalues by a Newton solve on (l0, l1).

    Matches the trace and determinant of Gamma to (l1+l2, l1*l2). With
    p = v'D0 and w = v'D1 the map is affine (the bilinear terms of the
    determinant cancel), so the Newton iteration with the analytic
    Jacobian lands on the solution in one step from the documented seed
    l0 = 1 - (l1+l2)/2, l1 = (l1*l2 - 1 + 2 l0)/(2 Ts).
    """
    if Ts is not None and not math.isclose(Ts, nominal.Ts, rel_tol=1e-12):
        raise ValueError("Ts disagrees with the discrete model's sampling time")
    lam1, lam2 = spec.pair()
    Ts = nominal.Ts
    v = fo_direction(nominal)
    p = float(v @ nominal.D0)
    w = float(v @ nominal.D1)
    tr_target = lam1 + lam2
    det_target = lam1 * lam2

    l0 = 1.0 - tr_target / 2.0
    l1 = (det_target - 1.0 + 2.0 * l0) / (2.0 * Ts)
    residual = math.inf
    for _ in range(50):
        G00 = 1.0 - l0 * p
        G01 = Ts - l0 * w
        G10 = -l1 * p
        G11 = 1.0 - l1 * w
        F = np.array(
            [G00 + G11 - tr_target, G00 * G11 - G01 * G10 - det_target]
        )
        residual = float(np.max(np.abs(F)))
        if residual <= 1e-13:
            break
        J = np.array(
            [
                [-p, -w],
                [-p * G11 + w * G10, -w * G00 + p * G01],
            ]
        )
        step = np.linalg.solve(J, F)
        l0 -= step[0]
        l1 -= step[1]
    else:
        raise PlacementError(
            f"Newton did not converge in 50 iterations, residual {residual:.3e}",
            residual,
        )
    gains = fo_gains_from_params(nominal, l0, l1)
    _check_placement(build(nominal, gains), spec, 1e-10, "first-order")
    return gains


def tune_hp(nominal: DiscreteServoModel, spec: EigenSpec) -> ObserverGains:
    """Place both HP eigenvalues in closed form.

    Gamma = [[0, -2 l0], [-1, -2 l1]], so trace = -2 l1 and
    determinant = -2 l0, giving l1 = -(l1+l2)/2 and l0 = -(l1*l2)/2
    with no iteration.
    """
    lam1, lam2 = spec.pair()
    l1 = -(lam1 + lam2) / 2.0
    l0 = -(lam1 * lam2) / 2.0
    gains = hp_gains_from_params(nominal, l0, l1)
    _check_placement(build(nominal, gains), spec, 1e-12, "high-performance")
    return gains


# ---------------------------------------------------------------------------
# Lyapunov certification


@dataclass(frozen=True, eq=False)
class LyapunovCertificate:
    """Discrete Lyapunov pair with an ultimate bound.

    P solves P - Gamma'P Gamma = Q with the normalization
    lambda_min(Q) = 2, so kappa_e = lambda_min(Q) - 1 = 1. The gain on
    the residual bound is kappa_d = sigma_max(Gamma'P)^2 + lambda_max(P)
    (spectral norm; an eigenvalue-magnitude reading of the same quantity
    is not sound for non-normal Gamma). Any residual sequence with
    ||Lambda(k)|| <= d_k keeps the error ultimately inside the ball of
    radius sqrt(kappa_d / kappa_e) * d_k.
    """

    P: np.ndarray
    Q: np.ndarray
    kappa_e: float
    kappa_d: float
    d_k: float
    bound_radius: float
    asymptotic: bool

    def to_json_dict(self) -> dict:
        return {
            "P": self.P.tolist(),
            "Q": self.Q.tolist(),
            "kappa_e": self.kappa_e,
            "kappa_d": self.kappa_d,
            "d_k": self.d_k,
            "bound_radius": self.bound_radius,
            "asymptotic": self.asymptotic,
        }


def _solve_dlyap_unit(Gamma: np.ndarray) -> np.ndarray:
    """Solve P0 - Gamma' P0 Gamma = I."""
    n = Gamma.shape[0]
    if n <= 3:
        M = np.eye(n * n) - np.kron(Gamma.T, Gamma.T)
        p = np.linalg.solve(M, np.eye(n).reshape(-1))
        P0 = p.reshape(n, n)
    else:
        # summation by squaring: P = sum_k (Gamma')^k Gamma^k
        P0 = np.eye(n)
        M = Gamma.copy()
        for _ in range(200):
            term = M.T @ P0 @ M
            P0 = P0 + term
            if np.linalg.norm(term) <= 1e-18 * np.linalg.norm(P0):
                break
            M = M @ M
    return (P0 + P0.T) / 2.0


def certify(Gamma: np.ndarray, d_k: float = 0.0) -> LyapunovCertificate:
    """Certify the error recursion e(k+1) = Gamma e(k) + Lambda(k).

    Raises CertificationError when the spectral radius is not strictly
    below one. d_k = 0 yields the asymptotic verdict with a zero radius.
    """
    Gamma = np.atleast_2d(np.asarray(Gamma, dtype=float))
    if d_k < 0.0 or not math.isfinite(d_k):
        raise ValueError("d_k must be finite and nonnegative")
    eigs = np.linalg.eigvals(Gamma)
    rho = float(np.max(np.abs(eigs)))
    if rho >= 1.0:
        raise CertificationError(
            f"spectral radius {rho:.6g} >= 1, no certificate exists", eigs
        )
    P0 = _solve_dlyap_unit(Gamma)
    Q0 = P0 - Gamma.T @ P0 @ Gamma
    c = 2.0 / float(np.min(np.linalg.eigvalsh(Q0)))
    P = c * P0
    Q = P - Gamma.T @ P @ Gamma
    kappa_e = float(np.min(np.linalg.eigvalsh(Q))) - 1.0
    kappa_d = float(np.linalg.norm(Gamma.T @ P, 2)) ** 2 + float(
        np.max(np.linalg.eigvalsh(P))
    )
    radius = math.sqrt(kappa_d / kappa_e) * d_k
    return LyapunovCertificate(
        P=P,
        Q=Q,
        kappa_e=kappa_e,
        kappa_d=kappa_d,
        d_k=float(d_k),
        bound_radius=radius,
        asymptotic=(d_k == 0.0),
    )


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class ConstraintRow:
    name: str
    expression: str
    value: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "expression": self.expression,
            "value": self.value,
            "pass": self.passed,
        }


@dataclass(frozen=True, eq=False)
class StabilityReport:
    """Constraint verdicts, spectrum, and optional certificate for one observer."""

    observer: str
    eigenvalues: tuple[complex, ...]
    constraints: tuple[ConstraintRow, ...]
    certificate: Optional[LyapunovCertificate]
    notes: tuple[str, ...]
    verdict: str  # "pass" or "fail"
    gains: Optional[ObserverGains] = None

    def to_json_dict(self) -> dict:
        eigs = []
        for lam in self.eigenvalues:
            lam = complex(lam)
            eigs.append(lam.real if lam.imag == 0.0 else [lam.real, lam.imag])
        out = {
            "observer": self.observer,
            "eigenvalues": eigs,
            "constraints": [c.to_json_dict() for c in self.constraints],
            "certificate": None
            if self.certificate is None
            else self.certificate.to_json_dict(),
            "notes": list(self.notes),
            "verdict": self.verdict,
        }
        if self.gains is not None:
            out["gains"] = {
                "L": [row.tolist() for row in self.gains.L],
                "free_params": list(self.gains.free_params),
            }
        return out


@dataclass(frozen=True)
class ObserverSetup:
    """How to obtain gains for one observer: eigenvalue spec, free scalar
    parameters, or explicit gain rows."""

    kind: ObserverKind
    l0: Optional[float] = None
    l1: Optional[float] = None
    eigenvalues: Optional[EigenSpec] = None
    L: Optional[tuple] = None

    def resolve(self, nominal: DiscreteServoModel) -> ObserverGains:
        k = self.kind
        if self.L is not None:
            rows = tuple(np.asarray(r, dtype=float) for r in self.L)
            return ObserverGains(k, rows)
        if k.name == "zo":
            if self.l0 is None:
                raise ValueError("zero-order setup needs l0")
            return tune_zo(nominal, self.l0)
        if k.name == "fo":
            if self.eigenvalues is not None:
                return tune_fo(nominal, self.eigenvalues)
            if self.l0 is None or self.l1 is None:
                raise ValueError("first-order setup needs eigenvalues or l0 and l1")
            return fo_gains_from_params(nominal, self.l0, self.l1)
        if k.name == "hp":
            if self.eigenvalues is not None:
                return tune_hp(nominal, self.eigenvalues)
            if self.l0 is None or self.l1 is None:
                raise ValueError(
                    "high-performance setup needs eigenvalues or l0 and l1"
                )
            return hp_gains_from_params(nominal, self.l0, self.l1)
        raise ValueError(
            "generalized Taylor observers take explicit gain rows via L"
        )


def analyze(
    nominal: DiscreteServoModel,
    setup: ObserverSetup,
    alpha: float = 1.0,
    inner_loop: bool = False,
    d_k: float = 0.0,
) -> StabilityReport:
    """Assemble the full stability report for one observer configuration.

    Constraint rows always include the applicable scalar inequality for
    the zero-order observer and the spectral-radius condition for the
    rest; the inner-loop inequality on alpha*l0 is added when the
    estimate is fed back. A Lyapunov certificate is attached whenever
    the spectrum allows one.
    """
    notes: list[str] = []
    gains = setup.resolve(nominal)
    dyn = build(nominal, gains)
    eigs = np.linalg.eigvals(dyn.Gamma)
    order = np.lexsort((eigs.imag, eigs.real))
    eigs = eigs[order]
    rho = float(np.max(np.abs(eigs)))
    rows: list[ConstraintRow] = []
    if gains.kind.name == "zo" and gains.free_params:
        l0 = gains.free_params[0]
        chk = check_zo(l0, alpha, inner_loop)
        rows.append(
            ConstraintRow("zo-open-loop", "0 < l0 < 2", l0, chk.open_loop_pass)
        )
        if inner_loop:
            rows.append(
                ConstraintRow(
                    "zo-inner-loop",
                    "0 < alpha*l0 < 2",
                    alpha * l0,
                    chk.inner_loop_pass,
                )
            )
    rows.append(
        ConstraintRow("spectral-radius", "max|eig(Gamma)| < 1", rho, rho < 1.0)
    )
    certificate = None
    try:
        certificate = certify(dyn.Gamma, d_k)
    except CertificationError as exc:
        notes.append(f"no certificate: {exc}")
    verdict = "pass" if all(r.passed for r in rows) else "fail"
    return StabilityReport(
        observer=gains.kind.name,
        eigenvalues=tuple(eigs),
        constraints=tuple(rows),
        certificate=certificate,
        notes=tuple(notes),
        verdict=verdict,
        gains=gains,
    )


# ---------------------------------------------------------------------------
# Loop configuration and augmented matrices


@dataclass(frozen=True)
class LoopConfig:
    """Plant, nominal model, and controller gains for one control loop.

    plant is the true (uncertain) axis, nominal the model the observer
    and feedback were designed on. alpha = J_nominal / J_plant. The
    modal analysis of the augmented loop additionally assumes the two
    friction rates b_visc/J agree.
    """

    plant: ContinuousServoModel
    nominal: ContinuousServoModel
    Ts: float
    l0: float
    Kp: float = 0.0
    Kd: float = 0.0
    K1: Optional[float] = None
    K2: Optional[float] = None

    def __post_init__(self) -> None:
        if not (self.Ts > 0.0 and math.isfinite(self.Ts)):
            raise ValueError("Ts must be positive and finite")
        for name in ("l0", "Kp", "Kd"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def alpha(self) -> float:
        return self.nominal.J / self.plant.J

    @property
    def friction_matched(self) -> bool:
        diff = abs(self.plant.friction_rate - self.nominal.friction_rate)
        return diff <= FRICTION_RATIO_TOL * max(1.0, abs(self.plant.friction_rate))

    @property
    def outer_gains(self) -> tuple[float, float]:
        """Modal feedback gains (K1, K2); PD gains stand in when unset."""
        K1 = self.Kp if self.K1 is None else self.K1
        K2 = self.Kd if self.K2 is None else self.K2
        return float(K1), float(K2)


@dataclass(frozen=True, eq=False)
class InnerLoop:
    """Augmented plant + zero-order observer with the estimate fed back."""

    A_DI: np.ndarray
    B_DI: np.ndarray
    eigenvalues: np.ndarray
    reference_eigenvalues: Optional[tuple[float, float, float]]
    verdict: str  # "marginal-pass", "pass", or "fail"


def inner_loop_matrix(cfg: LoopConfig) -> InnerLoop:
    """Augmented 3x3 inner loop: plant state plus observer auxiliary state.

    With u = u_p + tau_hat eliminated, the block form is

        A_DI = [[A - B L0', B], [L0'(A_n - I), 1]]
        B_DI = [B', L0' B_n]'

    built from the true plant (A, B) and the nominal model (A_n, B_n)
    the gain row was tuned on. One eigenvalue equals 1 structurally (a
    position shift with the velocity at rest is an equilibrium); with
    matched friction rates the spectrum is exactly
    {1, exp(-b Ts), 1 - alpha*l0}.
    """
    plant_d = discretize(cfg.plant, cfg.Ts)
    nominal_d = discretize(cfg.nominal, cfg.Ts)
    L0 = tune_zo(nominal_d, cfg.l0).L[0]
    A, B = plant_d.A, plant_d.B
    A_n, B_n = nominal_d.A, nominal_d.B
    A_DI = np.zeros((3, 3))
    A_DI[:2, :2] = A - np.outer(B, L0)
    A_DI[:2, 2] = B
    A_DI[2, :2] = L0 @ (A_n - np.eye(2))
    A_DI[2, 2] = 1.0
    B_DI = np.concatenate([B, [L0 @ B_n]])
    eigs = np.linalg.eigvals(A_DI)
    eigs = eigs[np.lexsort((eigs.imag, eigs.real))]
    reference = None
    if cfg.friction_matched:
        reference = (
            1.0,
            math.exp(-cfg.plant.friction_rate * cfg.Ts),
            1.0 - cfg.alpha * cfg.l0,
        )
    mags = np.abs(eigs)
    on_circle = np.abs(mags - 1.0) <= UNIT_EIGEN_TOL
    if np.any(mags > 1.0 + UNIT_EIGEN_TOL):
        verdict = "fail"
    elif np.count_nonzero(on_circle) == 1 and abs(
        eigs[np.argmax(on_circle)] - 1.0
    ) <= UNIT_EIGEN_TOL:
        verdict = "marginal-pass"
    elif np.any(on_circle):
        verdict = "fail"
    else:
        verdict = "pass"
    return InnerLoop(A_DI, B_DI, eigs, reference, verdict)


@dataclass(frozen=True, eq=False)
class ClosedLoop:
    """Outer feedback applied to the inner loop in a modal basis."""

    A_tilde: np.ndarray
    B_tilde: np.ndarray
    S: Optional[np.ndarray]
    K: Optional[np.ndarray]  # original-coordinate feedback row
    eigenvalues: np.ndarray
    observer_mode: float  # 1 - alpha*l0
    invariance_error: float
    basis: str  # "printed", "numeric", or "none"
    notes: tuple[str, ...]
    verdict: str


def _printed_basis(cfg: LoopConfig) -> tuple[Optional[np.ndarray], Optional[str]]:
    """The published closed-form change of basis, when its formulas are
    evaluable. Singular at b = 0 and b = 1 by construction."""
    b = cfg.plant.friction_rate
    Ts = cfg.Ts
    J, J_n, l0 = cfg.plant.J, cfg.nominal.J, cfg.l0
    if l0 == 0.0:
        return None, "printed basis undefined at l0 = 0"
    if b == 0.0 or b == 1.0:
        return None, f"printed basis singular at friction rate b = {b:g}"
    E = math.exp(-b * Ts)
    if 1.0 - E == 0.0:
        return None, "printed basis singular: exp(-b Ts) = 1"
    r1 = (1.0 - b - b * Ts + E * (b - 1.0)) / (b * (b - 1.0) * J_n * l0)
    r2 = J_n * l0 / ((1.0 - E) * J)
    r3 = (1.0 - 1.0 / (b * Ts) + E / (1.0 - E) - J / (J_n * l0)) * Ts
    S = np.array(
        [
            [r1 * (1.0 - 1.0 / b), -r1 / b, r1 * r2 * r3],
            [0.0, r1, r1 * r2],
            [1.0, 1.0, 1.0],
        ]
    )
    if not np.all(np.isfinite(S)):
        return None, "printed basis produced non-finite entries"
    return S, None


def _numeric_basis(
    A_DI: np.ndarray, targets: Sequence[float]
) -> tuple[Optional[np.ndarray], Optional[str]]:
    """Eigenvector basis with columns ordered to match the target modes."""
    w, V = np.linalg.eig(A_DI)
    if np.max(np.abs(w.imag)) > 1e-9:
        return None, "inner-loop spectrum is not real"
    w = w.real
    cols = []
    remaining = list(range(3))
    for t in targets:
        i = min(remaining, key=lambda j: abs(w[j] - t))
        remaining.remove(i)
        v = V[:, i].real
        pivot = v[np.argmax(np.abs(v))]
        cols.append(v / pivot)
    S = np.column_stack(cols)
    return S, None


def _validate_basis(
    S: np.ndarray, A_DI: np.ndarray, targets: Sequence[float]
) -> Optional[str]:
    """Check conditioning and that S actually diagonalizes A_DI onto the
    expected modes."""
    cond = np.linalg.cond(S)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        return f"condition number {cond:.3e} exceeds {CONDITION_LIMIT:.1e}"
    T = np.linalg.solve(S, A_DI @ S)
    resid = float(np.max(np.abs(T - np.diag(np.asarray(targets)))))
    scale = max(1.0, float(np.max(np.abs(A_DI))))
    if resid > 1e-8 * scale:
        return f"diagonalization residual {resid:.3e}"
    return None


def closed_loop_matrix(cfg: LoopConfig) -> ClosedLoop:
    """Outer feedback u_p = ref - K~' z in the modal basis of the inner loop.

    K~ = [K1, K2, 0] acts on the position and velocity modes only, so
    the observer mode 1 - alpha*l0 is invariant under any K1, K2: the
    third column of the closed-loop matrix stays [0, 0, 1-alpha*l0]'
    and the characteristic polynomial factors accordingly.

    The published closed-form basis is attempted first and kept only if
    it actually diagonalizes the inner loop; otherwise the numerically
    computed eigenvector basis is used and the switch is noted. In
    either fallback the published pencil-and-paper 2x2 outer block is
    still evaluated and its eigenvalue discrepancy logged (never
    asserted; the numeric construction is authoritative).
    """
    inner = inner_loop_matrix(cfg)
    notes: list[str] = []
    if inner.reference_eigenvalues is not None:
        targets = list(inner.reference_eigenvalues)
    else:
        notes.append(
            "friction rates differ between plant and nominal model; "
            "modal targets are nearest-eigenvalue matches"
        )
        w = np.sort(inner.eigenvalues.real)[::-1]
        targets = [w[0], w[1], w[2]]
    observer_mode = 1.0 - cfg.alpha * cfg.l0
    K1, K2 = cfg.outer_gains
    K_tilde = np.array([K1, K2, 0.0])

    S, reason = _printed_basis(cfg)
    basis = "printed"
    if S is not None:
        reason = _validate_basis(S, inner.A_DI, targets)
    if S is None or reason is not None:
        notes.append(
            f"printed change-of-basis rejected ({reason}); "
            "using numeric eigenvector basis"
        )
        S, reason = _numeric_basis(inner.A_DI, targets)
        basis = "numeric"
        if S is not None:
            reason = _validate_basis(S, inner.A_DI, targets)
        if S is None or reason is not None:
            notes.append(
                f"numeric eigenvector basis rejected ({reason}); "
                "reporting open-loop eigenvalues in original coordinates"
            )
            eigs = inner.eigenvalues
            return ClosedLoop(
                A_tilde=inner.A_DI,
                B_tilde=inner.B_DI,
                S=None,
                K=None,
                eigenvalues=eigs,
                observer_mode=observer_mode,
                invariance_error=float(
                    np.min(np.abs(eigs - observer_mode))
                ),
                basis="none",
                notes=tuple(notes),
                verdict=inner.verdict,
            )

    A_tilde_in = np.linalg.solve(S, inner.A_DI @ S)
    B_tilde = np.linalg.solve(S, inner.B_DI)
    A_tilde = A_tilde_in - np.outer(B_tilde, K_tilde)
    K = np.linalg.solve(S.T, K_tilde)
    eigs = np.linalg.eigvals(A_tilde)
    eigs = eigs[np.lexsort((eigs.imag, eigs.real))]
    invariance_error = float(np.min(np.abs(eigs - observer_mode)))

    # published 2x2 outer block, cross-checked loosely and logged only
    delta1 = 2.0 * (cfg.nominal.J - cfg.plant.J) * cfg.Ts / (
        cfg.nominal.J * (cfg.Ts + 2.0)
    )
    delta2 = 2.0 * cfg.l0 * cfg.Ts / (cfg.Ts + 2.0)
    a11 = np.array(
        [
            [1.0 - K1 * (cfg.l0 + delta1), 1.0 - K2 * (cfg.l0 + delta1)],
            [-2.0 * K1 * delta2, 1.0 - 2.0 * K2 * delta2],
        ]
    )
    printed_eigs = np.sort_complex(np.linalg.eigvals(a11))
    numeric_eigs = np.sort_complex(np.linalg.eigvals(A_tilde[:2, :2]))
    gap = float(np.max(np.abs(printed_eigs - numeric_eigs)))
    notes.append(
        f"printed outer-block eigenvalue discrepancy {gap:.3e} (logged only)"
    )

    mags = np.abs(eigs)
    if np.any(mags > 1.0 + UNIT_EIGEN_TOL):
        verdict = "fail"
    elif np.any(np.abs(mags - 1.0) <= UNIT_EIGEN_TOL):
        verdict = "marginal-pass"
    else:
        verdict = "pass"
    return ClosedLoop(
        A_tilde=A_tilde,
        B_tilde=B_tilde,
        S=S,
        K=K,
        eigenvalues=eigs,
        observer_mode=observer_mode,
        invariance_error=invariance_error,
        basis=basis,
        notes=tuple(notes),
        verdict=verdict,
    )


# ---------------------------------------------------------------------------
# Parameter sweeps


@dataclass(frozen=True)
class SweepRow:
    value: float
    spectral_radius: float
    verdict: str

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "spectral_radius": self.spectral_radius,
            "verdict": self.verdict,
        }


_SWEEP_PARAMS = ("l0", "l1", "alpha", "Ts", "K1", "K2", "Kp", "Kd")


def _with_alpha(cfg: LoopConfig, alpha: float) -> LoopConfig:
    """Scale the plant inertia to hit the requested inertia ratio while
    keeping the friction rates matched."""
    J = cfg.nominal.J / alpha
    plant = ContinuousServoModel(J=J, b_visc=cfg.nominal.friction_rate * J)
    return LoopConfig(
        plant=plant,
        nominal=cfg.nominal,
        Ts=cfg.Ts,
        l0=cfg.l0,
        Kp=cfg.Kp,
        Kd=cfg.Kd,
        K1=cfg.K1,
        K2=cfg.K2,
    )


def _replace_cfg(cfg: LoopConfig, **kw) -> LoopConfig:
    fields = dict(
        plant=cfg.plant,
        nominal=cfg.nominal,
        Ts=cfg.Ts,
        l0=cfg.l0,
        Kp=cfg.Kp,
        Kd=cfg.Kd,
        K1=cfg.K1,
        K2=cfg.K2,
    )
    fields.update(kw)
    return LoopConfig(**fields)


def sweep_stability(
    cfg: LoopConfig,
    setup: ObserverSetup,
    param: str,
    values: Sequence[float],
    system: str = "observer",
) -> list[SweepRow]:
    """Grid a parameter and report spectral radius plus verdict per point.

    system selects what is analyzed: "observer" grids the observer error
    recursion alone, "inner" the augmented disturbance-feedback loop
    (whose structural unit eigenvalue makes the good verdict
    "marginal-pass"), "closed" the full outer loop. Rows come back in
    the caller's value order and are independent of evaluation order.
    """
    if param not in _SWEEP_PARAMS:
        raise ValueError(f"unknown sweep parameter {param!r}; one of {_SWEEP_PARAMS}")
    if system not in ("observer", "inner", "closed"):
        raise ValueError("system must be 'observer', 'inner', or 'closed'")
    rows: list[SweepRow] = []
    for value in values:
        value = float(value)
        point_cfg = cfg
        point_setup = setup
        if param == "alpha":
            point_cfg = _with_alpha(cfg, value)
        elif param == "Ts":
            point_cfg = _replace_cfg(cfg, Ts=value)
        elif param in ("K1", "K2", "Kp", "Kd"):
            point_cfg = _replace_cfg(cfg, **{param: value})
        elif param == "l0":
            point_cfg = _replace_cfg(cfg, l0=value)
            point_setup = ObserverSetup(
                kind=setup.kind, l0=value, l1=setup.l1, L=setup.L
            )
        elif param == "l1":
            point_setup = ObserverSetup(
                kind=setup.kind, l0=setup.l0, l1=value, L=setup.L
            )
        if system == "observer":
            nominal_d = discretize(point_cfg.nominal, point_cfg.Ts)
            gains = point_setup.resolve(nominal_d)
            dyn = build(nominal_d, gains)
            rho = spectral_radius(dyn.Gamma)
            verdict = "pass" if rho < 1.0 else "fail"
        elif system == "inner":
            inner = inner_loop_matrix(point_cfg)
            rho = float(np.max(np.abs(inner.eigenvalues)))
            verdict = inner.verdict
        else:
            closed = closed_loop_matrix(point_cfg)
            rho = float(np.max(np.abs(closed.eigenvalues)))
            verdict = closed.verdict
        rows.append(SweepRow(value=value, spectral_radius=rho, verdict=verdict))
    return rows
