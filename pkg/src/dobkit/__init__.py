"""Discrete-time disturbance-observer motion control toolkit.

Exact zero-order-hold servo models, a family of disturbance observers
(zero order, first order, generalized Taylor, high performance), gain
tuning with stability constraints and Lyapunov certification, and a
deterministic closed-loop simulator with scenario presets.
"""
from .defaults import (
    DEFAULT_INERTIA,
    DEFAULT_SAMPLING_TIME,
    DEFAULT_SUBSTEPS,
    DEFAULT_VISCOUS_FRICTION,
)
from .observers import (
    FIRST_ORDER,
    HIGH_PERFORMANCE,
    ZERO_ORDER,
    AuxiliaryDynamics,
    ObserverGains,
    ObserverKind,
    ObserverState,
    build,
    build_fo,
    build_ho,
    build_hp,
    build_zo,
    estimate,
    initial_state,
    observer_update,
    reconstruct,
    taylor_kind,
    truncation_residuals,
)
from .servo import (
    Constant,
    ContinuousServoModel,
    DiscreteServoModel,
    MultiSine,
    PlantState,
    Ramp,
    Sampled,
    SineProduct,
    Sinusoid,
    Zero,
    discretize,
    disturbance_input,
    eval_disturbance,
    exact_disturbance_increment,
    increment_series,
    plant_step,
)
from .simulate import (
    PRESET_NAMES,
    Metrics,
    OrderStudyResult,
    ReproductionResult,
    ScenarioConfig,
    SimulationTrace,
    SineReference,
    StabilityConstraintError,
    StepReference,
    ZeroReference,
    benchmark_disturbance,
    compute_metrics,
    order_study,
    preset_scenarios,
    reproduce,
    run_closed_loop,
)
from .stability import (
    CertificationError,
    ClosedLoop,
    EigenSpec,
    InnerLoop,
    LoopConfig,
    LyapunovCertificate,
    ObserverSetup,
    PlacementError,
    StabilityReport,
    analyze,
    certify,
    check_zo,
    closed_loop_matrix,
    inner_loop_matrix,
    l0_from_bandwidth,
    sweep_stability,
    tune_fo,
    tune_hp,
    tune_zo,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # defaults
    "DEFAULT_INERTIA",
    "DEFAULT_SAMPLING_TIME",
    "DEFAULT_SUBSTEPS",
    "DEFAULT_VISCOUS_FRICTION",
    # servo
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
    "discretize",
    "disturbance_input",
    "eval_disturbance",
    "exact_disturbance_increment",
    "increment_series",
    "plant_step",
    # observers
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
    "truncation_residuals",
    # stability
    "EigenSpec",
    "PlacementError",
    "CertificationError",
    "LyapunovCertificate",
    "StabilityReport",
    "LoopConfig",
    "ObserverSetup",
    "InnerLoop",
    "ClosedLoop",
    "l0_from_bandwidth",
    "tune_zo",
    "check_zo",
    "tune_fo",
    "tune_hp",
    "certify",
    "analyze",
    "inner_loop_matrix",
    "closed_loop_matrix",
    "sweep_stability",
    # simulate
    "ZeroReference",
    "StepReference",
    "SineReference",
    "StabilityConstraintError",
    "ScenarioConfig",
    "SimulationTrace",
    "Metrics",
    "run_closed_loop",
    "compute_metrics",
    "order_study",
    "OrderStudyResult",
    "benchmark_disturbance",
    "PRESET_NAMES",
    "preset_scenarios",
    "reproduce",
    "ReproductionResult",
]
