"""Command-line front end.

Subcommands: discretize, tune, analyze, simulate, sweep, order-study,
reproduce. Inputs come from JSON config files carrying a versioned
"schema" field, from direct flags, or both (flags win). Dotted-path
overrides (`--override loop.Ts=0.0005`) patch the config after parsing;
unknown keys anywhere are rejected.

Exit codes: 0 success, 2 configuration or validation error, 3 hard
stability-constraint failure (suppressed by --allow-unstable), 4 a
reproduction's qualitative assertion failed.

File outputs are deterministic: JSON is sorted and indented, traces use
the fixed CSV layout, and figures are rendered without a software tag,
so repeated runs are byte identical. Figures accompany the delimited
outputs unless --no-plot is given.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

import numpy as np

from .defaults import (
    DEFAULT_INERTIA,
    DEFAULT_SAMPLING_TIME,
    DEFAULT_SUBSTEPS,
    DEFAULT_VISCOUS_FRICTION,
)
from .observers import ObserverKind, taylor_kind
from .servo import (
    Constant,
    ContinuousServoModel,
    MultiSine,
    Ramp,
    Sinusoid,
    Zero,
    discretize,
)
from .simulate import (
    PRESET_NAMES,
    ScenarioConfig,
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
    EigenSpec,
    LoopConfig,
    ObserverSetup,
    analyze,
    sweep_stability,
)

__all__ = ["main"]


class ConfigError(Exception):
    """Invalid configuration, flag combination, or input file."""


# ---------------------------------------------------------------------------
# Config loading, overrides, validation


def _load_config(path: Optional[str], overrides: list[str]) -> Optional[dict]:
    if path is None:
        if overrides:
            raise ConfigError("--override requires --config")
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    for item in overrides:
        _apply_override(cfg, item)
    return cfg


def _apply_override(cfg: dict, item: str) -> None:
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    key, raw = item.split("=", 1)
    path = key.split(".")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    for seg in path[:-1]:
        if seg not in node:
            node[seg] = {}
        node = node[seg]
        if not isinstance(node, dict):
            raise ConfigError(
                f"override path {key!r} crosses non-object value at {seg!r}"
            )
    node[path[-1]] = value


_NUMBER = (int, float)


def _check_keys(d: dict, allowed: dict, where: str) -> None:
    """Reject unknown keys and wrong JSON types, recursing is the caller's job."""
    for key, value in d.items():
        if key not in allowed:
            raise ConfigError(
                f"unknown key {key!r} in {where}; allowed: {sorted(allowed)}"
            )
        expected = allowed[key]
        if expected is None:
            continue
        if expected is float:
            ok = isinstance(value, _NUMBER) and not isinstance(value, bool)
        elif expected is int:
            ok = isinstance(value, int) and not isinstance(value, bool)
        else:
            ok = isinstance(value, expected)
        if not ok:
            raise ConfigError(
                f"key {key!r} in {where} must be {getattr(expected, '__name__', expected)}"
            )


def _check_schema(cfg: dict, expected: str) -> None:
    schema = cfg.get("schema")
    if schema is None:
        raise ConfigError(f"config is missing the schema field ({expected!r})")
    if schema != expected:
        raise ConfigError(f"config schema {schema!r} does not match {expected!r}")


# ---------------------------------------------------------------------------
# Builders from config sections


_MODEL_KEYS = {"schema": str, "J": float, "b_visc": float, "Ts": float}


def _model_from(cfg: dict, where: str = "model") -> tuple[ContinuousServoModel, float]:
    _check_keys(cfg, _MODEL_KEYS, where)
    model = ContinuousServoModel(
        J=float(cfg.get("J", DEFAULT_INERTIA)),
        b_visc=float(cfg.get("b_visc", DEFAULT_VISCOUS_FRICTION)),
    )
    return model, float(cfg.get("Ts", DEFAULT_SAMPLING_TIME))


_OBSERVER_KEYS = {
    "kind": str,
    "l0": float,
    "l1": float,
    "eigenvalues": list,
    "taylor_order": int,
    "L": list,
}


def _observer_from(cfg: dict, where: str = "observer") -> ObserverSetup:
    _check_keys(cfg, _OBSERVER_KEYS, where)
    kind_name = cfg.get("kind")
    if kind_name is None:
        raise ConfigError(f"{where} needs a kind (zo, fo, hp, or ho)")
    if kind_name == "ho":
        kind = taylor_kind(int(cfg.get("taylor_order", 0)))
    else:
        kind = ObserverKind(kind_name)
    eig = cfg.get("eigenvalues")
    spec = EigenSpec(tuple(float(v) for v in eig)) if eig is not None else None
    L = cfg.get("L")
    rows = tuple(tuple(float(x) for x in row) for row in L) if L is not None else None
    return ObserverSetup(
        kind=kind,
        l0=None if cfg.get("l0") is None else float(cfg["l0"]),
        l1=None if cfg.get("l1") is None else float(cfg["l1"]),
        eigenvalues=spec,
        L=rows,
    )


_LOOP_KEYS = {
    "J": float,
    "b_visc": float,
    "alpha": float,
    "J_plant": float,
    "b_visc_plant": float,
    "Ts": float,
    "l0": float,
    "Kp": float,
    "Kd": float,
    "K1": float,
    "K2": float,
}


def _loop_from(cfg: dict, where: str = "loop") -> LoopConfig:
    _check_keys(cfg, _LOOP_KEYS, where)
    nominal = ContinuousServoModel(
        J=float(cfg.get("J", DEFAULT_INERTIA)),
        b_visc=float(cfg.get("b_visc", DEFAULT_VISCOUS_FRICTION)),
    )
    if "J_plant" in cfg or "b_visc_plant" in cfg:
        plant = ContinuousServoModel(
            J=float(cfg.get("J_plant", nominal.J)),
            b_visc=float(cfg.get("b_visc_plant", nominal.b_visc)),
        )
    elif "alpha" in cfg:
        # inertia mismatch with matched friction rates
        J = nominal.J / float(cfg["alpha"])
        plant = ContinuousServoModel(J=J, b_visc=nominal.friction_rate * J)
    else:
        plant = nominal
    return LoopConfig(
        plant=plant,
        nominal=nominal,
        Ts=float(cfg.get("Ts", DEFAULT_SAMPLING_TIME)),
        l0=float(cfg.get("l0", 0.275)),
        Kp=float(cfg.get("Kp", 2.5)),
        Kd=float(cfg.get("Kd", 0.25)),
        K1=None if cfg.get("K1") is None else float(cfg["K1"]),
        K2=None if cfg.get("K2") is None else float(cfg["K2"]),
    )


_REFERENCE_KEYS = {
    "type": str,
    "amplitude": float,
    "frequency": float,
    "t_on": float,
    "t_off": float,
}


def _reference_from(cfg: dict, where: str = "reference"):
    _check_keys(cfg, _REFERENCE_KEYS, where)
    kind = cfg.get("type", "zero")
    if kind == "zero":
        return ZeroReference()
    if kind == "step":
        return StepReference(
            amplitude=float(cfg.get("amplitude", math.pi / 2.0)),
            t_on=float(cfg.get("t_on", 0.0)),
        )
    if kind == "sine":
        return SineReference(
            amplitude=float(cfg.get("amplitude", math.pi / 2.0)),
            frequency=float(cfg.get("frequency", 1.0)),
            t_on=float(cfg.get("t_on", 0.0)),
            t_off=float(cfg.get("t_off", math.inf)),
        )
    raise ConfigError(f"unknown reference type {kind!r} in {where}")


_DISTURBANCE_KEYS = {
    "type": str,
    "level": float,
    "slope": float,
    "amplitude": float,
    "frequency": float,
    "phase": float,
    "t_on": float,
    "t_off": float,
}


def _disturbance_from(cfg: dict, where: str = "disturbance"):
    _check_keys(cfg, _DISTURBANCE_KEYS, where)
    kind = cfg.get("type", "zero")
    if kind == "zero":
        return Zero()
    if kind == "constant":
        return Constant(level=float(cfg.get("level", 1.0)))
    if kind == "ramp":
        return Ramp(slope=float(cfg.get("slope", 1.0)))
    if kind == "sinusoid":
        return Sinusoid(
            amplitude=float(cfg.get("amplitude", 1.0)),
            frequency=float(cfg.get("frequency", 1.0)),
            phase=float(cfg.get("phase", 0.0)),
        )
    if kind == "benchmark":
        return benchmark_disturbance(
            t_on=float(cfg.get("t_on", 3.0)), t_off=float(cfg.get("t_off", 8.0))
        )
    raise ConfigError(f"unknown disturbance type {kind!r} in {where}")


_SCENARIO_KEYS = {
    "schema": str,
    "preset": str,
    "loop": dict,
    "observer": dict,
    "reference": dict,
    "disturbance": dict,
    "duration": float,
    "plant_model": str,
    "feedback": bool,
    "label": str,
}


def _scenarios_from(cfg: dict, args) -> list[ScenarioConfig]:
    _check_schema(cfg, "dob-scenario/1")
    _check_keys(cfg, _SCENARIO_KEYS, "scenario config")
    if "preset" in cfg:
        extra = set(cfg) - {"schema", "preset"}
        if extra:
            raise ConfigError(
                f"preset configs take no other keys, got {sorted(extra)}"
            )
        return list(_preset_cases(cfg["preset"], args))
    for key in ("loop", "observer", "duration"):
        if key not in cfg:
            raise ConfigError(f"scenario config needs {key!r}")
    scenario = ScenarioConfig(
        loop=_loop_from(cfg["loop"]),
        observer=_observer_from(cfg["observer"]),
        reference=_reference_from(cfg.get("reference", {"type": "zero"})),
        disturbance=_disturbance_from(cfg.get("disturbance", {"type": "zero"})),
        duration=float(cfg["duration"]),
        substeps=args.substeps if args.substeps is not None else DEFAULT_SUBSTEPS,
        plant_model=cfg.get("plant_model", "quadrature"),
        quantize_counts=args.quantize_encoder,
        feedback=bool(cfg.get("feedback", True)),
        allow_unstable=args.allow_unstable,
        label=cfg.get("label", "scenario"),
    )
    return [scenario]


def _resolve_preset(name: str) -> str:
    aliases = {p.split("-")[0]: p for p in PRESET_NAMES}
    if name in PRESET_NAMES:
        return name
    if name in aliases:
        return aliases[name]
    raise ConfigError(
        f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}"
    )


def _preset_cases(name: str, args) -> list[ScenarioConfig]:
    from dataclasses import replace

    cases = preset_scenarios()[_resolve_preset(name)]
    out = []
    for case in cases:
        patch = {}
        if args.substeps is not None:
            patch["substeps"] = args.substeps
        if args.quantize_encoder is not None:
            patch["quantize_counts"] = args.quantize_encoder
        if args.allow_unstable:
            patch["allow_unstable"] = True
        out.append(replace(case, **patch) if patch else case)
    return out


# ---------------------------------------------------------------------------
# Output helpers


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _prefix(args, default: str) -> str:
    return args.out if args.out else default


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_discretize(args) -> int:
    cfg = _load_config(args.config, args.override) or {"schema": "dob-model/1"}
    _check_schema(cfg, "dob-model/1")
    merged = dict(cfg)
    if args.J is not None:
        merged["J"] = args.J
    if args.b_visc is not None:
        merged["b_visc"] = args.b_visc
    if args.Ts is not None:
        merged["Ts"] = args.Ts
    model, Ts = _model_from(merged, "model config")
    disc = discretize(model, Ts)
    doc = {
        "schema": "dob-discrete-model/1",
        "J": model.J,
        "b_visc": model.b_visc,
        "Ts": disc.Ts,
        "A": disc.A.tolist(),
        "B": disc.B.tolist(),
        "D0": disc.D0.tolist(),
        "D1": disc.D1.tolist(),
    }
    text = _dump_json(doc)
    sys.stdout.write(text)
    if args.out:
        _write(args.out + ".json", text)
    return 0


def _tune_analyze(args) -> int:
    cfg = _load_config(args.config, args.override) or {"schema": "dob-observer/1"}
    _check_schema(cfg, "dob-observer/1")
    allowed = dict(_OBSERVER_KEYS)
    allowed.update(
        {"schema": str, "alpha": float, "inner_loop": bool, "d_k": float, "model": dict}
    )
    _check_keys(cfg, allowed, "observer config")
    merged = {k: v for k, v in cfg.items() if k in _OBSERVER_KEYS}
    if args.observer is not None:
        merged["kind"] = args.observer
    if args.l0 is not None:
        merged["l0"] = args.l0
    if args.l1 is not None:
        merged["l1"] = args.l1
    if args.eig is not None:
        try:
            merged["eigenvalues"] = [float(v) for v in args.eig.split(",")]
        except ValueError as exc:
            raise ConfigError(f"--eig expects comma-separated reals: {exc}") from exc
    setup = _observer_from(merged, "observer config")
    model, Ts = _model_from(cfg.get("model", {}), "model config")
    alpha = args.alpha if args.alpha is not None else float(cfg.get("alpha", 1.0))
    inner = args.inner_loop or bool(cfg.get("inner_loop", False))
    d_k = args.d_k if args.d_k is not None else float(cfg.get("d_k", 0.0))
    report = analyze(
        discretize(model, Ts), setup, alpha=alpha, inner_loop=inner, d_k=d_k
    )
    doc = dict(report.to_json_dict())
    doc["schema"] = "dob-stability-report/1"
    text = _dump_json(doc)
    sys.stdout.write(text)
    if args.out:
        _write(args.out + ".json", text)
    if report.verdict != "pass" and not args.allow_unstable:
        print("stability constraint failed; see report", file=sys.stderr)
        return 3
    return 0


def _cmd_simulate(args) -> int:
    if args.preset is not None and args.config is not None:
        raise ConfigError("give either --preset or --config, not both")
    if args.preset is not None:
        cases = _preset_cases(args.preset, args)
    else:
        cfg = _load_config(args.config, args.override)
        if cfg is None:
            raise ConfigError("simulate needs --preset or --config")
        cases = _scenarios_from(cfg, args)
    prefix = _prefix(args, "dobkit-sim")
    traces = [run_closed_loop(case) for case in cases]
    metrics_doc = {"schema": "dob-metrics/1", "cases": {}}
    for case, trace in zip(cases, traces):
        _write(f"{prefix}-{case.label}.csv", trace.to_csv())
        metrics_doc["cases"][case.label] = compute_metrics(trace).to_json_dict()
        if not args.no_plot:
            from . import plots

            plots.render_trace(trace, f"{prefix}-{case.label}.png")
    if len(traces) > 1 and not args.no_plot:
        from . import plots

        plots.render_comparison(traces, f"{prefix}-comparison.png")
    text = _dump_json(metrics_doc)
    sys.stdout.write(text)
    _write(f"{prefix}-metrics.json", text)
    return 0


_SWEEP_KEYS = {
    "schema": str,
    "param": str,
    "values": (list, dict),
    "system": str,
    "loop": dict,
    "observer": dict,
}


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config, args.override) or {"schema": "dob-sweep/1"}
    _check_schema(cfg, "dob-sweep/1")
    _check_keys(cfg, _SWEEP_KEYS, "sweep config")
    param = args.param if args.param is not None else cfg.get("param")
    if param is None:
        raise ConfigError("sweep needs a param (--param or config)")
    system = args.system if args.system is not None else cfg.get("system", "observer")
    if args.values is not None:
        try:
            values = [float(v) for v in args.values.split(",")]
        except ValueError as exc:
            raise ConfigError(f"--values expects comma-separated reals: {exc}") from exc
    else:
        spec = cfg.get("values")
        if spec is None:
            raise ConfigError("sweep needs values (--values or config)")
        if isinstance(spec, dict):
            _check_keys(
                spec, {"start": float, "stop": float, "count": int}, "values"
            )
            for key in ("start", "stop", "count"):
                if key not in spec:
                    raise ConfigError(f"values range needs {key!r}")
            values = np.linspace(
                float(spec["start"]), float(spec["stop"]), int(spec["count"])
            ).tolist()
        else:
            values = [float(v) for v in spec]
    loop = _loop_from(cfg.get("loop", {}))
    observer = (
        _observer_from(cfg["observer"])
        if "observer" in cfg
        else ObserverSetup(kind=ObserverKind("zo"), l0=loop.l0)
    )
    try:
        rows = sweep_stability(loop, observer, param, values, system=system)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    prefix = _prefix(args, "dobkit-sweep")
    csv_lines = ["value,spectral_radius,verdict"]
    for r in rows:
        csv_lines.append(
            f"{format(r.value, '.17g')},{format(r.spectral_radius, '.17g')},{r.verdict}"
        )
    _write(prefix + "-sweep.csv", "\n".join(csv_lines) + "\n")
    doc = {
        "schema": "dob-sweep-result/1",
        "param": param,
        "system": system,
        "rows": [r.to_json_dict() for r in rows],
    }
    text = _dump_json(doc)
    sys.stdout.write(text)
    _write(prefix + "-sweep.json", text)
    if not args.no_plot and rows:
        from . import plots

        plots.render_sweep(rows, prefix + "-sweep.png", param, system)
    return 0


_ORDER_KEYS = {
    "schema": str,
    "Ts_values": list,
    "kinds": list,
    "duration": float,
    "disturbance": dict,
    "eigen_radius": float,
}


def _cmd_order_study(args) -> int:
    cfg = _load_config(args.config, args.override) or {"schema": "dob-order-study/1"}
    _check_schema(cfg, "dob-order-study/1")
    _check_keys(cfg, _ORDER_KEYS, "order-study config")
    if args.ts_values is not None:
        try:
            Ts_values = [float(v) for v in args.ts_values.split(",")]
        except ValueError as exc:
            raise ConfigError(
                f"--ts-values expects comma-separated reals: {exc}"
            ) from exc
    else:
        Ts_values = [float(v) for v in cfg.get("Ts_values", [0.002, 0.001, 0.0005, 0.00025])]
    kind_names = (
        args.kinds.split(",") if args.kinds is not None else cfg.get("kinds", ["zo", "fo", "hp"])
    )
    try:
        kinds = [ObserverKind(name) for name in kind_names]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    duration = args.duration if args.duration is not None else float(cfg.get("duration", 6.0))
    disturbance = _disturbance_from(cfg.get("disturbance", {"type": "sinusoid"}))
    nominal = ContinuousServoModel(DEFAULT_INERTIA, DEFAULT_VISCOUS_FRICTION)
    template = ScenarioConfig(
        loop=LoopConfig(
            plant=nominal, nominal=nominal, Ts=Ts_values[0], l0=0.275, Kp=2.5, Kd=0.25
        ),
        observer=ObserverSetup(kind=ObserverKind("zo"), l0=0.275),
        reference=ZeroReference(),
        disturbance=disturbance,
        duration=duration,
        substeps=args.substeps if args.substeps is not None else DEFAULT_SUBSTEPS,
        label="order-study",
    )
    try:
        result = order_study(
            template,
            Ts_values,
            kinds,
            eigen_radius=float(cfg.get("eigen_radius", 0.725)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    prefix = _prefix(args, "dobkit-order")
    csv_lines = ["kind,Ts,peak_est_error"]
    for kind in sorted(result.points):
        for Ts, peak in result.points[kind]:
            csv_lines.append(
                f"{kind},{format(Ts, '.17g')},{format(peak, '.17g')}"
            )
    _write(prefix + "-order-study.csv", "\n".join(csv_lines) + "\n")
    doc = {
        "schema": "dob-order-study-result/1",
        "points": {k: [[ts, pk] for ts, pk in v] for k, v in result.points.items()},
        "slopes": result.slopes,
        "notes": list(result.notes),
    }
    text = _dump_json(doc)
    sys.stdout.write(text)
    _write(prefix + "-order-study.json", text)
    if not args.no_plot:
        from . import plots

        plots.render_order_study(result, prefix + "-order-study.png")
    return 0


def _cmd_reproduce(args) -> int:
    name = _resolve_preset(args.name)
    result = reproduce(name)
    prefix = _prefix(args, f"dobkit-{name}")
    for label, trace in zip(result.labels, result.traces):
        _write(f"{prefix}-{label}.csv", trace.to_csv())
    doc = dict(result.to_json_dict())
    doc["schema"] = "dob-reproduction/1"
    text = _dump_json(doc)
    _write(f"{prefix}-report.json", text)
    if not args.no_plot:
        from . import plots

        plots.render_comparison(
            result.traces, f"{prefix}-comparison.png", title=name
        )
    for claim, ok, detail in result.assertions:
        print(f"{'PASS' if ok else 'FAIL'}: {claim} ({detail})")
    sys.stdout.write(text)
    if not result.passed:
        print("reproduction assertion failed", file=sys.stderr)
        return 4
    return 0


# ---------------------------------------------------------------------------
# Parser


def _add_shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument(
        "--out", help="output path prefix (default depends on the subcommand)"
    )
    p.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="dotted-path config override, repeatable",
    )
    p.add_argument(
        "--allow-unstable",
        action="store_true",
        help="run despite hard stability-constraint failures",
    )
    p.add_argument(
        "--quantize-encoder",
        type=int,
        default=None,
        metavar="N",
        help="quantize measured position to N counts per revolution",
    )
    p.add_argument(
        "--substeps",
        type=int,
        default=None,
        metavar="N",
        help="quadrature panels per sample for the disturbance increment",
    )
    p.add_argument(
        "--no-plot", action="store_true", help="skip figure rendering"
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dobkit",
        description="Discrete-time disturbance-observer motion control toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discretize", help="exact zero-order-hold discretization")
    _add_shared(p)
    p.add_argument("--J", type=float, help="inertia, kg m^2")
    p.add_argument("--b-visc", dest="b_visc", type=float, help="viscous friction")
    p.add_argument("--Ts", type=float, help="sampling time, s")
    p.set_defaults(func=_cmd_discretize)

    for name in ("tune", "analyze"):
        p = sub.add_parser(
            name, help="observer gain tuning and stability report"
        )
        _add_shared(p)
        p.add_argument("--observer", choices=["zo", "fo", "hp"], help="observer kind")
        p.add_argument("--l0", type=float, help="free gain parameter l0")
        p.add_argument("--l1", type=float, help="free gain parameter l1")
        p.add_argument(
            "--eig", help="desired eigenvalues, comma separated (fo/hp)"
        )
        p.add_argument("--alpha", type=float, help="nominal/true inertia ratio")
        p.add_argument(
            "--inner-loop",
            action="store_true",
            help="evaluate the fed-back constraint 0 < alpha*l0 < 2",
        )
        p.add_argument(
            "--d-k", dest="d_k", type=float, help="disturbance-increment bound"
        )
        p.set_defaults(func=_tune_analyze)

    p = sub.add_parser("simulate", help="run one scenario or preset group")
    _add_shared(p)
    p.add_argument("--preset", help="preset group name (e.g. fig5-hp-vs-zo)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="stability sweep over one parameter")
    _add_shared(p)
    p.add_argument("--param", help="parameter to sweep")
    p.add_argument("--values", help="comma-separated grid values")
    p.add_argument(
        "--system",
        choices=["observer", "inner", "closed"],
        help="which loop to analyze",
    )
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser(
        "order-study", help="estimation-error order vs sampling time"
    )
    _add_shared(p)
    p.add_argument("--ts-values", help="comma-separated sampling times")
    p.add_argument("--kinds", help="comma-separated observer kinds")
    p.add_argument("--duration", type=float, help="run length per point, s")
    p.set_defaults(func=_cmd_order_study)

    p = sub.add_parser("reproduce", help="run a preset and check its claims")
    _add_shared(p)
    p.add_argument("name", help="preset name or short alias (fig4a..fig7)")
    p.set_defaults(func=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StabilityConstraintError as exc:
        print(f"stability constraint failed: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
