"""Figure rendering for traces, comparisons, sweeps, and order studies.

Everything renders through the Agg backend straight to files, with the
writer's software tag stripped so repeated runs produce byte-identical
images. Figures are plain matplotlib with a fixed size and dpi; no
styling beyond a thin grid.
"""
from __future__ import annotations

from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

__all__ = [
    "render_trace",
    "render_comparison",
    "render_sweep",
    "render_order_study",
]

_DPI = 120
_PNG_META = {"Software": None}  # drop the version tag for reproducible bytes


def _save(fig, path: str) -> None:
    fig.savefig(path, dpi=_DPI, metadata=_PNG_META)
    plt.close(fig)


def render_trace(trace, path: str) -> None:
    """Three stacked panels: position vs reference, disturbance vs
    estimate, and the two error channels."""
    fig, axes = plt.subplots(3, 1, figsize=(8, 9), sharex=True)
    ax = axes[0]
    ax.plot(trace.t, trace.q_ref, "k--", linewidth=1.0, label="reference")
    ax.plot(trace.t, trace.q, linewidth=1.2, label="position")
    ax.set_ylabel("position [rad]")
    ax.legend(loc="best")
    ax = axes[1]
    ax.plot(trace.t, trace.tau_d, "k--", linewidth=1.0, label="disturbance")
    ax.plot(trace.t, trace.tau_hat, linewidth=1.2, label="estimate")
    if trace.tau_hat_dot is not None:
        ax.plot(
            trace.t, trace.tau_hat_dot, linewidth=0.9, label="estimate rate"
        )
    ax.set_ylabel("torque [N m]")
    ax.legend(loc="best")
    ax = axes[2]
    ax.plot(trace.t, trace.tracking_error, linewidth=1.0, label="tracking error")
    ax.plot(trace.t, trace.est_error, linewidth=1.0, label="estimation error")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("error")
    ax.legend(loc="best")
    title = trace.label or trace.observer
    if trace.diverged:
        title += " (diverged)"
    axes[0].set_title(title)
    for a in axes:
        a.grid(True, linewidth=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_comparison(traces: Sequence, path: str, title: str = "") -> None:
    """Overlay tracking and estimation errors of several runs."""
    fig, axes = plt.subplots(2, 1, figsize=(8, 6.5), sharex=True)
    for trace in traces:
        label = trace.label or trace.observer
        axes[0].plot(trace.t, trace.tracking_error, linewidth=1.0, label=label)
        axes[1].plot(trace.t, trace.est_error, linewidth=1.0, label=label)
    axes[0].set_ylabel("tracking error [rad]")
    axes[1].set_ylabel("estimation error [N m]")
    axes[1].set_xlabel("time [s]")
    for a in axes:
        a.grid(True, linewidth=0.3)
        a.legend(loc="best")
    if title:
        axes[0].set_title(title)
    fig.tight_layout()
    _save(fig, path)


def render_sweep(rows: Sequence, path: str, param: str, system: str) -> None:
    """Spectral radius against the swept parameter, failures marked."""
    values = np.array([r.value for r in rows])
    radii = np.array([r.spectral_radius for r in rows])
    failed = np.array([r.verdict == "fail" for r in rows])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(values, radii, linewidth=1.2)
    if np.any(failed):
        ax.plot(
            values[failed], radii[failed], "x", markersize=5, label="fail"
        )
        ax.legend(loc="best")
    ax.axhline(1.0, color="k", linewidth=0.8, linestyle="--")
    ax.set_xlabel(param)
    ax.set_ylabel("spectral radius")
    ax.set_title(f"{system} stability over {param}")
    ax.grid(True, linewidth=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_order_study(result, path: str) -> None:
    """Log-log steady peak estimation error vs Ts with fitted slopes."""
    fig, ax = plt.subplots(figsize=(7, 5))
    for kind in sorted(result.points):
        rows = result.points[kind]
        Ts = np.array([r[0] for r in rows])
        peak = np.array([r[1] for r in rows])
        slope = result.slopes.get(kind)
        label = kind if slope is None else f"{kind} (slope {slope:.2f})"
        ax.loglog(Ts, peak, "o-", linewidth=1.2, markersize=4, label=label)
    ax.set_xlabel("sampling time [s]")
    ax.set_ylabel("steady peak estimation error [N m]")
    ax.grid(True, which="both", linewidth=0.3)
    ax.legend(loc="best")
    fig.tight_layout()
    _save(fig, path)
