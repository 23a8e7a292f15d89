"""Benchmark figures, rendered straight to image files.

Uses the matplotlib object API (no pyplot, no global backend state) so a
headless run can't trip over a display.
"""

from __future__ import annotations

from pathlib import Path

from matplotlib.figure import Figure

from .bench import SweepMeasurement

_MARKERS = {"default": "o", "block": "s", "mimo": "^"}


def _series(measurements: list[SweepMeasurement], mode: str):
    points = sorted(
        (m for m in measurements if m.mode == mode), key=lambda m: m.task_count
    )
    return [m.task_count for m in points], points


def _new_axes(title: str, ylabel: str):
    fig = Figure(figsize=(6.0, 4.0), dpi=120)
    ax = fig.subplots()
    ax.set_title(title)
    ax.set_xlabel("array tasks")
    ax.set_ylabel(ylabel)
    ax.set_xscale("log", base=2)
    ax.grid(True, which="both", alpha=0.3)
    return fig, ax


def save_overhead_figure(measurements: list[SweepMeasurement], path: str | Path) -> Path:
    """Per-task overhead vs task count, one line per mode, log-log."""
    fig, ax = _new_axes("Per-task overhead", "overhead per task (s)")
    ax.set_yscale("log")
    for mode in dict.fromkeys(m.mode for m in measurements):
        xs, points = _series(measurements, mode)
        ys = [m.overhead_per_task for m in points]
        ax.plot(xs, ys, marker=_MARKERS.get(mode, "x"), label=mode)
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path)
    return path


def save_speedup_figure(measurements: list[SweepMeasurement], path: str | Path) -> Path:
    """Speedup over the one-task baseline vs task count."""
    fig, ax = _new_axes("Speedup vs one task", "speedup")
    for mode in dict.fromkeys(m.mode for m in measurements):
        xs, points = _series(measurements, mode)
        ys = [m.speedup for m in points]
        ax.plot(xs, ys, marker=_MARKERS.get(mode, "x"), label=mode)
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path)
    return path
