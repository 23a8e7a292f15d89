"""Startup-overhead benchmark.

Sweeps array-task counts for three launch styles over one synthetic
corpus of F files, using sleep-based stand-in mappers parameterized by a
startup latency ``s`` and a per-file work time ``w``.  With k = ceil(F/T)
files per task, the modeled critical-path task time is

    default  siso + cyclic assignment    k * (s + w)   (k invocations)
    block    siso + block assignment     k * (s + w)
    mimo     mimo + block assignment     s + k * w     (1 invocation)

so per-task overhead (elapsed - k*w) shrinks as tasks are added for the
siso styles but stays pinned near ``s`` for mimo, and all styles converge
once every task holds a single file.

Measurement: each stand-in mapper appends ``<key> <t0> <t1>`` to a ledger
around its timed wait, a sweep point's per-task span is max(t1) - min(t0)
over the task's ledger lines, and ``elapsed`` is the largest task span.
The stubs time themselves because the launcher-side wall clock also
counts process-creation queueing, which on a small or busy machine is an
artifact of the harness, not of the modeled workload; the wall clock is
still reported alongside for transparency.
"""

from __future__ import annotations

import math
import os
import statistics
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .config import LaunchConfig
from .errors import BenchError
from .orchestrator import launch
from .partition import assign_block, assign_cyclic

# style -> (apptype, distribution)
MODES = {
    "default": ("siso", "cyclic"),
    "block": ("siso", "block"),
    "mimo": ("mimo", "block"),
}

BASELINE_MODE = "default"  # speedups are relative to this style at T=1


@dataclass(frozen=True)
class CostModel:
    """Sweep parameters.  ``startup_s`` and ``work_w`` are in seconds and
    are rounded to whole microseconds inside the stand-in mappers."""

    startup_s: float
    work_w: float
    files: int
    task_counts: tuple[int, ...]
    modes: tuple[str, ...] = ("default", "block", "mimo")
    payload_bytes: int = 1024
    repeats: int = 1

    def check(self) -> None:
        if self.startup_s <= 0:
            raise BenchError(f"startup_s must be positive, got {self.startup_s}")
        if self.work_w < 0:
            raise BenchError(f"work_w must be >= 0, got {self.work_w}")
        if self.files < 1:
            raise BenchError(f"files must be positive, got {self.files}")
        if not self.task_counts:
            raise BenchError("task_counts is empty")
        for t in self.task_counts:
            if not 1 <= t <= self.files:
                raise BenchError(f"task count {t} not in 1..{self.files}")
        for mode in self.modes:
            if mode not in MODES:
                raise BenchError(f"unknown mode {mode!r}; known: {', '.join(MODES)}")
        if self.repeats < 1:
            raise BenchError(f"repeats must be positive, got {self.repeats}")
        if self.payload_bytes < 1:
            raise BenchError(f"payload_bytes must be positive, got {self.payload_bytes}")


@dataclass
class SweepMeasurement:
    """One (mode, task count) point of the sweep."""

    mode: str
    task_count: int
    files_per_task: int
    elapsed: float
    overhead_per_task: float | None = None
    speedup: float | None = None
    wall: float = 0.0


def predict_elapsed(mode: str, files_per_task: int, startup_s: float, work_w: float) -> float:
    """Modeled critical-path task time for a sweep point."""
    if mode == "mimo":
        return startup_s + files_per_task * work_w
    return files_per_task * (startup_s + work_w)


def predict_overhead(mode: str, files_per_task: int, startup_s: float) -> float:
    return startup_s if mode == "mimo" else files_per_task * startup_s


def synthesize_corpus(directory: str | Path, files: int, payload_bytes: int = 1024) -> Path:
    """Write ``files`` fixed-size inputs named ``file_0001`` ... so a
    rerun regenerates identical names and sizes."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    width = max(4, len(str(files)))
    for i in range(1, files + 1):
        stamp = f"{i:0{width}d}\n".encode()
        payload = (stamp * (payload_bytes // len(stamp) + 1))[:payload_bytes]
        (directory / f"file_{i:0{width}d}").write_bytes(payload)
    return directory


def _microseconds(seconds: float) -> int:
    return round(seconds * 1_000_000)


def _timed_wait(fifo: Path | None, dur_expr: str) -> str:
    # Preferred wait is a bash read with a timeout on a FIFO opened
    # read-write: it never gets data, so it sleeps dur seconds without
    # forking another process.  /bin/sleep is the fallback.
    if fifo is not None:
        return f'read -r -t {dur_expr} _ <> {fifo} || :'
    return f"sleep {dur_expr}"


def make_stub_mappers(
    scratch: str | Path, startup_s: float, work_w: float, ledger: str | Path
) -> tuple[Path, Path]:
    """Generate the siso and mimo stand-in mappers into ``scratch``.

    Both write a small marker to each output file and append one
    ``<key> <start> <end>`` line per invocation to ``ledger``, where the
    key is the input path (siso) or the manifest basename (mimo) and the
    stamps are bash EPOCHREALTIME seconds taken around the timed wait.
    """
    scratch = Path(scratch)
    scratch.mkdir(parents=True, exist_ok=True)
    ledger = Path(ledger)
    for path in (scratch, ledger):
        if any(ch.isspace() for ch in str(path)):
            raise BenchError(f"scratch paths are embedded in shell scripts; no whitespace: {path}")

    fifo: Path | None = scratch / "timer.fifo"
    try:
        if not fifo.exists():
            os.mkfifo(fifo)
    except OSError:
        fifo = None

    s_us = _microseconds(startup_s)
    w_us = _microseconds(work_w)

    siso_dur = f"{(s_us + w_us) / 1_000_000:.6f}"
    siso = scratch / "stub_siso"
    siso.write_text(
        "#!/bin/bash\n"
        "t0=$EPOCHREALTIME\n"
        f"{_timed_wait(fifo, siso_dur)}\n"
        "t1=$EPOCHREALTIME\n"
        'printf \'done\\n\' > "$2"\n'
        f'printf \'%s %s %s\\n\' "$1" "$t0" "$t1" >> {ledger}\n'
    )
    siso.chmod(0o755)

    dur_quoted = '"$dur"'
    mimo = scratch / "stub_mimo"
    mimo.write_text(
        "#!/bin/bash\n"
        "n=0\n"
        'while read -r _in _out; do\n'
        "  n=$((n+1))\n"
        "  printf 'done\\n' > \"$_out\"\n"
        'done < "$1"\n'
        f"us=$(( {s_us} + n * {w_us} ))\n"
        "printf -v dur '%d.%06d' $((us / 1000000)) $((us % 1000000))\n"
        "t0=$EPOCHREALTIME\n"
        f"{_timed_wait(fifo, dur_quoted)}\n"
        "t1=$EPOCHREALTIME\n"
        'printf \'%s %s %s\\n\' "${1##*/}" "$t0" "$t1" >> '
        f"{ledger}\n"
    )
    mimo.chmod(0o755)
    return siso, mimo


def _read_ledger(ledger: Path) -> dict[str, list[tuple[float, float]]]:
    spans: dict[str, list[tuple[float, float]]] = {}
    if not ledger.exists():
        return spans
    for line in ledger.read_text().splitlines():
        if not line.strip():
            continue
        try:
            key, t0, t1 = line.split()
            spans.setdefault(key, []).append((float(t0), float(t1)))
        except ValueError as exc:
            raise BenchError(f"malformed ledger line {line!r}") from exc
    return spans


def _task_spans(
    mode: str, inputs: list[str], task_count: int, spans: dict[str, list[tuple[float, float]]]
) -> list[float]:
    """Per-task spans: max end minus min start of each task's entries."""
    apptype, distribution = MODES[mode]
    per_task: list[list[tuple[float, float]]] = []
    if apptype == "mimo":
        for index in range(1, task_count + 1):
            per_task.append(spans.get(f"input_{index}", []))
    else:
        assign = assign_cyclic if distribution == "cyclic" else assign_block
        for task in assign(inputs, task_count):
            entries = []
            for input_path in task.items:
                entries.extend(spans.get(input_path, []))
            per_task.append(entries)
    out = []
    for index, entries in enumerate(per_task, 1):
        if not entries:
            raise BenchError(f"ledger has no entries for task {index} ({mode})")
        out.append(max(t1 for _, t1 in entries) - min(t0 for t0, _ in entries))
    return out


def run_sweep(model: CostModel, workdir: str | Path | None = None) -> list[SweepMeasurement]:
    """Run the whole sweep; returns one measurement per (mode, T), with
    ``repeats`` launches per point reduced by median."""
    model.check()
    scratch = Path(workdir) if workdir else Path(tempfile.mkdtemp(prefix="mrbench-"))
    scratch.mkdir(parents=True, exist_ok=True)

    corpus = synthesize_corpus(scratch / "corpus", model.files, model.payload_bytes)
    ledger = scratch / "ledger"
    siso, mimo = make_stub_mappers(scratch, model.startup_s, model.work_w, ledger)
    # Scripts refer to everything workspace-relative, so rebase onto the
    # scratch directory and hand out relative spellings.
    inputs = [os.path.join("corpus", p.name) for p in sorted(corpus.iterdir())]
    if len(inputs) != model.files:
        raise BenchError(f"corpus has {len(inputs)} files, expected {model.files}")

    measurements = []
    for mode in model.modes:
        apptype, distribution = MODES[mode]
        mapper = mimo if apptype == "mimo" else siso
        for task_count in model.task_counts:
            elapsed_reps = []
            wall_reps = []
            for rep in range(model.repeats):
                ledger.unlink(missing_ok=True)
                out_dir = f"out_{mode}_{task_count}_{rep}"
                config = LaunchConfig(
                    mapper=f"./{mapper.name}",
                    input="corpus",
                    output=out_dir,
                    np=task_count,
                    distribution=distribution,
                    apptype=apptype,
                    backend="local",
                    concurrency=task_count,
                    workdir=str(scratch),
                )
                report = launch(config)
                if not report.succeeded:
                    raise BenchError(
                        f"sweep point {mode}/T={task_count} failed; "
                        f"workspace kept at {report.workspace}"
                    )
                spans = _read_ledger(ledger)
                n_entries = sum(len(v) for v in spans.values())
                expected = task_count if apptype == "mimo" else model.files
                if n_entries != expected:
                    raise BenchError(
                        f"ledger has {n_entries} entries for {mode}/T={task_count}, "
                        f"expected {expected}"
                    )
                elapsed_reps.append(max(_task_spans(mode, inputs, task_count, spans)))
                wall_reps.append(report.wall_time)
            measurement = SweepMeasurement(
                mode=mode,
                task_count=task_count,
                files_per_task=math.ceil(model.files / task_count),
                elapsed=statistics.median(elapsed_reps),
                wall=statistics.median(wall_reps),
            )
            measurement.overhead_per_task = overhead_per_task(measurement, model)
            measurements.append(measurement)
    return speedup_table(measurements, strict=False)


def overhead_per_task(measurement: SweepMeasurement, model: CostModel) -> float:
    """Observed per-task cost beyond the modeled useful work k*w."""
    return measurement.elapsed - measurement.files_per_task * model.work_w


def speedup_table(
    measurements: list[SweepMeasurement], strict: bool = True
) -> list[SweepMeasurement]:
    """Fill in speedups relative to the one-task baseline style and order
    the table by mode then task count.

    ``strict`` raises when the baseline point (default mode, T=1) is
    missing; otherwise speedups are left unset.
    """
    baseline = next(
        (m for m in measurements if m.mode == BASELINE_MODE and m.task_count == 1), None
    )
    if baseline is None:
        if strict:
            raise BenchError(
                f"no baseline measurement ({BASELINE_MODE} mode at 1 task) in the sweep"
            )
    else:
        for m in measurements:
            m.speedup = baseline.elapsed / m.elapsed if m.elapsed > 0 else None
    mode_order = {mode: i for i, mode in enumerate(MODES)}
    return sorted(measurements, key=lambda m: (mode_order.get(m.mode, 99), m.task_count))


def format_table(measurements: list[SweepMeasurement]) -> str:
    """The sweep as a tab-separated table, one row per (mode, T)."""
    lines = ["mode\ttasks\tfiles_per_task\telapsed_s\toverhead_s\tspeedup\twall_s"]
    for m in measurements:
        overhead = f"{m.overhead_per_task:.4f}" if m.overhead_per_task is not None else "nan"
        speedup = f"{m.speedup:.3f}" if m.speedup is not None else "nan"
        lines.append(
            f"{m.mode}\t{m.task_count}\t{m.files_per_task}\t"
            f"{m.elapsed:.4f}\t{overhead}\t{speedup}\t{m.wall:.4f}"
        )
    return "\n".join(lines) + "\n"
