"""End-to-end launch pipeline.

``launch`` ties the stages together: discover inputs, partition them into
array tasks, materialize the workspace, submit through a backend, and —
on the local backend — wait for results, run the dependent reducer, and
clean the workspace up.  A stage failure raises ``LaunchStageError`` with
the stage name and leaves any workspace already materialized on disk.
"""

from __future__ import annotations

import logging
import shutil
import time
from dataclasses import dataclass, field
from pathlib import Path

from .backends import JobHandle, TaskResult, make_backend
from .config import LaunchConfig, validate
from .discovery import build_work_items, discover_inputs, mirror_output_tree
from .errors import LauncherError, LaunchStageError
from .partition import assign_block, assign_cyclic, resolve_task_count
from .scriptgen import materialize

log = logging.getLogger(__name__)


@dataclass
class RunReport:
    """What a launch did, and how it went."""

    backend: str
    executed: bool
    workspace: str
    workspace_kept: bool
    task_count: int
    file_count: int
    mapper_job: str
    reducer_job: str | None = None
    task_results: list[TaskResult] = field(default_factory=list)
    reducer_results: list[TaskResult] = field(default_factory=list)
    reducer_skipped: bool = False
    reducer_output: str | None = None
    wall_time: float = 0.0

    @property
    def failed_tasks(self) -> list[TaskResult]:
        return [r for r in self.task_results if r.exit_status != 0]

    @property
    def reducer_failed(self) -> bool:
        return any(r.exit_status != 0 for r in self.reducer_results)

    @property
    def succeeded(self) -> bool:
        """Emit-only runs succeed by reaching submission; executed runs
        need every mapper task at 0 and the reducer (if any) ran clean."""
        if not self.executed:
            return True
        if self.failed_tasks:
            return False
        if self.reducer_job is not None and (self.reducer_skipped or self.reducer_failed):
            return False
        return True

    def to_dict(self) -> dict:
        return {
            "backend": self.backend,
            "executed": self.executed,
            "succeeded": self.succeeded,
            "workspace": self.workspace,
            "workspace_kept": self.workspace_kept,
            "task_count": self.task_count,
            "file_count": self.file_count,
            "mapper_job": self.mapper_job,
            "reducer_job": self.reducer_job,
            "reducer_skipped": self.reducer_skipped,
            "reducer_output": self.reducer_output,
            "wall_time": self.wall_time,
            "task_results": [
                {
                    "task": r.task_index,
                    "exit_status": r.exit_status,
                    "elapsed": r.elapsed,
                    "log": str(r.log_path),
                }
                for r in self.task_results
            ],
            "reducer_results": [
                {
                    "task": r.task_index,
                    "exit_status": r.exit_status,
                    "elapsed": r.elapsed,
                    "log": str(r.log_path),
                }
                for r in self.reducer_results
            ],
        }

    def summary_lines(self) -> list[str]:
        lines = [
            f"backend={self.backend} files={self.file_count} tasks={self.task_count} "
            f"workspace={self.workspace}"
        ]
        if not self.executed:
            lines.append(f"scripts emitted (job {self.mapper_job}); nothing was executed")
            return lines
        failed = self.failed_tasks
        if failed:
            worst = ", ".join(f"task {r.task_index} exit {r.exit_status}" for r in failed[:5])
            more = "" if len(failed) <= 5 else f" (+{len(failed) - 5} more)"
            lines.append(f"mapper: {len(failed)}/{self.task_count} tasks failed: {worst}{more}")
        else:
            lines.append(f"mapper: {self.task_count} tasks ok in {self.wall_time:.2f}s")
        if self.reducer_job is not None:
            if self.reducer_skipped:
                lines.append("reducer: skipped (mapper tasks failed)")
            elif self.reducer_failed:
                lines.append(f"reducer: failed (exit {self.reducer_results[0].exit_status})")
            else:
                where = self.reducer_output or "(reducer wrote no file)"
                lines.append(f"reducer: ok, output {where}")
        if self.workspace_kept:
            lines.append(f"workspace kept: {self.workspace}")
        return lines


class _Stage:
    """Re-raises stage failures as LaunchStageError tagged with the stage."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is None or isinstance(exc, LaunchStageError):
            return False
        if isinstance(exc, Exception):
            raise LaunchStageError(self.name, exc) from exc
        return False


def launch(config: LaunchConfig) -> RunReport:
    """Run the whole pipeline for one job.

    Local backend: blocks until mapper (and reducer) finish, then applies
    the workspace policy — removed only after a fully successful run with
    ``keep`` off; any failure keeps it for post-mortem.  Emit-only
    backends return right after writing the scripts, workspace kept.
    """
    started = time.monotonic()
    with _Stage("validate"):
        cfg = validate(config)

    with _Stage("discover"):
        inputs = discover_inputs(cfg.input, cfg.subdir, base=cfg.workdir)
        items = build_work_items(
            inputs, cfg.input, cfg.output, cfg.subdir, cfg.delimiter, cfg.ext
        )
        mirror_output_tree(items, base=cfg.workdir)

    with _Stage("partition"):
        task_count = resolve_task_count(len(items), cfg.np, cfg.ndata, cfg.max_array_tasks)
        assign = assign_cyclic if cfg.distribution == "cyclic" else assign_block
        tasks = assign(items, task_count)

    with _Stage("generate"):
        plan = materialize(cfg, tasks)

    backend = make_backend(cfg.backend)
    with _Stage("submit"):
        mapper_handle = backend.submit_array(plan, cfg.concurrency)
        reducer_handle: JobHandle | None = None
        if plan.reducer_script is not None:
            reducer_handle = backend.submit_dependent(plan.reducer_script, mapper_handle)

    report = RunReport(
        backend=cfg.backend,
        executed=backend.executes,
        workspace=str(plan.workspace),
        workspace_kept=True,
        task_count=task_count,
        file_count=len(items),
        mapper_job=mapper_handle.job_id,
        reducer_job=reducer_handle.job_id if reducer_handle else None,
    )
    if not backend.executes:
        report.wall_time = time.monotonic() - started
        log.info("emitted %s scripts under %s", cfg.backend, plan.workspace)
        return report

    with _Stage("await"):
        report.task_results = backend.await_completion(mapper_handle)
        if reducer_handle is not None:
            report.reducer_results = backend.await_completion(reducer_handle)
            report.reducer_skipped = backend.was_skipped(reducer_handle)
            if report.reducer_results and not report.reducer_failed:
                redout = Path(cfg.workdir) / cfg.redout
                if redout.is_file():
                    report.reducer_output = str(redout)
    report.wall_time = time.monotonic() - started

    removed = cleanup(plan.workspace, cfg.keep, report.succeeded)
    report.workspace_kept = not removed
    return report


def cleanup(workspace: str | Path, keep: bool, run_succeeded: bool) -> bool:
    """Apply the workspace policy; True if the directory was removed.

    Kept when ``keep`` is on or the run failed (the logs in there are the
    evidence).  Removal trouble is logged, never raised: the job itself
    already finished.
    """
    if keep or not run_succeeded:
        return False
    try:
        shutil.rmtree(workspace)
    except OSError as exc:
        log.warning("could not remove workspace %s: %s", workspace, exc)
        return False
    return True
