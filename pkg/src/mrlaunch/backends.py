"""Execution backends.

Two kinds share one submit/await contract:

* ``LocalBackend`` actually runs the job: every array task becomes a
  subprocess of its run script, at most ``concurrency`` at a time, with
  stdout+stderr captured to the workspace log the scheduler would have
  written.  A dependent (reducer) job starts only after every task of the
  job it waits on exited 0 — otherwise it is skipped, mirroring an
  "after OK" dependency.
* ``DryRunBackend`` emits scripts and stops.  ``submit_array`` checks the
  materialized workspace, ``submit_dependent`` writes the reducer's
  submission script with the dependency directive filled in, and
  ``await_completion`` refuses: there is nothing to wait for.

Job ids are process-local monotonic integers, so workspace log names stay
unique across the jobs of one launcher process.
"""

from __future__ import annotations

import itertools
import os
import selectors
import subprocess
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import BackendError
from .scriptgen import LOG_PREFIX, JobPlan, get_dialect, emit_submission_script

_job_ids = itertools.count(1)


@dataclass(frozen=True)
class JobHandle:
    """Opaque ticket for a submitted job."""

    job_id: str
    task_count: int


@dataclass(frozen=True)
class TaskResult:
    """Outcome of one array task."""

    task_index: int
    exit_status: int
    elapsed: float
    log_path: Path


class _Job:
    def __init__(self, handle: JobHandle):
        self.handle = handle
        self.results: list[TaskResult] = []
        self.skipped = False
        self.error: BaseException | None = None
        self.done = threading.Event()


def _probe_pidfd() -> bool:
    # pidfd_open exists on Linux >= 5.3; anywhere else we poll.
    if not hasattr(os, "pidfd_open"):
        return False
    try:
        fd = os.pidfd_open(os.getpid())
    except OSError:
        return False
    os.close(fd)
    return True


class LocalBackend:
    """Runs array jobs as local subprocesses."""

    executes = True

    def __init__(self):
        self._jobs: dict[str, _Job] = {}
        self._plans: dict[str, JobPlan] = {}
        self._lock = threading.Lock()
        self._use_pidfd = _probe_pidfd()

    def _new_job(self) -> _Job:
        handle_id = str(next(_job_ids))
        job = _Job(JobHandle(handle_id, 0))
        return job

    @staticmethod
    def _check_script(path: Path) -> None:
        if not path.is_file():
            raise BackendError(f"run script missing: {path}")
        if not os.access(path, os.X_OK):
            raise BackendError(f"run script not executable: {path}")

    def submit_array(self, plan: JobPlan, concurrency_cap: int | None = None) -> JobHandle:
        """Start the mapper array job; returns immediately."""
        cap = concurrency_cap if concurrency_cap is not None else (os.cpu_count() or 1)
        if cap < 1:
            raise BackendError(f"concurrency cap must be positive, got {cap}")
        for script in plan.run_scripts:
            self._check_script(script)

        job = self._new_job()
        handle = JobHandle(job.handle.job_id, len(plan.run_scripts))
        job.handle = handle
        with self._lock:
            self._jobs[handle.job_id] = job
            self._plans[handle.job_id] = plan
        entries = [(task.index, script) for task, script in zip(plan.tasks, plan.run_scripts)]
        worker = threading.Thread(
            target=self._run_job,
            args=(job, entries, cap, plan),
            name=f"mrlaunch-job-{handle.job_id}",
        )
        worker.start()
        return handle

    def submit_dependent(self, script: Path, after: JobHandle) -> JobHandle:
        """Queue a single-task job gated on every task of ``after``
        finishing with status 0; skipped (no results) otherwise."""
        self._check_script(script)
        with self._lock:
            upstream = self._jobs.get(after.job_id)
            plan = self._plans.get(after.job_id)
        if upstream is None or plan is None:
            raise BackendError(f"unknown job handle: {after.job_id}")

        job = self._new_job()
        handle = JobHandle(job.handle.job_id, 1)
        job.handle = handle
        with self._lock:
            self._jobs[handle.job_id] = job

        def gate():
            upstream.done.wait()
            ok = (
                upstream.error is None
                and not upstream.skipped
                and upstream.results
                and all(r.exit_status == 0 for r in upstream.results)
            )
            if not ok:
                job.skipped = True
                job.done.set()
                return
            self._run_job(job, [(1, script)], 1, plan)

        threading.Thread(target=gate, name=f"mrlaunch-job-{handle.job_id}").start()
        return handle

    def await_completion(self, handle: JobHandle) -> list[TaskResult]:
        """Block until the job finishes; results ordered by task index.
        A dependency-skipped job yields an empty list."""
        with self._lock:
            job = self._jobs.get(handle.job_id)
        if job is None:
            raise BackendError(f"unknown job handle: {handle.job_id}")
        job.done.wait()
        if job.error is not None:
            raise BackendError(f"job {handle.job_id} failed to run: {job.error}")
        return sorted(job.results, key=lambda r: r.task_index)

    def was_skipped(self, handle: JobHandle) -> bool:
        with self._lock:
            job = self._jobs.get(handle.job_id)
        if job is None:
            raise BackendError(f"unknown job handle: {handle.job_id}")
        job.done.wait()
        return job.skipped

    # -- worker internals ------------------------------------------------

    def _run_job(self, job: _Job, entries, cap: int, plan: JobPlan) -> None:
        try:
            job.results = self._execute(job.handle.job_id, entries, cap, plan)
        except BaseException as exc:  # surface in await_completion
            job.error = exc
        finally:
            job.done.set()

    def _spawn(self, job_id: str, index: int, script: Path, plan: JobPlan):
        log_path = plan.workspace / f"{LOG_PREFIX}-{job_id}-{index}"
        log = open(log_path, "wb")
        try:
            proc = subprocess.Popen(
                [str(script)],
                stdout=log,
                stderr=subprocess.STDOUT,
                stdin=subprocess.DEVNULL,
                cwd=plan.workdir,
            )
        except OSError as exc:
            # Script vanished or became unrunnable between submit and spawn;
            # record it as a failed task rather than killing the whole job.
            log.write(f"failed to start {script}: {exc}\n".encode())
            log.close()
            return None, log_path, log
        return proc, log_path, log

    def _execute(self, job_id: str, entries, cap: int, plan: JobPlan) -> list[TaskResult]:
        if self._use_pidfd:
            return self._execute_pidfd(job_id, entries, cap, plan)
        return self._execute_polling(job_id, entries, cap, plan)

    def _execute_pidfd(self, job_id, entries, cap, plan) -> list[TaskResult]:
        results: list[TaskResult] = []
        pending = list(entries)
        sel = selectors.DefaultSelector()
        starts: dict[int, float] = {}
        running = 0
        try:
            while pending or running:
                while pending and running < cap:
                    index, script = pending.pop(0)
                    proc, log_path, log = self._spawn(job_id, index, script, plan)
                    if proc is None:
                        results.append(TaskResult(index, 127, 0.0, log_path))
                        continue
                    starts[index] = time.monotonic()
                    pidfd = os.pidfd_open(proc.pid)
                    sel.register(pidfd, selectors.EVENT_READ, (index, proc, log, log_path))
                    running += 1
                if not running:
                    continue
                ready = sel.select()
                # One end-of-batch stamp: reaping inside the loop would bill
                # tasks for the time spent wait()ing on their batch-mates.
                end = time.monotonic()
                for key, _ in ready:
                    index, proc, log, log_path = key.data
                    status = proc.wait()
                    log.close()
                    sel.unregister(key.fd)
                    os.close(key.fd)
                    results.append(TaskResult(index, status, end - starts[index], log_path))
                    running -= 1
        finally:
            sel.close()
        return results

    def _execute_polling(self, job_id, entries, cap, plan) -> list[TaskResult]:
        results: list[TaskResult] = []
        pending = list(entries)
        live: list[tuple[int, subprocess.Popen, object, Path, float]] = []
        while pending or live:
            while pending and len(live) < cap:
                index, script = pending.pop(0)
                proc, log_path, log = self._spawn(job_id, index, script, plan)
                if proc is None:
                    results.append(TaskResult(index, 127, 0.0, log_path))
                    continue
                live.append((index, proc, log, log_path, time.monotonic()))
            if not live:
                continue
            time.sleep(0.004)
            now = time.monotonic()
            still = []
            for index, proc, log, log_path, started in live:
                status = proc.poll()
                if status is None:
                    still.append((index, proc, log, log_path, started))
                    continue
                log.close()
                results.append(TaskResult(index, status, now - started, log_path))
            live = still
        return results


class DryRunBackend:
    """Emits scheduler scripts; never executes anything."""

    executes = False

    def __init__(self, dialect_name: str):
        self._dialect = get_dialect(dialect_name)
        self._plans: dict[str, JobPlan] = {}

    def submit_array(self, plan: JobPlan, concurrency_cap: int | None = None) -> JobHandle:
        if not plan.submission_script.is_file():
            raise BackendError(f"submission script missing: {plan.submission_script}")
        handle = JobHandle(str(next(_job_ids)), len(plan.tasks))
        self._plans[handle.job_id] = plan
        return handle

    def submit_dependent(self, script: Path, after: JobHandle) -> JobHandle:
        """Write the reducer submission script, gated on the mapper job id
        with the dialect's after-OK dependency directive."""
        plan = self._plans.get(after.job_id)
        if plan is None:
            raise BackendError(f"unknown job handle: {after.job_id}")
        text = emit_submission_script(
            self._dialect.name,
            job_name=plan.reducer_job_name,
            task_count=1,
            workspace=plan.workspace.name,
            exclusive=plan.exclusive,
            extra_options=plan.extra_options,
            depends_on=after.job_id,
            dispatch=f"{plan.workspace.name}/{script.name}",
        )
        target = plan.workspace / plan.reducer_job_name
        target.write_text(text)
        target.chmod(0o755)
        return JobHandle(str(next(_job_ids)), 1)

    def await_completion(self, handle: JobHandle) -> list[TaskResult]:
        raise BackendError(
            f"backend {self._dialect.name!r} only emits scripts; there is no job to wait for"
        )


def make_backend(name: str):
    if name == "local":
        return LocalBackend()
    return DryRunBackend(name)
