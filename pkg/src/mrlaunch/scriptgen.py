"""Workspace materialization: run scripts, manifests, submission scripts.

Every launch gets a private workspace directory named ``.MAPRED.<pid>``
inside the run's working directory:

    .MAPRED.<pid>/
        <mapper name>           array-job submission script
        run_llmap_<i>           per-task run script, i = 1..T
        input_<i>               per-task input/output manifest (mimo only)
        run_llmap_reduce        reducer run script (when a reducer is set)
        <reducer name>_reduce   reducer submission script (emit-only backends)
        llmap.log-<job>-<task>  per-task logs (local backend)

Submission scripts carry scheduler directives for one of three dialects
and end with a single dispatch line that executes the run script whose
suffix is the task's array index.  All paths inside generated scripts are
workspace-relative, so a script tree can be inspected, copied, or handed
to a real scheduler from the directory the launch was rooted in.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .config import LaunchConfig
from .errors import WorkspaceError
from .partition import TaskPlan

RUN_SCRIPT_PREFIX = "run_llmap_"
MANIFEST_PREFIX = "input_"
REDUCE_RUN_SCRIPT = "run_llmap_reduce"
LOG_PREFIX = "llmap.log"


class GridEngineDialect:
    name = "gridengine"
    task_var = "$SGE_TASK_ID"

    def directive_lines(
        self,
        *,
        job_name: str,
        task_count: int,
        workspace: str,
        exclusive: bool,
        extra_options: str,
        depends_on: str | None = None,
    ) -> list[str]:
        excl = "true" if exclusive else "false"
        lines = [
            f"#$ -terse -cwd -V -j y -N {job_name}",
            f"#$ -l excl={excl} -t 1-{task_count}",
            f"#$ -o {workspace}/{LOG_PREFIX}-$JOB_ID-$TASK_ID",
        ]
        if depends_on is not None:
            lines.append(f"#$ -hold_jid {depends_on}")
        if extra_options:
            lines.append(f"#$ {extra_options}")
        return lines


class SlurmDialect:
    name = "slurm"
    task_var = "$SLURM_ARRAY_TASK_ID"

    def directive_lines(
        self,
        *,
        job_name: str,
        task_count: int,
        workspace: str,
        exclusive: bool,
        extra_options: str,
        depends_on: str | None = None,
    ) -> list[str]:
        lines = [
            "#SBATCH --parsable",
            f"#SBATCH --job-name={job_name}",
            f"#SBATCH --output={workspace}/{LOG_PREFIX}-%A-%a",
            f"#SBATCH --array=1-{task_count}",
        ]
        if exclusive:
            lines.append("#SBATCH --exclusive")
        if depends_on is not None:
            lines.append(f"#SBATCH --dependency=afterok:{depends_on}")
        if extra_options:
            lines.append(f"#SBATCH {extra_options}")
        return lines


class LsfDialect:
    name = "lsf"
    task_var = "$LSB_JOBINDEX"

    def directive_lines(
        self,
        *,
        job_name: str,
        task_count: int,
        workspace: str,
        exclusive: bool,
        extra_options: str,
        depends_on: str | None = None,
    ) -> list[str]:
        lines = [
            f"#BSUB -J {job_name}[1-{task_count}]",
            f"#BSUB -o {workspace}/{LOG_PREFIX}-%J-%I",
        ]
        if exclusive:
            lines.append("#BSUB -x")
        if depends_on is not None:
            lines.append(f"#BSUB -w done({depends_on})")
        if extra_options:
            lines.append(f"#BSUB {extra_options}")
        return lines


DIALECTS = {d.name: d for d in (GridEngineDialect(), SlurmDialect(), LsfDialect())}


def get_dialect(name: str):
    try:
        return DIALECTS[name]
    except KeyError:
        raise WorkspaceError(
            f"unknown scheduler dialect {name!r}; known: {', '.join(sorted(DIALECTS))}"
        ) from None


def emit_submission_script(
    dialect_name: str,
    *,
    job_name: str,
    task_count: int,
    workspace: str,
    exclusive: bool = False,
    extra_options: str = "",
    depends_on: str | None = None,
    dispatch: str | None = None,
) -> str:
    """The array-job submission script, as text.

    Shebang, dialect directives, one dispatch line.  ``dispatch`` defaults
    to running the workspace run script indexed by the dialect's array
    task variable; the reducer passes an explicit command instead.
    """
    dialect = get_dialect(dialect_name)
    if dispatch is None:
        dispatch = f"{workspace}/{RUN_SCRIPT_PREFIX}{dialect.task_var}"
    lines = ["#!/bin/bash"]
    lines += dialect.directive_lines(
        job_name=job_name,
        task_count=task_count,
        workspace=workspace,
        exclusive=exclusive,
        extra_options=extra_options,
        depends_on=depends_on,
    )
    lines.append(dispatch)
    return "\n".join(lines) + "\n"


_RUN_PREAMBLE = ["#!/bin/bash", "export PATH=${PATH}:."]


def emit_run_script_siso(task: TaskPlan, mapper: str) -> str:
    """One mapper invocation per file: ``<mapper> <input> <output>``."""
    lines = list(_RUN_PREAMBLE)
    lines += [f"{mapper} {item.input_path} {item.output_path}" for item in task.items]
    return "\n".join(lines) + "\n"


def emit_run_script_mimo(task_index: int, mapper: str, workspace: str) -> str:
    """One mapper invocation per task: ``<mapper> <manifest>``."""
    lines = list(_RUN_PREAMBLE)
    lines.append(f"{mapper} {workspace}/{MANIFEST_PREFIX}{task_index}")
    return "\n".join(lines) + "\n"


def emit_manifest(task: TaskPlan) -> str:
    """Manifest consumed by a mimo mapper: ``<input> <output>`` per line,
    whitespace-delimited (which is why paths may not contain any)."""
    return "".join(f"{item.input_path} {item.output_path}\n" for item in task.items)


def emit_reducer_script(reducer: str, output_dir: str, redout: str) -> str:
    """Reducer run script: ``<reducer> <output dir> <redout filename>``."""
    lines = list(_RUN_PREAMBLE)
    lines.append(f"{reducer} {output_dir} {redout}")
    return "\n".join(lines) + "\n"


def create_workspace(base: str | Path, pid: int | None = None) -> Path:
    """Make the ``.MAPRED.<pid>`` directory; refuses to reuse an existing
    one (a stale workspace means a previous run is live or was kept)."""
    pid = os.getpid() if pid is None else pid
    workspace = Path(base) / f".MAPRED.{pid}"
    try:
        workspace.mkdir()
    except FileExistsError:
        raise WorkspaceError(f"workspace already exists: {workspace}") from None
    except OSError as exc:
        raise WorkspaceError(f"cannot create workspace {workspace}: {exc}") from exc
    return workspace


@dataclass(frozen=True)
class JobPlan:
    """A fully materialized, ready-to-submit workspace."""

    workspace: Path
    workdir: Path
    mode: str
    tasks: tuple[TaskPlan, ...]
    submission_script: Path
    run_scripts: tuple[Path, ...]
    manifests: tuple[Path, ...]
    reducer_script: Path | None
    job_name: str
    reducer_job_name: str | None
    exclusive: bool
    extra_options: str

    @property
    def task_count(self) -> int:
        return len(self.tasks)


def _write_executable(path: Path, text: str) -> None:
    path.write_text(text)
    path.chmod(0o755)


def materialize(config: LaunchConfig, tasks: list[TaskPlan], pid: int | None = None) -> JobPlan:
    """Write the whole workspace for a validated config and task plan.

    The local backend gets Grid Engine-style submission scripts too: it
    never reads the directives, but the artifact documents what would be
    submitted and can be carried to a real cluster as-is.
    """
    workdir = Path(config.workdir) if config.workdir else Path.cwd()
    workspace = create_workspace(workdir, pid)
    ws_rel = workspace.name
    dialect_name = config.backend if config.backend != "local" else "gridengine"

    run_scripts = []
    manifests = []
    for task in tasks:
        run_path = workspace / f"{RUN_SCRIPT_PREFIX}{task.index}"
        if config.apptype == "mimo":
            manifest_path = workspace / f"{MANIFEST_PREFIX}{task.index}"
            manifest_path.write_text(emit_manifest(task))
            manifests.append(manifest_path)
            _write_executable(
                run_path, emit_run_script_mimo(task.index, config.mapper, ws_rel)
            )
        else:
            _write_executable(run_path, emit_run_script_siso(task, config.mapper))
        run_scripts.append(run_path)

    job_name = os.path.basename(config.mapper)
    submission = workspace / job_name
    _write_executable(
        submission,
        emit_submission_script(
            dialect_name,
            job_name=job_name,
            task_count=len(tasks),
            workspace=ws_rel,
            exclusive=config.exclusive,
            extra_options=config.options,
        ),
    )

    reducer_script = None
    reducer_job_name = None
    if config.reducer:
        reducer_script = workspace / REDUCE_RUN_SCRIPT
        _write_executable(
            reducer_script,
            emit_reducer_script(config.reducer, config.output, config.redout),
        )
        reducer_job_name = f"{os.path.basename(config.reducer)}_reduce"

    return JobPlan(
        workspace=workspace,
        workdir=workdir,
        mode=config.apptype or "siso",
        tasks=tuple(tasks),
        submission_script=submission,
        run_scripts=tuple(run_scripts),
        manifests=tuple(manifests),
        reducer_script=reducer_script,
        job_name=job_name,
        reducer_job_name=reducer_job_name,
        exclusive=config.exclusive,
        extra_options=config.options,
    )
