"""Launch options and their validation.

A ``LaunchConfig`` mirrors the command line one-to-one.  Optional fields
default to ``None`` so that :func:`validate` can tell "unset" apart from
an explicit value; after validation every field the pipeline reads has a
concrete value.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, replace

from .errors import ConfigError

log = logging.getLogger(__name__)

DISTRIBUTIONS = ("block", "cyclic")
APP_TYPES = ("siso", "mimo")
BACKENDS = ("local", "gridengine", "slurm", "lsf")

DEFAULT_DISTRIBUTION = "block"
DEFAULT_APP_TYPE = "siso"
DEFAULT_EXT = "out"
DEFAULT_DELIMITER = "."
DEFAULT_REDOUT = "llmapreduce.out"

# Most schedulers refuse array jobs past a site-configured limit; this cap
# mirrors a common production ceiling and exists so a huge input directory
# fails fast with advice instead of being bounced by the queue.
DEFAULT_MAX_ARRAY_TASKS = 75000


@dataclass(frozen=True)
class LaunchConfig:
    """Everything a launch needs, as the user spelled it.

    Core options (same names as the CLI flags):

    mapper        executable run over the inputs; for ``siso`` it is called
                  as ``<mapper> <input> <output>`` once per file, for
                  ``mimo`` as ``<mapper> <manifest>`` once per task
    input         directory to scan, or a file listing one input per line
    output        directory the mapper outputs are written under
    reducer       optional executable called ``<reducer> <output> <redout>``
                  after all mapper tasks succeed
    redout        reducer output filename (default ``llmapreduce.out``)
    np            number of array tasks (capped at the file count)
    ndata         files per task; takes precedence over ``np``
    distribution  ``block`` (contiguous runs) or ``cyclic`` (round-robin)
    subdir        recurse into subdirectories, mirroring the tree
    ext           output filename extension (default ``out``)
    delimiter     separator before the extension (default ``.``)
    exclusive     ask the scheduler for whole nodes
    keep          keep the workspace after a successful run
    apptype       ``siso`` or ``mimo``
    options       extra scheduler directives, passed through verbatim

    Extensions (not part of the classic option set):

    backend          ``local`` executes; scheduler names emit scripts only
    max_array_tasks  refuse plans needing more array tasks than this
    concurrency      local backend: max mapper processes at once
    workdir          directory the run is rooted in (default: cwd)
    """

    mapper: str | None = None
    input: str | None = None
    output: str | None = None
    reducer: str | None = None
    redout: str | None = None
    np: int | None = None
    ndata: int | None = None
    distribution: str | None = None
    subdir: bool = False
    ext: str | None = None
    delimiter: str | None = None
    exclusive: bool = False
    keep: bool = False
    apptype: str | None = None
    options: str = ""
    backend: str = "local"
    max_array_tasks: int = DEFAULT_MAX_ARRAY_TASKS
    concurrency: int | None = None
    workdir: str | None = None


def _require(value: str | None, name: str) -> str:
    if not value:
        raise ConfigError(f"{name} is required")
    return value


def _no_whitespace(value: str, name: str) -> str:
    # Run scripts and manifests are whitespace-delimited; a path with a
    # space in it would silently split into two fields.
    if any(ch.isspace() for ch in value):
        raise ConfigError(f"{name} must not contain whitespace: {value!r}")
    return value


def _positive(value: int | None, name: str) -> int | None:
    if value is not None and value < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value}")
    return value


def validate(config: LaunchConfig) -> LaunchConfig:
    """Check a config and fill defaults; returns the normalized copy.

    Never changes a value the user set, with one documented exception:
    when both ``ndata`` and ``np`` are given, ``np`` is dropped (with a
    warning) because the two prescribe the task count in different ways
    and ``ndata`` wins.  Validation is idempotent: validating the result
    again returns an equal config and warns about nothing.
    """
    mapper = _no_whitespace(_require(config.mapper, "mapper"), "mapper")
    input_src = _no_whitespace(_require(config.input, "input"), "input")
    output = _no_whitespace(_require(config.output, "output"), "output")

    np = _positive(config.np, "np")
    ndata = _positive(config.ndata, "ndata")
    if np is not None and ndata is not None:
        log.warning("both --np and --ndata given; --ndata wins, ignoring np=%d", np)
        np = None
    _positive(config.max_array_tasks, "max_array_tasks")
    _positive(config.concurrency, "concurrency")

    distribution = config.distribution or DEFAULT_DISTRIBUTION
    if distribution not in DISTRIBUTIONS:
        raise ConfigError(
            f"distribution must be one of {'/'.join(DISTRIBUTIONS)}, got {distribution!r}"
        )
    apptype = config.apptype or DEFAULT_APP_TYPE
    if apptype not in APP_TYPES:
        raise ConfigError(f"apptype must be one of {'/'.join(APP_TYPES)}, got {apptype!r}")
    if config.backend not in BACKENDS:
        raise ConfigError(f"backend must be one of {'/'.join(BACKENDS)}, got {config.backend!r}")

    ext = config.ext if config.ext is not None else DEFAULT_EXT
    delimiter = config.delimiter if config.delimiter is not None else DEFAULT_DELIMITER
    for name, value in (("ext", ext), ("delimiter", delimiter)):
        if not value:
            raise ConfigError(f"{name} must not be empty")
        _no_whitespace(value, name)
        if "/" in value:
            raise ConfigError(f"{name} must not contain '/': {value!r}")

    reducer = config.reducer
    if reducer is not None:
        _no_whitespace(reducer, "reducer")
    redout = config.redout if config.redout is not None else DEFAULT_REDOUT
    _no_whitespace(redout, "redout")
    if "/" in redout:
        raise ConfigError(f"redout must be a bare filename, got {redout!r}")

    workdir = config.workdir or os.getcwd()
    if not os.path.isdir(workdir):
        raise ConfigError(f"workdir is not a directory: {workdir}")

    source = input_src if os.path.isabs(input_src) else os.path.join(workdir, input_src)
    if not os.path.exists(source):
        raise ConfigError(f"input directory or list file not found: {input_src}")

    return replace(
        config,
        mapper=mapper,
        input=input_src,
        output=output,
        np=np,
        ndata=ndata,
        distribution=distribution,
        apptype=apptype,
        ext=ext,
        delimiter=delimiter,
        redout=redout,
        workdir=workdir,
    )
