"""Map-reduce array-job launcher.

Turns a directory of input files plus a mapper executable (and optionally
a reducer) into an array job: inputs are split across N tasks, each task
runs the mapper over its share, and the reducer runs once after every
mapper task has finished.  Jobs either execute locally or are emitted as
ready-to-submit scheduler scripts (Grid Engine, SLURM, LSF dialects).
"""

from .config import LaunchConfig, validate
from .errors import (
    BackendError,
    BenchError,
    ConfigError,
    DiscoveryError,
    LauncherError,
    LaunchStageError,
    PartitionError,
    WorkspaceError,
)
from .orchestrator import RunReport, cleanup, launch

__version__ = "0.1.0"

__all__ = [
    "LaunchConfig",
    "validate",
    "launch",
    "cleanup",
    "RunReport",
    "LauncherError",
    "ConfigError",
    "DiscoveryError",
    "PartitionError",
    "WorkspaceError",
    "BackendError",
    "BenchError",
    "LaunchStageError",
    "__version__",
]
