"""Exception types raised by the launcher."""


class LauncherError(Exception):
    """Base class for every failure this package raises on purpose."""


class ConfigError(LauncherError):
    """Invalid or inconsistent launch options."""


class DiscoveryError(LauncherError):
    """Input enumeration or output planning failed."""


class PartitionError(LauncherError):
    """Task count or work assignment is impossible as requested."""


class WorkspaceError(LauncherError):
    """Workspace or script generation failed."""


class BackendError(LauncherError):
    """A backend rejected a job or cannot perform the requested operation."""


class BenchError(LauncherError):
    """The benchmark harness could not produce a usable measurement."""


class LaunchStageError(LauncherError):
    """A launch pipeline stage failed; carries the stage name.

    The workspace (if one was created) is left on disk for inspection.
    """

    def __init__(self, stage: str, error: BaseException):
        super().__init__(f"launch failed during {stage}: {error}")
        self.stage = stage
        self.error = error
