"""Command-line interface.

``mrlaunch launch`` submits a map job (and optional dependent reduce);
``mrlaunch bench`` runs the startup-overhead sweep and writes the table
plus figures.  Boolean flags take explicit ``true``/``false`` values and
both ``--flag value`` and ``--flag=value`` spellings work.

Exit codes: 0 success (including emit-only runs), 2 usage or pipeline
errors, 3 one or more mapper tasks failed, 4 the reducer failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from .bench import CostModel, format_table, run_sweep
from .config import APP_TYPES, BACKENDS, DISTRIBUTIONS, LaunchConfig
from .errors import LauncherError
from .orchestrator import launch

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 2
EXIT_MAPPER_FAILED = 3
EXIT_REDUCER_FAILED = 4


def _boolean(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered == "true":
        return True
    if lowered == "false":
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return value


def _nonnegative_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {value}")
    return value


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one task count")
    return values


def _mode_list(text: str) -> tuple[str, ...]:
    values = tuple(part.strip() for part in text.split(",") if part.strip())
    if not values:
        raise argparse.ArgumentTypeError("expected at least one mode")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrlaunch",
        description="Run a mapper over a directory of files as an array job, "
        "with an optional reducer that fires after every task succeeds.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    lp = sub.add_parser("launch", help="submit a map (and optional reduce) job")
    job = lp.add_argument_group("job options")
    job.add_argument("--mapper", required=True,
                     help="mapper executable; siso call: '<mapper> <input> <output>'")
    job.add_argument("--input", required=True,
                     help="input directory, or a file listing one input path per line")
    job.add_argument("--output", required=True, help="directory for mapper outputs")
    job.add_argument("--reducer",
                     help="reducer executable; called as '<reducer> <output-dir> <redout>'")
    job.add_argument("--redout", default=None,
                     help="reducer output filename (default: llmapreduce.out)")
    job.add_argument("--np", type=_positive_int, default=None,
                     help="number of array tasks (capped at the file count)")
    job.add_argument("--ndata", type=_positive_int, default=None,
                     help="input files per array task; overrides --np")
    job.add_argument("--distribution", choices=DISTRIBUTIONS, default=None,
                     help="file-to-task assignment (default: block)")
    job.add_argument("--subdir", type=_boolean, default=False, metavar="true|false",
                     help="recurse into subdirectories, mirroring the tree under "
                          "the output directory (default: false)")
    job.add_argument("--ext", default=None,
                     help="output filename extension (default: out)")
    job.add_argument("--delimiter", default=None,
                     help="separator between input name and extension (default: .)")
    job.add_argument("--exclusive", type=_boolean, default=False, metavar="true|false",
                     help="request whole nodes from the scheduler (default: false)")
    job.add_argument("--keep", type=_boolean, default=False, metavar="true|false",
                     help="keep the .MAPRED.<pid> workspace after success (default: false)")
    job.add_argument("--apptype", choices=APP_TYPES, default=None,
                     help="mapper calling convention: one file per invocation (siso) "
                          "or one manifest per task (mimo); default siso")
    job.add_argument("--options", default="",
                     help="extra scheduler directives, passed through verbatim")
    ext = lp.add_argument_group("extensions")
    ext.add_argument("--backend", choices=BACKENDS, default="local",
                     help="'local' executes; scheduler names emit scripts only "
                          "(default: local)")
    ext.add_argument("--concurrency", type=_positive_int, default=None,
                     help="local backend: max mapper processes at once "
                          "(default: cpu count)")
    ext.add_argument("--workdir", default=None,
                     help="directory the run is rooted in (default: cwd)")
    ext.add_argument("--report", default=None, metavar="PATH",
                     help="also write a JSON run report to PATH")

    bp = sub.add_parser("bench", help="run the startup-overhead sweep")
    bp.add_argument("--startup", type=_positive_float, default=0.2,
                    help="stand-in mapper startup latency, seconds (default: 0.2)")
    bp.add_argument("--work", type=_nonnegative_float, default=0.02,
                    help="per-file work time, seconds (default: 0.02)")
    bp.add_argument("--files", type=_positive_int, default=128,
                    help="synthetic corpus size (default: 128)")
    bp.add_argument("--tasks", type=_int_list, default=(1, 2, 4, 8, 16, 32, 64, 128),
                    metavar="N,N,...", help="task counts to sweep (default: powers of two to 128)")
    bp.add_argument("--modes", type=_mode_list, default=("default", "block", "mimo"),
                    metavar="M,M,...", help="styles to sweep (default: default,block,mimo)")
    bp.add_argument("--payload-bytes", type=_positive_int, default=1024,
                    help="bytes per synthetic input file (default: 1024)")
    bp.add_argument("--repeats", type=_positive_int, default=1,
                    help="launches per sweep point, reduced by median (default: 1)")
    bp.add_argument("--out", default=None, metavar="PATH",
                    help="write the sweep table (TSV) to PATH; stdout always gets a copy")
    bp.add_argument("--figures", type=_boolean, default=True, metavar="true|false",
                    help="render overhead/speedup figures next to --out (default: true)")
    bp.add_argument("--workdir", default=None,
                    help="scratch directory (default: a fresh temp dir)")
    return parser


@dataclass(frozen=True)
class CliInvocation:
    """A parsed command line, in canonical form."""

    subcommand: str
    flags: dict

    def to_argv(self) -> list[str]:
        """Render back to an argv that re-parses to an equal invocation."""
        argv = [self.subcommand]
        for dest, value in self.flags.items():
            if value is None:
                continue
            flag = "--" + dest.replace("_", "-")
            if isinstance(value, bool):
                rendered = "true" if value else "false"
            elif isinstance(value, tuple):
                rendered = ",".join(str(v) for v in value)
            else:
                rendered = str(value)
            argv.extend([flag, rendered])
        return argv


def _merge_passthrough(argv: list[str]) -> list[str]:
    # argparse rejects option values that look like flags, and scheduler
    # directives nearly always do ("--options -l gpu=1"); fold the value
    # into --options=... form so both CLI spellings work.
    merged = []
    tokens = iter(argv)
    for token in tokens:
        if token == "--options":
            value = next(tokens, None)
            if value is None:
                merged.append(token)  # argparse reports the missing value
            else:
                merged.append(f"--options={value}")
        else:
            merged.append(token)
    return merged


def parse_args(argv: list[str] | None = None) -> CliInvocation:
    if argv is None:
        argv = sys.argv[1:]
    namespace = build_parser().parse_args(_merge_passthrough(list(argv)))
    flags = vars(namespace)
    subcommand = flags.pop("subcommand")
    return CliInvocation(subcommand, flags)


def _run_launch(inv: CliInvocation) -> int:
    flags = dict(inv.flags)
    report_path = flags.pop("report", None)
    config = LaunchConfig(**flags)
    try:
        report = launch(config)
    except LauncherError as exc:
        print(f"mrlaunch: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for line in report.summary_lines():
        print(line)
    if report_path:
        path = Path(report_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
        print(f"report written to {report_path}")
    if not report.executed:
        return EXIT_OK
    if report.failed_tasks:
        return EXIT_MAPPER_FAILED
    if report.reducer_job is not None and (report.reducer_skipped or report.reducer_failed):
        return EXIT_REDUCER_FAILED
    return EXIT_OK


def _run_bench(inv: CliInvocation) -> int:
    flags = inv.flags
    model = CostModel(
        startup_s=flags["startup"],
        work_w=flags["work"],
        files=flags["files"],
        task_counts=tuple(flags["tasks"]),
        modes=tuple(flags["modes"]),
        payload_bytes=flags["payload_bytes"],
        repeats=flags["repeats"],
    )
    try:
        measurements = run_sweep(model, workdir=flags.get("workdir"))
    except LauncherError as exc:
        print(f"mrlaunch: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    table = format_table(measurements)
    print(table, end="")
    out = flags.get("out")
    if out:
        out_path = Path(out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(table)
        print(f"table written to {out_path}", file=sys.stderr)
        if flags.get("figures", True):
            # Imported lazily: pulling in matplotlib costs more than the
            # rest of the CLI put together, and table-only runs skip it.
            from .figures import save_overhead_figure, save_speedup_figure

            base = out_path.parent
            overhead_png = save_overhead_figure(measurements, base / "overhead.png")
            speedup_png = save_speedup_figure(measurements, base / "speedup.png")
            print(f"figures written to {overhead_png} and {speedup_png}", file=sys.stderr)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    inv = parse_args(argv)
    if inv.subcommand == "launch":
        return _run_launch(inv)
    return _run_bench(inv)


if __name__ == "__main__":
    sys.exit(main())
