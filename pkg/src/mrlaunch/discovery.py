"""Input enumeration and output-path planning.

Inputs come either from a directory scan or from a list file naming one
input per line.  Each input is paired with the output path the mapper is
expected to write: ``<output>/<name><delimiter><ext>``, where ``<name>``
is the input's path relative to the input directory when ``subdir`` is
on, and just its basename otherwise.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .errors import DiscoveryError


@dataclass(frozen=True)
class WorkItem:
    """One unit of mapper work: an input file and its planned output."""

    input_path: str
    output_path: str


def _check_no_whitespace(path: str) -> str:
    if any(ch.isspace() for ch in path):
        raise DiscoveryError(f"input path contains whitespace: {path!r}")
    return path


def discover_inputs(source: str, subdir: bool = False, base: str | None = None) -> list[str]:
    """Enumerate input files for a launch.

    ``source`` names either a directory or a list file; relative paths
    are resolved against ``base`` (default: cwd), but the returned paths
    keep the user's spelling so generated scripts stay relocatable.

    Directory: immediate regular files, or the whole tree when ``subdir``
    is true, sorted by path; names starting with ``.`` are skipped, and
    with ``subdir`` whole dot-directories are pruned.  List file: one
    path per line, in file order, blank lines ignored; every listed path
    must exist.  ``subdir`` has no effect on list files.
    """
    base_path = Path(base) if base else Path.cwd()
    anchor = Path(source) if os.path.isabs(source) else base_path / source

    if anchor.is_dir():
        found = _scan_directory(source, anchor, subdir)
        if not found:
            raise DiscoveryError(f"no input files found in {source}")
    elif anchor.is_file():
        found = _read_list_file(anchor, base_path)
        if not found:
            raise DiscoveryError(f"input list file is empty: {source}")
    else:
        raise DiscoveryError(f"input is neither a directory nor a file: {source}")

    for path in found:
        _check_no_whitespace(path)
    return found


def _scan_directory(source: str, anchor: Path, subdir: bool) -> list[str]:
    if not subdir:
        names = sorted(
            entry.name
            for entry in anchor.iterdir()
            if entry.is_file() and not entry.name.startswith(".")
        )
        return [os.path.join(source, name) for name in names]

    rels = []
    for dirpath, dirnames, filenames in os.walk(anchor):
        dirnames[:] = sorted(d for d in dirnames if not d.startswith("."))
        rel_dir = os.path.relpath(dirpath, anchor)
        for name in filenames:
            if name.startswith("."):
                continue
            rels.append(name if rel_dir == "." else os.path.join(rel_dir, name))
    return [os.path.join(source, rel) for rel in sorted(rels)]


def _read_list_file(anchor: Path, base: Path) -> list[str]:
    found = []
    for raw in anchor.read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        _check_no_whitespace(line)
        target = Path(line) if os.path.isabs(line) else base / line
        if not target.is_file():
            raise DiscoveryError(f"listed input does not exist: {line}")
        found.append(line)
    return found


def map_output_path(
    input_path: str,
    input_root: str,
    output_root: str,
    subdir: bool,
    delimiter: str,
    ext: str,
) -> str:
    """Plan the output path for one input file.

    With ``subdir`` the input's position relative to ``input_root`` is
    mirrored under ``output_root``; otherwise only the basename is used.
    """
    if subdir:
        rel = os.path.relpath(input_path, input_root)
        if rel.startswith(".."):
            rel = os.path.basename(input_path)
    else:
        rel = os.path.basename(input_path)
    return os.path.join(output_root, rel + delimiter + ext)


def build_work_items(
    inputs: list[str],
    input_root: str,
    output_root: str,
    subdir: bool,
    delimiter: str,
    ext: str,
) -> list[WorkItem]:
    """Pair every input with its output path, preserving input order.

    Two inputs that would collide on the same output path (same basename
    listed twice, say) are rejected rather than silently overwritten.
    """
    items = []
    seen: dict[str, str] = {}
    for input_path in inputs:
        output_path = map_output_path(
            input_path, input_root, output_root, subdir, delimiter, ext
        )
        if output_path in seen:
            raise DiscoveryError(
                f"inputs {seen[output_path]!r} and {input_path!r} both map to "
                f"output {output_path!r}; rename one or use --subdir"
            )
        seen[output_path] = input_path
        items.append(WorkItem(input_path, output_path))
    return items


def mirror_output_tree(items: list[WorkItem], base: str | None = None) -> set[str]:
    """Create every directory the planned outputs need; returns the set
    of directories that did not exist before the call."""
    base_path = Path(base) if base else Path.cwd()
    created: set[str] = set()
    for item in items:
        parent = os.path.dirname(item.output_path)
        if not parent:
            continue
        target = Path(parent) if os.path.isabs(parent) else base_path / parent
        missing = []
        probe = target
        while not probe.exists():
            missing.append(probe)
            if probe.parent == probe:
                break
            probe = probe.parent
        target.mkdir(parents=True, exist_ok=True)
        created.update(str(p) for p in missing)
    return created
