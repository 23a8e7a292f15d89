"""Task-count resolution and assignment of files to array tasks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, TypeVar

from .errors import PartitionError

T = TypeVar("T")


@dataclass(frozen=True)
class TaskPlan:
    """The ordered slice of work one array task runs.  ``index`` is the
    1-based array task id the scheduler will hand the task."""

    index: int
    items: tuple


def resolve_task_count(
    file_count: int,
    np: int | None = None,
    ndata: int | None = None,
    max_array_tasks: int = 75000,
) -> int:
    """How many array tasks a launch gets.

    ``ndata`` (files per task) wins when set: ceil(F / ndata) tasks.
    Otherwise ``np`` tasks, silently capped at the file count so no task
    sits idle.  With neither, one task per file.
    """
    if file_count < 1:
        raise PartitionError("no input files to assign")
    if ndata is not None:
        if ndata < 1:
            raise PartitionError(f"ndata must be positive, got {ndata}")
        count = math.ceil(file_count / ndata)
    elif np is not None:
        if np < 1:
            raise PartitionError(f"np must be positive, got {np}")
        count = min(np, file_count)
    else:
        count = file_count
    if count > max_array_tasks:
        raise PartitionError(
            f"plan needs {count} array tasks but the cap is {max_array_tasks}; "
            f"use --np or --ndata to pack more files per task"
        )
    return count


def _check_task_count(n_items: int, task_count: int) -> None:
    if task_count < 1 or task_count > n_items:
        raise PartitionError(
            f"task count must be between 1 and the number of items "
            f"({n_items}), got {task_count}"
        )


def assign_block(items: Sequence[T], task_count: int) -> list[TaskPlan]:
    """Contiguous runs; sizes differ by at most one, larger runs first.

    Task i gets floor(F/T) items, plus one extra for the first F mod T
    tasks.  Every item lands in exactly one task and order is preserved.
    """
    _check_task_count(len(items), task_count)
    base, extra = divmod(len(items), task_count)
    plans = []
    pos = 0
    for index in range(1, task_count + 1):
        size = base + (1 if index <= extra else 0)
        plans.append(TaskPlan(index, tuple(items[pos : pos + size])))
        pos += size
    return plans


def assign_cyclic(items: Sequence[T], task_count: int) -> list[TaskPlan]:
    """Round-robin: item j (0-based) goes to task (j mod T) + 1."""
    _check_task_count(len(items), task_count)
    return [
        TaskPlan(index, tuple(items[index - 1 :: task_count]))
        for index in range(1, task_count + 1)
    ]
