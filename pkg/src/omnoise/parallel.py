"""Worker-count resolution and an order-preserving process-pool map."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

from .errors import InvalidParameterError


def resolve_jobs(jobs: int | None = None) -> int:
    """Worker count: explicit value, else $OMNOISE_JOBS, else the CPU count."""
    if jobs is None:
        env = os.environ.get("OMNOISE_JOBS", "").strip()
        if env:
            try:
                jobs = int(env)
            except ValueError as exc:
                raise InvalidParameterError(f"OMNOISE_JOBS must be an integer, got {env!r}") from exc
        else:
            jobs = os.cpu_count() or 1
    if jobs < 1:
        raise InvalidParameterError("jobs must be >= 1")
    return jobs


def ordered_map(fn, tasks: list, jobs: int | None = 1) -> list:
    """``[fn(t) for t in tasks]``, fanned out to worker processes when jobs > 1."""
    n = resolve_jobs(jobs)
    if n == 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * n))))
