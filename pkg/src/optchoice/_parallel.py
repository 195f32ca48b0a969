from __future__ import annotations

import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from .errors import InvalidArgumentError

T = TypeVar("T")
R = TypeVar("R")

WORKERS_ENV = "OPTCHOICE_WORKERS"


def worker_count(explicit: int | None = None) -> int:
    """Parallelism level: ``explicit`` if given, else $OPTCHOICE_WORKERS, else 1."""
    if explicit is not None:
        n = explicit
    else:
        raw = os.environ.get(WORKERS_ENV, "").strip()
        if not raw:
            return 1
        try:
            n = int(raw)
        except ValueError as e:
            raise InvalidArgumentError(f"{WORKERS_ENV} must be an integer >= 1, got {raw!r}") from e
    if n < 1:
        raise InvalidArgumentError(f"parallelism must be >= 1, got {n}")
    return n


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """``[fn(x) for x in items]``, optionally on a thread pool; results keep input order."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
