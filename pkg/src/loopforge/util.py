"""Small shared helpers."""

from __future__ import annotations

import os

THREADS_ENV = "LOOPFORGE_THREADS"


def worker_count() -> int:
    """Worker cap from the LOOPFORGE_THREADS environment variable.

    Defaults to 1 (sequential); values are clamped to [1, 64].  Results of
    parallel verifiers are reduced deterministically, so the count never
    changes any reported witness or verdict.
    """
    raw = os.environ.get(THREADS_ENV, "")
    try:
        k = int(raw)
    except ValueError:
        return 1
    return max(1, min(k, 64))


def spaced_indices(size: int, count: int):
    """Up to `count` evenly spaced indices of range(size); deterministic."""
    if size <= count:
        return list(range(size))
    step = size / count
    return sorted({int(i * step) for i in range(count)})
