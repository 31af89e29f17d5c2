from __future__ import annotations

import math
import os
import time
from contextlib import contextmanager
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from collections.abc import Generator
    from collections.abc import Sequence
    from logging import Logger

    from numpy.typing import ArrayLike
    from numpy.typing import NDArray

#: Block length for the compensated running sums.
_BLOCK = 1024

#: Environment variable holding the worker count for parallel runs.
THREADS_ENV = "MEANEQUI_THREADS"


@contextmanager
def log_timing(logger: Logger, message: str) -> Generator[None]:
    """Log the time the wrapped block took.

    Args:
        logger: The logger to use.
        message: The message to log this with.
    """
    before = time.time()
    try:
        yield
    finally:
        elapsed = time.time() - before
        elapsed_ms = elapsed * 1000
        logger.info("%7.3fms - %s", elapsed_ms, message)


def running_sums(values: ArrayLike) -> NDArray[np.float64]:
    """Prefix sums with a leading zero, accumulated with compensation.

    Inside a block of 1024 terms plain ``np.cumsum`` is used, the block
    totals are carried with Neumaier summation. The error of every partial
    sum stays within a few block-lengths of machine epsilon times the
    magnitude of the terms, independent of the number of terms.

    Args:
        values: One-dimensional array of terms.

    Returns:
        Array ``s`` of length ``len(values) + 1`` with ``s[k]`` the sum of
        the first ``k`` terms.
    """
    terms = np.asarray(values, dtype=np.float64)
    count = terms.shape[0]
    out = np.zeros(count + 1, dtype=np.float64)
    if count == 0:
        return out
    padded = np.zeros(-(-count // _BLOCK) * _BLOCK, dtype=np.float64)
    padded[:count] = terms
    blocks = padded.reshape(-1, _BLOCK)
    inner = np.cumsum(blocks, axis=1)
    offsets = np.empty(blocks.shape[0], dtype=np.float64)
    total = 0.0
    compensation = 0.0
    for index, block_total in enumerate(inner[:, -1].tolist()):
        offsets[index] = total + compensation
        new_total = total + block_total
        if abs(total) >= abs(block_total):
            compensation += (total - new_total) + block_total
        else:
            compensation += (block_total - new_total) + total
        total = new_total
    out[1:] = (inner + offsets[:, np.newaxis]).ravel()[:count]
    return out


def exact_mean(values: ArrayLike) -> float:
    """Correctly rounded mean of the given terms."""
    terms = np.asarray(values, dtype=np.float64)
    return math.fsum(terms.tolist()) / terms.shape[0]


def geometric_schedule(horizon: int, ratio: float = 1.5) -> list[int]:
    """The schedule ``ceil(ratio**k)`` up to (and always including) horizon."""
    if horizon < 1:
        return []
    schedule: list[int] = []
    value = 1.0
    while math.ceil(value) < horizon:
        point = math.ceil(value)
        if not schedule or point > schedule[-1]:
            schedule.append(point)
        value *= ratio
    schedule.append(horizon)
    return schedule


def dyadic_lengths(upper: int) -> list[int]:
    """Powers of two up to ``upper`` (at least ``[1]``)."""
    lengths = [1]
    while lengths[-1] * 2 <= upper:
        lengths.append(lengths[-1] * 2)
    return lengths


def tail_half(values: Sequence[float]) -> list[float]:
    """The final 50% of a schedule of values (never empty for input)."""
    return list(values[len(values) // 2 :])


def derive_rng(*keys: int) -> np.random.Generator:
    """A generator that depends only on the given integer keys."""
    return np.random.default_rng([abs(int(k)) for k in keys])


def worker_count() -> int:
    """Number of worker threads, from the environment (default 1)."""
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
