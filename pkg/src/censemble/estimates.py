"""Streaming Monte-Carlo estimates with deterministic chunked parallelism.

Every run is split into fixed-size chunks, each drawing from its own child
of ``SeedSequence(seed)``. Chunks may finish in any order on the worker
threads but are merged in chunk order, so a run is bit-identical for a given
seed regardless of the thread count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np
import numpy.typing as npt
import structlog

from censemble.config import DEFAULT_SETTINGS
from censemble.config_validator import resolve_threads
from censemble.errors import InvalidInputError

log = structlog.get_logger()

Sampler = Callable[[np.random.Generator, int], npt.NDArray]


@dataclass(frozen=True)
class EnsembleEstimate:
    """Sample mean with its standard error, sample count and master seed."""

    mean: complex | float
    stderr: float
    n: int
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.n < 1 or self.stderr < 0:
            raise InvalidInputError("an estimate needs n ≥ 1 and a non-negative standard error")

    def to_dict(self) -> dict[str, Any]:
        mean = complex(self.mean)
        row: dict[str, Any] = {"mean": mean.real, "stderr": self.stderr, "n": self.n, "seed": self.seed}
        if isinstance(self.mean, complex):
            row["mean_imag"] = mean.imag
        return row

    def z_score(self, reference: complex | float) -> float:
        """|mean − reference| in units of the standard error."""
        gap = abs(complex(self.mean) - complex(reference))
        if self.stderr == 0:
            return 0.0 if gap == 0 else float("inf")
        return gap / self.stderr

    def agrees_with(self, reference: complex | float, sigmas: float = 5.0) -> bool:
        return self.z_score(reference) <= sigmas


class RunningMoments:
    """Welford accumulator over arrays of a fixed shape, mergeable with Chan's update.

    For complex data the spread is E|x − mean|², so the standard error covers
    both components together.
    """

    def __init__(self) -> None:
        self.n = 0
        self.mean: npt.NDArray | None = None
        self.m2: npt.NDArray[np.float64] | None = None

    def update(self, batch: npt.ArrayLike) -> None:
        """Fold in a stack of samples along axis 0."""
        values = np.asarray(batch)
        if values.shape[0] == 0:
            return
        count = values.shape[0]
        mean = values.mean(axis=0)
        m2 = np.sum(np.abs(values - mean) ** 2, axis=0)
        self._combine(count, mean, m2)

    def merge(self, other: RunningMoments) -> None:
        if other.n == 0:
            return
        self._combine(other.n, other.mean, other.m2)

    def _combine(self, count: int, mean: npt.NDArray, m2: npt.NDArray[np.float64]) -> None:
        if self.n == 0:
            self.n, self.mean, self.m2 = count, np.array(mean), np.array(m2, dtype=np.float64)
            return
        total = self.n + count
        delta = mean - self.mean
        self.mean = self.mean + delta * (count / total)
        self.m2 = self.m2 + m2 + np.abs(delta) ** 2 * (self.n * count / total)
        self.n = total

    @property
    def variance(self) -> npt.NDArray[np.float64]:
        if self.n < 2:
            raise InvalidInputError("the sample variance needs at least two samples")
        return self.m2 / (self.n - 1)

    @property
    def stderr(self) -> npt.NDArray[np.float64]:
        return np.sqrt(self.variance / self.n)

    def estimate(self, seed: int | None = None) -> EnsembleEstimate:
        """Scalar estimate; only valid when the accumulated samples are scalars."""
        if self.mean is None or np.ndim(self.mean) != 0:
            raise InvalidInputError("estimate() needs scalar samples; use mean/stderr for arrays")
        mean = complex(self.mean)
        value: complex | float = mean.real if np.isrealobj(self.mean) else mean
        return EnsembleEstimate(mean=value, stderr=float(self.stderr), n=self.n, seed=seed)


def chunk_sizes(n_samples: int, chunk_size: int) -> list[int]:
    if n_samples < 1 or chunk_size < 1:
        raise InvalidInputError("sample count and chunk size must be positive")
    full, rest = divmod(n_samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def run_chunked(
    sampler: Sampler,
    n_samples: int,
    seed: int,
    *,
    chunk_size: int = DEFAULT_SETTINGS.monte_carlo.chunk_size,
    threads: int | None = None,
) -> RunningMoments:
    """Evaluate ``sampler(rng, n)`` over independent chunks and merge in chunk order.

    The sampler returns an array whose first axis has length ``n``.
    """
    sizes = chunk_sizes(n_samples, chunk_size)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    workers = min(resolve_threads(threads), len(sizes))

    def _chunk(index: int) -> RunningMoments:
        rng = np.random.default_rng(children[index])
        values = np.asarray(sampler(rng, sizes[index]))
        if values.shape[0] != sizes[index]:
            raise InvalidInputError(
                f"sampler returned {values.shape[0]} samples for a chunk of {sizes[index]}"
            )
        moments = RunningMoments()
        moments.update(values)
        return moments

    total = RunningMoments()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for index, part in enumerate(pool.map(_chunk, range(len(sizes)))):
            total.merge(part)
            log.debug("mc.chunk_merged", chunk=index, samples=total.n)
    log.info("mc.finished", samples=total.n, chunks=len(sizes), threads=workers, seed=seed)
    return total


def estimate(
    sampler: Sampler,
    n_samples: int,
    seed: int,
    *,
    chunk_size: int = DEFAULT_SETTINGS.monte_carlo.chunk_size,
    threads: int | None = None,
) -> EnsembleEstimate:
    """Scalar Monte-Carlo estimate of a sampler returning shape ``(n,)``."""
    return run_chunked(sampler, n_samples, seed, chunk_size=chunk_size, threads=threads).estimate(seed)
