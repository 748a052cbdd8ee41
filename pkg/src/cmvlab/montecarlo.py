"""Sample-parallel execution and the small statistics shared by the experiments.

Samples are processed in fixed-size chunks of consecutive sample indices.  The
chunk boundaries do not depend on the number of threads and results are
concatenated in chunk order, so outputs are identical for any ``threads``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.stats

from .errors import ParameterError

__all__ = ["CHUNK", "map_chunks", "wilson_interval", "LogLinearFit", "log_linear_fit", "Proportion", "proportion"]

CHUNK = 64


def map_chunks(fn, n_samples: int, threads: int = 1, chunk: int = CHUNK, start: int = 0) -> np.ndarray:
    """Concatenate ``fn(indices)`` over consecutive chunks of sample indices.

    ``fn`` receives an int array of sample indices and returns an array whose
    first axis matches it.  Worker threads only change wall time.
    """
    if n_samples < 0:
        raise ParameterError("sample count must be nonnegative")
    if threads < 1:
        raise ParameterError("threads must be >= 1")
    chunks = [np.arange(i, min(i + chunk, n_samples)) + start for i in range(0, n_samples, chunk)]
    if not chunks:
        return np.empty(0)
    if threads == 1 or len(chunks) == 1:
        parts = [fn(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(fn, chunks))
    return np.concatenate(parts, axis=0)


def wilson_interval(successes: int, trials: int, confidence: float = 0.95):
    """Wilson score interval for a binomial proportion; (0, 1) when there are no trials."""
    if trials == 0:
        return 0.0, 1.0
    ci = scipy.stats.binomtest(int(successes), int(trials)).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class Proportion:
    count: int
    total: int
    value: float
    ci_lo: float
    ci_hi: float


def proportion(flags) -> Proportion:
    flags = np.asarray(flags, dtype=bool)
    k, n = int(flags.sum()), int(flags.size)
    lo, hi = wilson_interval(k, n)
    return Proportion(k, n, k / n if n else float("nan"), lo, hi)


@dataclass(frozen=True)
class LogLinearFit:
    """``log y = intercept + slope * x``; ``slope_ci`` is a 95% t-interval."""

    slope: float
    intercept: float
    r2: float
    slope_stderr: float
    slope_ci: tuple
    points: int


def log_linear_fit(x, y, confidence: float = 0.95) -> LogLinearFit:
    """Least-squares line through ``(x, log y)``; nonpositive ``y`` are dropped."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.isfinite(y) & (y > 0)
    x, ly = x[keep], np.log(y[keep])
    if x.size < 2 or np.ptp(x) == 0:
        return LogLinearFit(float("nan"), float("nan"), float("nan"), float("nan"), (float("nan"),) * 2, int(x.size))
    res = scipy.stats.linregress(x, ly)
    if x.size > 2:
        t = scipy.stats.t.ppf(0.5 + confidence / 2, x.size - 2)
        ci = (res.slope - t * res.stderr, res.slope + t * res.stderr)
    else:
        ci = (float("nan"), float("nan"))
    return LogLinearFit(float(res.slope), float(res.intercept), float(res.rvalue**2),
                        float(res.stderr), tuple(float(c) for c in ci), int(x.size))
