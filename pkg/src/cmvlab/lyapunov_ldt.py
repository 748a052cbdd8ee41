"""Monte Carlo Lyapunov exponents, large-deviation tails and bad-set statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .determinants import log_abs_normalized
from .errors import ParameterError
from .model import Distribution, VerblunskyField, sample_batch
from .montecarlo import map_chunks, proportion
from .transfer import log_norm_batch

__all__ = [
    "LyapunovEstimate",
    "lyapunov_estimate",
    "cached_lyapunov",
    "LDT_DECORATIONS",
    "LdtTail",
    "ldt_samples",
    "ldt_tail",
    "bad_set_member",
    "BadSetStats",
    "bad_set_stats",
    "craig_simon_check",
    "CraigSimonRow",
    "craig_simon_experiment",
]

# decoration name -> (beta, gamma); None keeps the random coefficient
LDT_DECORATIONS = {"left": (-1.0, None), "right": (None, 1.0), "both": (-1.0, 1.0)}


@dataclass(frozen=True)
class LyapunovEstimate:
    z: complex
    n: int
    samples: int
    gamma_hat: float
    std_err: float

    @property
    def possibly_exceptional(self) -> bool:
        """Small-gamma heuristic: the estimate is within 5 standard errors of 0."""
        return self.gamma_hat < 5 * self.std_err


def _gamma_value(gamma_ref) -> float:
    if gamma_ref is None:
        raise ParameterError("a reference Lyapunov exponent (gamma_ref) is required")
    return float(gamma_ref.gamma_hat if isinstance(gamma_ref, LyapunovEstimate) else gamma_ref)


def lyapunov_estimate(dist: Distribution, z, n: int = 10_000, samples: int = 200, seed: int = 0,
                      threads: int = 1) -> LyapunovEstimate:
    """Mean and standard error of ``(1/n) log ||T_[0,n-1]||`` over independent fields."""
    if n < 1 or samples < 1:
        raise ParameterError("lyapunov_estimate needs n >= 1 and samples >= 1")
    z = complex(z)

    def work(idx):
        return log_norm_batch(sample_batch(dist, 0, n - 1, seed, idx), z) / n

    vals = map_chunks(work, samples, threads)
    se = float(np.std(vals, ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return LyapunovEstimate(z, n, samples, float(np.mean(vals)), se)


@lru_cache(maxsize=256)
def cached_lyapunov(dist: Distribution, z: complex, n: int = 10_000, samples: int = 200,
                    seed: int = 0) -> LyapunovEstimate:
    """Memoised :func:`lyapunov_estimate` keyed by (dist, z, n, samples, seed)."""
    return lyapunov_estimate(dist, z, n, samples, seed)


def ldt_samples(dist: Distribution, z, interval, decoration: str, samples: int, seed: int = 0,
                threads: int = 1) -> np.ndarray:
    """``(1/L) log|P^{dec}_{[a,b],z}|`` for each sample, ``L = b - a + 1``."""
    a, b = interval
    if b < a:
        raise ParameterError(f"empty interval [{a}, {b}]")
    if decoration not in LDT_DECORATIONS:
        raise ParameterError(f"decoration must be one of {sorted(LDT_DECORATIONS)}")
    beta, gamma = LDT_DECORATIONS[decoration]
    z = complex(z)

    def work(idx):
        alpha = sample_batch(dist, a - 1, b + 1, seed, idx)
        return log_abs_normalized(alpha, a - 1, a, b, z, beta, gamma) / (b - a + 1)

    return map_chunks(work, samples, threads)


@dataclass(frozen=True)
class LdtTail:
    z: complex
    n: int
    epsilon: float
    decoration: str
    gamma_ref: float
    tail_prob: float
    ci_lo: float
    ci_hi: float
    count: int
    samples: int


def ldt_tail(dist: Distribution, z, epsilon: float, interval, decoration: str, samples: int,
             gamma_ref, seed: int = 0, threads: int = 1) -> LdtTail:
    """Fraction of samples with ``|(1/L) log|P^{dec}| - gamma| >= epsilon``, with a Wilson interval."""
    g = _gamma_value(gamma_ref)
    if epsilon < 0:
        raise ParameterError("epsilon must be nonnegative")
    vals = ldt_samples(dist, z, interval, decoration, samples, seed, threads)
    p = proportion(np.abs(vals - g) >= epsilon)
    a, b = interval
    return LdtTail(complex(z), b - a + 1, float(epsilon), decoration, g, p.value, p.ci_lo, p.ci_hi, p.count, p.total)


def bad_set_member(field: VerblunskyField, z, epsilon: float, decoration: str, gamma_ref) -> str:
    """Classify a field as ``"plus"``, ``"minus"`` or ``"neither"`` for the given decoration.

    plus: ``|P| >= e^{(gamma+eps)L}``; minus: ``|P| <= e^{(gamma-eps)L}``.  The
    boundary phases come from the decoration (-1 on the left, 1 on the right).
    """
    g = _gamma_value(gamma_ref)
    if epsilon < 0:
        raise ParameterError("epsilon must be nonnegative")
    beta, gamma = LDT_DECORATIONS[decoration]
    L = field.b - field.a + 1
    lp = float(log_abs_normalized(field.alpha, field.first, field.a, field.b, complex(z), beta, gamma))
    if lp >= (g + epsilon) * L:
        return "plus"
    if lp <= (g - epsilon) * L:
        return "minus"
    return "neither"


@dataclass(frozen=True)
class BadSetStats:
    interval: tuple
    epsilon: float
    decoration: str
    z: complex
    plus_count: int
    minus_count: int
    total: int


def bad_set_stats(dist: Distribution, z, epsilon: float, interval, decoration: str, samples: int,
                  gamma_ref, seed: int = 0, threads: int = 1) -> BadSetStats:
    g = _gamma_value(gamma_ref)
    a, b = interval
    vals = ldt_samples(dist, z, interval, decoration, samples, seed, threads)
    plus = vals >= g + epsilon
    minus = (vals <= g - epsilon) & ~plus
    return BadSetStats((a, b), float(epsilon), decoration, complex(z), int(plus.sum()), int(minus.sum()), int(vals.size))


def _craig_simon_logs(alpha, first, x, n, z, beta, gamma):
    right = log_abs_normalized(alpha, first, x + 1, x + n, z, beta, None)
    left = log_abs_normalized(alpha, first, x - n, x - 1, z, None, gamma)
    return np.maximum(left, right)


def craig_simon_check(field: VerblunskyField, x: int, n: int, z, epsilon: float, gamma_ref) -> bool:
    """``max(|P^{beta,.}_[x+1,x+n]|, |P^{.,gamma}_[x-n,x-1]|) <= e^{(gamma+eps)(n+1)}``."""
    g = _gamma_value(gamma_ref)
    if not field.covers(x - n - 1, x + n + 1):
        raise ParameterError(f"field must cover [{x - n - 1}, {x + n + 1}]")
    val = _craig_simon_logs(field.alpha, field.first, x, n, complex(z), field.beta, field.gamma)
    return bool(val <= (g + epsilon) * (n + 1))


@dataclass(frozen=True)
class CraigSimonRow:
    n: int
    failures: int
    samples: int
    fraction: float
    ci_lo: float
    ci_hi: float


def craig_simon_experiment(dist: Distribution, z, epsilon: float, ns, samples: int, gamma_ref,
                           x: int = 0, seed: int = 0, threads: int = 1) -> list[CraigSimonRow]:
    """Failure frequency of the one-sided upper bound for each scale in ``ns``."""
    g = _gamma_value(gamma_ref)
    rows = []
    for n in ns:
        def work(idx, n=n):
            alpha = sample_batch(dist, x - n - 1, x + n + 1, seed, idx)
            return _craig_simon_logs(alpha, x - n - 1, x, n, complex(z), -1.0, 1.0)

        vals = map_chunks(work, samples, threads)
        p = proportion(vals > (g + epsilon) * (n + 1))
        rows.append(CraigSimonRow(int(n), p.count, p.total, p.value, p.ci_lo, p.ci_hi))
    return rows
