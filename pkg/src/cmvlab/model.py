"""Verblunsky-coefficient distributions, sampled coefficient windows and seeding.

Random coefficients are generated coordinate by coordinate from a Philox
counter-based stream keyed by ``(master_seed, sample_index)``: the coefficient
at integer site ``j`` uses counter ``j + OFFSET``.  A field is therefore a pure
function of the seed plan and the site index, and overlapping windows drawn
with the same plan agree on their overlap.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "rho",
    "DiskPoint",
    "BoundaryPhase",
    "Distribution",
    "parse_distribution",
    "Arc",
    "theta_grid",
    "SeedPlan",
    "VerblunskyField",
    "sample_field",
    "sample_coefficients",
]

UNIMODULAR_TOL = 1e-14
_COUNTER_OFFSET = 1 << 62
_MASK64 = (1 << 64) - 1


def rho(alpha):
    """Return ``sqrt(1 - |alpha|^2)``; accepts scalars or arrays.

    Raises DomainError if any ``|alpha| >= 1``.
    """
    a = np.abs(np.asarray(alpha, dtype=complex))
    if np.any(a >= 1.0) or np.any(~np.isfinite(a)):
        raise DomainError(f"Verblunsky coefficient outside the open unit disk: |alpha| = {np.max(a)!r}")
    # (1-|a|)(1+|a|) keeps relative accuracy for |a| close to 1
    r = np.sqrt((1.0 - a) * (1.0 + a))
    return float(r) if r.ndim == 0 else r


def _rho_unchecked(alpha):
    a = np.abs(alpha)
    return np.sqrt(np.maximum((1.0 - a) * (1.0 + a), 0.0))


@dataclass(frozen=True)
class DiskPoint:
    """A complex number strictly inside the unit disk."""

    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not abs(v) < 1.0:
            raise DomainError(f"|alpha| = {abs(v)!r} is not < 1")
        object.__setattr__(self, "value", v)

    def __complex__(self):
        return self.value

    @property
    def rho(self) -> float:
        return rho(self.value)


@dataclass(frozen=True)
class BoundaryPhase:
    """A unimodular boundary value (beta or gamma)."""

    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if abs(abs(v) - 1.0) > UNIMODULAR_TOL:
            raise DomainError(f"boundary phase must be unimodular, got |value| = {abs(v)!r}")
        object.__setattr__(self, "value", v)

    def __complex__(self):
        return self.value


def _as_phase(value) -> complex | None:
    if value is None:
        return None
    return BoundaryPhase(complex(value)).value


# ---------------------------------------------------------------------------
# distributions


@dataclass(frozen=True)
class Distribution:
    """Compactly supported law of a single Verblunsky coefficient.

    ``kind`` is one of ``"atoms"``, ``"circle"``, ``"constant"``.  ``margin`` is
    the recorded compactness margin delta: the support lies in the closed disk
    of radius ``1 - margin``.
    """

    kind: str
    points: tuple = ()
    weights: tuple = ()
    radius: float = 0.0
    margin: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if self.kind == "atoms":
            pts = tuple(complex(p) for p in self.points)
            w = tuple(float(x) for x in self.weights)
            if not pts or len(pts) != len(w):
                raise ParameterError("atoms need matching, nonempty point and weight lists")
            if any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-12:
                raise ParameterError(f"atom weights must be nonnegative and sum to 1, got {w}")
            r = max(abs(p) for p in pts)
            object.__setattr__(self, "points", pts)
            object.__setattr__(self, "weights", w)
        elif self.kind == "circle":
            r = float(self.radius)
            if r < 0:
                raise ParameterError("circle radius must be nonnegative")
        elif self.kind == "constant":
            if len(self.points) != 1:
                raise ParameterError("constant distribution takes exactly one point")
            pts = (complex(self.points[0]),)
            object.__setattr__(self, "points", pts)
            object.__setattr__(self, "weights", (1.0,))
            r = abs(pts[0])
        else:
            raise ParameterError(f"unknown distribution kind {self.kind!r}")
        if not r < 1.0:
            raise DomainError(f"distribution support reaches |alpha| = {r!r} >= 1")
        object.__setattr__(self, "margin", 1.0 - r)

    @classmethod
    def atoms(cls, points: Sequence[complex], weights: Sequence[float] | None = None) -> "Distribution":
        if weights is None:
            weights = [1.0 / len(points)] * len(points)
        return cls("atoms", tuple(points), tuple(weights))

    @classmethod
    def circle(cls, radius: float) -> "Distribution":
        return cls("circle", radius=float(radius))

    @classmethod
    def constant(cls, point: complex) -> "Distribution":
        return cls("constant", (complex(point),))

    @property
    def rho_min(self) -> float:
        """Lower bound ``sqrt(1 - (1 - margin)^2)`` on every sampled rho."""
        return float(_rho_unchecked(1.0 - self.margin))

    def transform(self, fn) -> "Distribution":
        """Push the law forward through a rotation/reflection ``fn`` of the disk."""
        if self.kind == "circle":
            return self
        if self.kind == "constant":
            return Distribution.constant(fn(self.points[0]))
        return Distribution.atoms([fn(p) for p in self.points], self.weights)

    def conjugate(self) -> "Distribution":
        return self.transform(lambda p: p.conjugate())

    def from_uniforms(self, u: np.ndarray) -> np.ndarray:
        """Map uniforms in [0, 1) to coefficients (inverse-CDF for atoms)."""
        u = np.asarray(u, dtype=float)
        if self.kind == "constant":
            return np.full(u.shape, self.points[0], dtype=complex)
        if self.kind == "circle":
            return self.radius * np.exp(2j * np.pi * u)
        cdf = np.cumsum(self.weights)
        idx = np.searchsorted(cdf, u, side="right")
        idx = np.minimum(idx, len(self.points) - 1)
        return np.asarray(self.points, dtype=complex)[idx]

    def literal(self) -> str:
        if self.kind == "constant":
            return f"constant:{_fmt_complex(self.points[0])}"
        if self.kind == "circle":
            return f"circle:{self.radius!r}"
        return "atoms:" + ";".join(f"({_fmt_complex(p)},{w!r})" for p, w in zip(self.points, self.weights))


def _fmt_complex(c: complex) -> str:
    return f"{c.real!r}{c.imag:+}i"


_ATOM_RE = re.compile(r"\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)")


def _parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise ParameterError(f"malformed complex literal {text!r}") from None


def parse_distribution(literal: str) -> Distribution:
    """Parse ``constant:0.5+0i``, ``atoms:(0.5,0.5);(-0.5,0.5)`` or ``circle:0.7``."""
    kind, sep, body = literal.strip().partition(":")
    if not sep:
        raise ParameterError(f"distribution literal needs 'kind:...', got {literal!r}")
    kind = kind.strip().lower()
    if kind == "constant":
        return Distribution.constant(_parse_complex(body))
    if kind == "circle":
        try:
            radius = float(body)
        except ValueError:
            raise ParameterError(f"malformed circle radius {body!r}") from None
        return Distribution.circle(radius)
    if kind == "atoms":
        parts = [p for p in body.split(";") if p.strip()]
        points, weights = [], []
        for part in parts:
            m = _ATOM_RE.fullmatch(part.strip())
            if m is None:
                raise ParameterError(f"malformed atom {part!r}; expected (point,weight)")
            points.append(_parse_complex(m.group(1)))
            try:
                weights.append(float(m.group(2)))
            except ValueError:
                raise ParameterError(f"malformed atom weight {m.group(2)!r}") from None
        return Distribution.atoms(points, weights)
    raise ParameterError(f"unknown distribution kind {kind!r}")


# ---------------------------------------------------------------------------
# arcs


@dataclass(frozen=True)
class Arc:
    """Closed arc ``{e^{i theta}: theta_lo <= theta <= theta_hi}`` (mod 2 pi)."""

    theta_lo: float
    theta_hi: float

    def __post_init__(self):
        width = self.theta_hi - self.theta_lo
        if not 0.0 < width <= 2 * math.pi + 1e-15:
            raise ParameterError(f"arc width must be in (0, 2pi], got {width!r}")

    @classmethod
    def full(cls) -> "Arc":
        return cls(-math.pi, math.pi)

    @property
    def width(self) -> float:
        return self.theta_hi - self.theta_lo

    def contains(self, z) -> np.ndarray | bool:
        theta = np.angle(np.asarray(z))
        off = np.mod(theta - self.theta_lo, 2 * math.pi)
        inside = (off <= self.width + 1e-15) | (self.width >= 2 * math.pi)
        return bool(inside) if inside.ndim == 0 else inside

    def grid(self, count: int) -> np.ndarray:
        return theta_grid(self.theta_lo, self.theta_hi, count)


def theta_grid(lo: float, hi: float, count: int) -> np.ndarray:
    """Chebyshev-spaced angles in [lo, hi], ascending; ``count == 1`` gives the midpoint."""
    if count < 1:
        raise ParameterError("z-grid needs at least one point")
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    k = np.arange(count)
    nodes = np.cos(np.pi * (2 * k + 1) / (2 * count))
    return np.sort(mid + half * nodes) if count > 1 else np.array([mid])


# ---------------------------------------------------------------------------
# seeding


@dataclass(frozen=True)
class SeedPlan:
    """Per-sample random stream, a pure function of ``(master_seed, sample_index)``."""

    master_seed: int
    sample_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed <= _MASK64:
            raise ParameterError("master_seed must be an unsigned 64-bit integer")
        if self.sample_index < 0:
            raise ParameterError("sample_index must be nonnegative")

    def uniforms(self, lo: int, hi: int) -> np.ndarray:
        """Uniforms in [0, 1) for integer sites ``lo..hi`` inclusive."""
        m = hi - lo + 1
        if m <= 0:
            return np.empty(0)
        bg = np.random.Philox(key=[self.master_seed, self.sample_index])
        bg.advance(lo + _COUNTER_OFFSET)
        raw = bg.random_raw(4 * m).reshape(m, 4)[:, 0]
        return (raw >> np.uint64(11)).astype(float) * 2.0 ** -53


# ---------------------------------------------------------------------------
# fields


@dataclass(frozen=True, eq=False)
class VerblunskyField:
    """Coefficients on the window ``[a-1, b+1]`` plus boundary phases.

    ``alpha[i]`` is the coefficient at site ``first + i``.
    """

    first: int
    alpha: np.ndarray
    beta: complex | None = -1.0
    gamma: complex | None = 1.0

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=complex)
        if alpha.ndim != 1 or alpha.size < 3:
            raise ParameterError("a field needs a 1-d window of at least 3 coefficients")
        rho(alpha)  # domain check
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", _as_phase(self.beta))
        object.__setattr__(self, "gamma", _as_phase(self.gamma))

    @classmethod
    def from_interval(cls, a: int, b: int, alpha, beta=-1.0, gamma=1.0) -> "VerblunskyField":
        alpha = np.asarray(alpha, dtype=complex)
        if alpha.size != b - a + 3:
            raise ParameterError(f"window [a-1, b+1] needs {b - a + 3} coefficients, got {alpha.size}")
        return cls(a - 1, alpha, beta, gamma)

    @property
    def a(self) -> int:
        return self.first + 1

    @property
    def b(self) -> int:
        return self.first + self.alpha.size - 2

    @property
    def last(self) -> int:
        return self.first + self.alpha.size - 1

    @property
    def rho(self) -> np.ndarray:
        return _rho_unchecked(self.alpha)

    def __getitem__(self, j: int) -> complex:
        if not self.first <= j <= self.last:
            raise ParameterError(f"site {j} outside the field window [{self.first}, {self.last}]")
        return complex(self.alpha[j - self.first])

    def covers(self, lo: int, hi: int) -> bool:
        return self.first <= lo and hi <= self.last

    def with_boundaries(self, beta=-1.0, gamma=1.0) -> "VerblunskyField":
        return VerblunskyField(self.first, self.alpha, beta, gamma)

    def window(self, a: int, b: int, beta=..., gamma=...) -> "VerblunskyField":
        """Sub-field for the interval ``[a, b]`` (its window is ``[a-1, b+1]``)."""
        if not self.covers(a - 1, b + 1):
            raise ParameterError(f"[{a - 1}, {b + 1}] is not inside [{self.first}, {self.last}]")
        lo = a - 1 - self.first
        return VerblunskyField(
            a - 1,
            self.alpha[lo : lo + b - a + 3],
            self.beta if beta is ... else beta,
            self.gamma if gamma is ... else gamma,
        )


def sample_coefficients(dist: Distribution, lo: int, hi: int, master_seed: int, sample_index: int) -> np.ndarray:
    """Coefficients at sites ``lo..hi`` for one sample."""
    return dist.from_uniforms(SeedPlan(master_seed, sample_index).uniforms(lo, hi))


def sample_field(dist: Distribution, interval, beta=-1.0, gamma=1.0, seed: SeedPlan | int = 0) -> VerblunskyField:
    """Draw i.i.d. coefficients from ``dist`` on ``[a-1, b+1]`` for ``interval = (a, b)``."""
    a, b = interval
    if b < a:
        raise ParameterError(f"empty interval [{a}, {b}]")
    plan = seed if isinstance(seed, SeedPlan) else SeedPlan(int(seed))
    alpha = dist.from_uniforms(plan.uniforms(a - 1, b + 1))
    return VerblunskyField(a - 1, alpha, beta, gamma)


def sample_batch(dist: Distribution, lo: int, hi: int, master_seed: int, indices) -> np.ndarray:
    """Stack of coefficient rows (one per sample index) on sites ``lo..hi``."""
    indices = list(indices)
    out = np.empty((len(indices), hi - lo + 1), dtype=complex)
    for r, s in enumerate(indices):
        out[r] = sample_coefficients(dist, lo, hi, master_seed, s)
    return out
