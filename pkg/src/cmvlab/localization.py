"""Regularity of sites, the two-point dichotomy, eigenfunction decay and the EDL kernel."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.stats

from .cmv_core import build_block
from .determinants import EIGEN_GUARD, det_A_scaled, green_log_abs
from .errors import ParameterError, SingularSystemError
from .lyapunov_ldt import LyapunovEstimate
from .model import Arc, Distribution, SeedPlan, VerblunskyField, sample_batch, sample_field
from .montecarlo import log_linear_fit, map_chunks, proportion
from .spectra import UnitaryEigenSystem, eig_unitary

__all__ = [
    "ROTATION",
    "RegularityVerdict",
    "is_regular",
    "TwoPointResult",
    "two_point_experiment",
    "LocalizationProfile",
    "localization_center",
    "profile_from_vector",
    "localize_eigenfunctions",
    "edl_kernel",
    "edl_conditioned",
    "EdlRow",
    "EdlResult",
    "edl_experiment",
]

ROTATION = 1e-9  # angle by which z is rotated after an eigenvalue hit
SENTINEL_RATE = -50.0
# eigenvector entries below this fraction of the peak sit at the eigensolver's
# round-off level (~1e-14 for blocks of size 1000) and are left out of decay fits
FLOOR = 1e-10


@dataclass(frozen=True)
class RegularityVerdict:
    x: int
    n: int
    c: float
    left_green_logmag: float
    right_green_logmag: float
    regular: bool
    z: complex
    rotated: bool = False


def _edge_logs(alpha, first, x, n, z, beta, gamma):
    """log|G(x, x-n)|, log|G(x, x+n)| on [x-n, x+n] and log|det A| (batched)."""
    a, b = x - n, x + n
    den, _ = det_A_scaled(alpha, first, a, b, z, beta, gamma)
    left = green_log_abs(alpha, first, a, b, x - n, x, z, beta, gamma, denominator=den)
    right = green_log_abs(alpha, first, a, b, x, x + n, z, beta, gamma, denominator=den)
    return left, right, den


def is_regular(field: VerblunskyField, x: int, n: int, z, c: float, beta=..., gamma=...,
               rotate_on_hit: bool = False) -> RegularityVerdict:
    """Test whether ``x`` is ``(c, n, z)``-regular for the block ``[x-n, x+n]``.

    Boundary phases default to the field's.  At an eigenvalue of the block a
    SingularSystemError is raised, unless ``rotate_on_hit``: then z is rotated
    by ``e^{i ROTATION}`` once and the verdict records it.
    """
    if n < 1:
        raise ParameterError("regularity needs n >= 1")
    if not field.covers(x - n - 1, x + n + 1):
        raise ParameterError(f"field must cover [{x - n - 1}, {x + n + 1}]")
    beta = field.beta if beta is ... else beta
    gamma = field.gamma if gamma is ... else gamma
    z = complex(z)
    rotated = False
    left, right, den = _edge_logs(field.alpha, field.first, x, n, z, beta, gamma)
    if not float(den) >= EIGEN_GUARD:
        if not rotate_on_hit:
            raise SingularSystemError(z)
        z *= complex(math.cos(ROTATION), math.sin(ROTATION))
        rotated = True
        left, right, den = _edge_logs(field.alpha, field.first, x, n, z, beta, gamma)
        if not float(den) >= EIGEN_GUARD:
            raise SingularSystemError(z)
    left, right = float(left), float(right)
    regular = left <= -c * n and right <= -c * n
    return RegularityVerdict(x, n, float(c), left, right, regular, z, rotated)


def _singular_batch(alpha, first, x, n, z, c, beta, gamma):
    """Singular flags per sample, with the eigenvalue-hit rotation; returns (flags, rotations)."""
    left, right, den = _edge_logs(alpha, first, x, n, z, beta, gamma)
    hit = ~(den >= EIGEN_GUARD)
    if np.any(hit):
        zr = z * complex(math.cos(ROTATION), math.sin(ROTATION))
        l2, r2, _ = _edge_logs(alpha[hit], first, x, n, zr, beta, gamma)
        left, right = left.copy(), right.copy()
        left[hit], right[hit] = l2, r2
    return (left > -c * n) | (right > -c * n), hit


@dataclass(frozen=True)
class TwoPointResult:
    n: int
    epsilon: float
    nu_hat: float
    grid_size: int
    samples: int
    frac_any_z: float  # samples with some grid z where both x and x+2n+1 are singular
    ci_lo: float
    ci_hi: float
    frac_worst_z: float
    frac_mean_z: float
    singular_cases: int  # (sample, z) pairs with x singular
    close_cases: int  # ... of which dist(z, sigma) <= e^{-delta(2n+1)}
    delta: float
    rotations: int
    thetas: tuple = ()
    per_z_counts: tuple = ()  # samples with both sites singular, per grid point

    @property
    def close_fraction(self) -> float:
        return self.close_cases / self.singular_cases if self.singular_cases else float("nan")


def two_point_experiment(dist: Distribution, x: int, n: int, z_grid, epsilon: float, gamma_ref,
                         samples: int, seed: int = 0, threads: int = 1, delta: float = 0.02,
                         beta=-1.0, gamma=1.0) -> TwoPointResult:
    """Frequency with which both ``x`` and ``x+2n+1`` are ``(gamma(z)-2 eps, n, z)``-singular.

    ``gamma_ref`` gives one Lyapunov estimate (or float) per grid point.  For
    every (sample, z) with ``x`` singular, the distance from z to the spectrum
    of the block ``[x-n, x+n]`` is compared with ``e^{-delta(2n+1)}``.
    """
    zs = np.asarray(z_grid.grid(8) if isinstance(z_grid, Arc) else z_grid, dtype=complex)
    if isinstance(z_grid, Arc):
        zs = np.exp(1j * zs)
    zs = np.atleast_1d(zs)
    if gamma_ref is None:
        raise ParameterError("two_point_experiment needs gamma_ref for every grid point")
    g = np.array([r.gamma_hat if isinstance(r, LyapunovEstimate) else float(r) for r in np.atleast_1d(gamma_ref)])
    if g.shape != zs.shape:
        raise ParameterError("gamma_ref must have one entry per grid point")
    nu = float(np.min(g))
    if not 0 < epsilon < nu / 2:
        raise ParameterError(f"epsilon must lie in (0, nu/2) = (0, {nu / 2:.6g}), got {epsilon!r}")
    lo, hi = x - n - 1, x + 3 * n + 2
    y = x + 2 * n + 1
    thr = math.exp(-delta * (2 * n + 1))

    def work(idx):
        alpha = sample_batch(dist, lo, hi, seed, idx)
        out = np.zeros((len(idx), zs.size, 4))  # both, x-singular, close, rotations
        for j, z in enumerate(zs):
            c = g[j] - 2 * epsilon
            sx, hx = _singular_batch(alpha, lo, x, n, z, c, beta, gamma)
            sy, hy = _singular_batch(alpha, lo, y, n, z, c, beta, gamma)
            out[:, j, 0] = sx & sy
            out[:, j, 1] = sx
            out[:, j, 3] = hx.astype(int) + hy.astype(int)
            for r in np.flatnonzero(sx):
                f = VerblunskyField(lo, alpha[r], beta, gamma).window(x - n, x + n)
                ev = eig_unitary(build_block(f), f).eigenvalues
                out[r, j, 2] = np.min(np.abs(ev - z)) <= thr
        return out

    res = map_chunks(work, samples, threads)
    both = res[..., 0].astype(bool)
    p_any = proportion(both.any(axis=1))
    per_z = both.mean(axis=0)
    return TwoPointResult(n, float(epsilon), nu, zs.size, samples, p_any.value, p_any.ci_lo, p_any.ci_hi,
                          float(per_z.max()), float(per_z.mean()), int(res[..., 1].sum()),
                          int(res[..., 2].sum()), float(delta), int(res[..., 3].sum()),
                          tuple(float(t) for t in np.angle(zs)), tuple(int(c) for c in both.sum(axis=0)))


# ---------------------------------------------------------------------------
# eigenfunction profiles


@dataclass(frozen=True)
class LocalizationProfile:
    k: int
    center: int
    decay_rate: float
    fit_r2: float
    theta_k: float
    fit_points: int = 0


def localization_center(psi, first_site: int = 0) -> int:
    """Left-most site where ``|psi|`` attains its maximum."""
    return first_site + int(np.argmax(np.abs(np.asarray(psi))))


def profile_from_vector(psi, first_site: int = 0, k: int = 0, theta: float = float("nan"),
                        plateau: int = 5, edge: int = 5, floor: float = FLOOR) -> LocalizationProfile:
    """Slope of ``log|psi(x)|`` against ``|x - center|``.

    Sites within ``plateau`` of the center, within ``edge`` of either end, or
    with ``|psi| < floor * max|psi|`` (round-off level) are left out.  With
    fewer than two usable sites the rate is the sentinel -50.
    """
    mag = np.abs(np.asarray(psi))
    m = mag.size
    c = int(np.argmax(mag))
    idx = np.arange(m)
    keep = (np.abs(idx - c) >= plateau) & (idx >= edge) & (idx < m - edge) & (mag >= floor * mag[c])
    if keep.sum() < 2:
        return LocalizationProfile(k, first_site + c, SENTINEL_RATE, float("nan"), theta, int(keep.sum()))
    dx = np.abs(idx[keep] - c).astype(float)
    if np.ptp(dx) == 0:
        return LocalizationProfile(k, first_site + c, SENTINEL_RATE, float("nan"), theta, int(keep.sum()))
    fit = scipy.stats.linregress(dx, np.log(mag[keep]))
    return LocalizationProfile(k, first_site + c, max(float(fit.slope), SENTINEL_RATE), float(fit.rvalue**2),
                               theta, int(keep.sum()))


def localize_eigenfunctions(system, arc: Arc, plateau: int = 5, edge: int = 5,
                            floor: float = FLOOR) -> list[LocalizationProfile]:
    """Decay profiles of the eigenvectors whose eigenvalues lie on ``arc``.

    ``system`` is a UnitaryEigenSystem or a boundary-modified CmvBlock.
    """
    if not isinstance(system, UnitaryEigenSystem):
        system = eig_unitary(system)
    on_arc = np.atleast_1d(arc.contains(system.eigenvalues))
    out = []
    for k in np.flatnonzero(on_arc):
        out.append(profile_from_vector(system.eigenvectors[:, k], system.first_site, int(k),
                                       float(np.angle(system.eigenvalues[k])), plateau, edge, floor))
    return out


# ---------------------------------------------------------------------------
# EDL


def edl_kernel(system: UnitaryEigenSystem, arc: Arc, p: int, q: int) -> float:
    """``sum_{k: z_k on arc} |Psi_k(p)| |Psi_k(q)|``, a time-uniform bound on the evolution kernel."""
    sel = np.atleast_1d(arc.contains(system.eigenvalues))
    return float(np.sum(np.abs(system.component(p)[sel]) * np.abs(system.component(q)[sel])))


def edl_conditioned(system: UnitaryEigenSystem, arc: Arc, x: int, y: int) -> float:
    """``sum_{k: z_k on arc, center_k = y} |Psi_k(x)|^2``."""
    sel = np.atleast_1d(arc.contains(system.eigenvalues))
    centers = system.first_site + np.argmax(np.abs(system.eigenvectors), axis=0)
    sel &= centers == y
    return float(np.sum(np.abs(system.component(x)[sel]) ** 2))


@dataclass(frozen=True)
class EdlRow:
    offset: int
    mean_kernel: float
    ci_lo: float
    ci_hi: float
    mean_conditioned: float
    fitted_rate: float


@dataclass(frozen=True)
class EdlResult:
    rows: list
    rate: float  # -slope of log(mean kernel) against offset
    rate_ci: tuple
    r2: float
    amplitude: float  # C in C e^{-rate * offset}
    conditioned_rate: float
    conditioned_rate_ci: tuple
    samples: int


def edl_experiment(dist: Distribution, size: int, arc: Arc, p: int, offsets, samples: int, seed: int = 0,
                   threads: int = 1, beta=-1.0, gamma=1.0) -> EdlResult:
    """Sample means of the EDL kernel ``K(p, p + offset)`` and of the center-conditioned sum.

    Blocks live on ``[1, size]``.
    """
    offsets = np.asarray(list(offsets), dtype=int)
    if not (1 <= p and p + offsets.max(initial=0) <= size and p + offsets.min(initial=0) >= 1):
        raise ParameterError("p + offsets must stay inside [1, size]")

    def work(idx):
        out = np.empty((len(idx), offsets.size, 2))
        for r, s in enumerate(idx):
            f = sample_field(dist, (1, size), beta, gamma, SeedPlan(seed, int(s)))
            sy = eig_unitary(build_block(f), f)
            for j, off in enumerate(offsets):
                out[r, j, 0] = edl_kernel(sy, arc, p, p + int(off))
                out[r, j, 1] = edl_conditioned(sy, arc, p + int(off), p)
        return out

    res = map_chunks(work, samples, threads)
    mean = res[..., 0].mean(axis=0)
    cmean = res[..., 1].mean(axis=0)
    if samples > 1:
        half = scipy.stats.t.ppf(0.975, samples - 1) * res[..., 0].std(axis=0, ddof=1) / math.sqrt(samples)
    else:
        half = np.full(mean.shape, np.nan)
    fit = log_linear_fit(offsets, mean)
    cfit = log_linear_fit(offsets, cmean)
    rows = [EdlRow(int(o), float(m), float(m - h), float(m + h), float(cm), -fit.slope)
            for o, m, h, cm in zip(offsets, mean, half, cmean)]
    return EdlResult(rows, -fit.slope, (-fit.slope_ci[1], -fit.slope_ci[0]), fit.r2,
                     math.exp(fit.intercept) if math.isfinite(fit.intercept) else float("nan"),
                     -cfit.slope, (-cfit.slope_ci[1], -cfit.slope_ci[0]), samples)
