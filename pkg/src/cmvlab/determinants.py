"""Scaled determinants, Green's function entries and the Poisson formula.

Two determinants live here:

* ``det_A``: the tridiagonal determinant of ``A = z L* - M`` from the
  three-term recurrence.  Cramer's rule for the Green's function uses its
  principal minors.
* the characteristic polynomial ``det(z - E)`` of the CMV block.  When one of
  the factors (say L) is unitary, ``z - LM = L (z L* - M)`` so the two differ by
  the constant ``det L``.  When only M is unitary the same recurrence is run on
  ``z M* - L``.  A plain truncation whose two partial Theta blocks sit in
  different factors has neither factor unitary; its determinant is affine in
  ``alpha_{a-1}`` and is interpolated from the ``beta = +1`` and ``beta = -1``
  modifications.

Every recurrence step is renormalised and the scale kept as a natural log, so
lengths far beyond the ~700-step float overflow are fine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .cmv_core import tilde_alpha, tridiagonal_entries
from .errors import ParameterError, SingularSystemError
from .model import VerblunskyField, _rho_unchecked

__all__ = [
    "ScaledComplex",
    "DeterminantResult",
    "GreenEntry",
    "DECORATIONS",
    "scaled_tridiag_det",
    "char_poly_scaled",
    "det_A_scaled",
    "det_P",
    "det_A",
    "log_abs_normalized",
    "green_entry",
    "green_log_abs",
    "green_direct",
    "poisson_reconstruct",
    "sandwich_bound",
    "EIGEN_GUARD",
]

# |det(z - E)| below e^{-20} counts as "z is an eigenvalue".  For a unitary block
# the mean of log|det(z - E)| over the circle is 0 (Jensen), so the scale is 1.
EIGEN_GUARD = -20.0

DECORATIONS = ("both", "left", "right", "none")


@dataclass(frozen=True)
class ScaledComplex:
    """``exp(log_mag) * phase``; ``log_mag = -inf`` encodes an exact zero."""

    log_mag: float
    phase: complex = 1.0

    @classmethod
    def one(cls) -> "ScaledComplex":
        return cls(0.0, 1.0 + 0j)

    @classmethod
    def from_complex(cls, value) -> "ScaledComplex":
        v = complex(value)
        if v == 0:
            return cls(-math.inf, 1.0 + 0j)
        m = abs(v)
        return cls(math.log(m), v / m)

    def __complex__(self) -> complex:
        if self.log_mag == -math.inf:
            return 0j
        return math.exp(self.log_mag) * complex(self.phase)

    @property
    def value(self) -> complex:
        return complex(self)

    def __abs__(self) -> float:
        return math.exp(self.log_mag)

    def __mul__(self, other: "ScaledComplex") -> "ScaledComplex":
        return ScaledComplex(self.log_mag + other.log_mag, self.phase * other.phase)

    def __truediv__(self, other: "ScaledComplex") -> "ScaledComplex":
        return ScaledComplex(self.log_mag - other.log_mag, self.phase / other.phase)

    def scale(self, log_factor: float) -> "ScaledComplex":
        return ScaledComplex(self.log_mag + log_factor, self.phase)


# ---------------------------------------------------------------------------
# batched kernels; leading axes of every array are batch axes


def scaled_tridiag_det(diag: np.ndarray, off: np.ndarray):
    """Determinant of a complex symmetric tridiagonal matrix, as (log|D|, phase).

    ``D_k = d_k D_{k-1} - e_{k-1}^2 D_{k-2}``, renormalised at every step.
    """
    diag = np.asarray(diag, dtype=complex)
    off = np.asarray(off, dtype=complex)
    n = diag.shape[-1]
    shape = diag.shape[:-1]
    if n == 0:
        return np.zeros(shape), np.ones(shape, dtype=complex)
    e2 = off * off
    p = diag[..., 0].copy()
    q = np.ones(shape, dtype=complex)
    logs = np.zeros(shape)
    for k in range(n):
        if k:
            p, q = diag[..., k] * p - e2[..., k - 1] * q, p
        s = np.maximum(np.abs(p), np.abs(q))
        s = np.where(s > 0, s, 1.0)
        p = p / s
        q = q / s
        logs += np.log(s)
    mag = np.abs(p)
    with np.errstate(divide="ignore"):
        logmag = logs + np.log(mag)
    phase = np.where(mag > 0, p / np.where(mag > 0, mag, 1.0), 1.0 + 0j)
    return logmag, phase


def _factor_det(at: np.ndarray, a: int, b: int, which: int) -> np.ndarray:
    """Closed-form determinant of L (``which=0``) or M (``which=1``) on [a, b]."""
    det = np.ones(at.shape[:-1], dtype=complex)
    for k, n in enumerate(range(a - 1, b + 1)):
        if n % 2 != which:
            continue
        left_in, right_in = n >= a, n + 1 <= b
        if left_in and right_in:
            det = -det
        elif right_in:  # only site n+1 = a survives
            det = det * -at[..., k]
        elif left_in:  # only site n = b survives
            det = det * np.conj(at[..., k])
    return det


def _factor_is_unitary(a: int, b: int, which: int, left_mod: bool, right_mod: bool) -> bool:
    left_ok = (a - 1) % 2 != which or left_mod
    right_ok = b % 2 != which or right_mod
    return left_ok and right_ok


def det_A_scaled(alpha, first: int, a: int, b: int, z, beta=None, gamma=None):
    """(log|det A|, phase) for ``A^{beta,gamma}_{[a,b],z}``; empty interval gives 1."""
    alpha = np.asarray(alpha, dtype=complex)
    shape = np.broadcast_shapes(alpha.shape[:-1], np.shape(z))
    if b < a:
        return np.zeros(shape), np.ones(shape, dtype=complex)
    at = tilde_alpha(alpha, first, a, b, beta, gamma)
    diag, off = tridiagonal_entries(at, a, z)
    return scaled_tridiag_det(diag, np.broadcast_to(off, diag.shape[:-1] + off.shape[-1:]))


def char_poly_scaled(alpha, first: int, a: int, b: int, z, beta=None, gamma=None):
    """(log|det(z - E)|, phase) for the block on ``[a, b]`` with the given boundaries."""
    alpha = np.asarray(alpha, dtype=complex)
    shape = np.broadcast_shapes(alpha.shape[:-1], np.shape(z))
    if b < a:
        return np.zeros(shape), np.ones(shape, dtype=complex)
    left_mod, right_mod = beta is not None, gamma is not None
    at = tilde_alpha(alpha, first, a, b, beta, gamma)
    for which in (0, 1):
        if _factor_is_unitary(a, b, which, left_mod, right_mod):
            diag, off = tridiagonal_entries(at, a, z, parity=which)
            lm, ph = scaled_tridiag_det(diag, np.broadcast_to(off, diag.shape[:-1] + off.shape[-1:]))
            fac = _factor_det(at, a, b, which)
            return lm, ph * fac
    # neither factor unitary: plain truncation, affine in alpha_{a-1}
    lp, pp = char_poly_scaled(alpha, first, a, b, z, 1.0, gamma)
    lm_, pm = char_poly_scaled(alpha, first, a, b, z, -1.0, gamma)
    al = alpha[..., a - 1 - first]
    top = np.maximum(lp, lm_)
    top = np.where(np.isfinite(top), top, 0.0)
    v = 0.5 * ((1 + al) * np.exp(lp - top) * pp + (1 - al) * np.exp(lm_ - top) * pm)
    mag = np.abs(v)
    with np.errstate(divide="ignore"):
        logmag = top + np.log(mag)
    return logmag, np.where(mag > 0, v / np.where(mag > 0, mag, 1.0), 1.0 + 0j)


def log_rho_sum(alpha, first: int, lo: int, hi: int) -> np.ndarray:
    """``sum_{k=lo}^{hi} log rho_k`` of the unmodified coefficients."""
    alpha = np.asarray(alpha, dtype=complex)
    if hi < lo:
        return np.zeros(alpha.shape[:-1])
    seg = alpha[..., lo - first : hi - first + 1]
    return np.sum(np.log(_rho_unchecked(seg)), axis=-1)


def log_abs_normalized(alpha, first: int, a: int, b: int, z, beta=None, gamma=None) -> np.ndarray:
    """``log|P| = log|det(z - E)| - sum_{a-1}^{b} log rho`` (original rho at both ends)."""
    alpha = np.asarray(alpha, dtype=complex)
    if b < a:
        return np.zeros(np.broadcast_shapes(alpha.shape[:-1], np.shape(z)))
    lm, _ = char_poly_scaled(alpha, first, a, b, z, beta, gamma)
    return lm - log_rho_sum(alpha, first, a - 1, b)


# ---------------------------------------------------------------------------
# object API


def _decoration(field: VerblunskyField, decoration: str):
    if decoration not in DECORATIONS:
        raise ParameterError(f"decoration must be one of {DECORATIONS}, got {decoration!r}")
    beta = field.beta if decoration in ("both", "left") else None
    gamma = field.gamma if decoration in ("both", "right") else None
    if decoration in ("both", "left") and beta is None or decoration in ("both", "right") and gamma is None:
        raise ParameterError(f"decoration {decoration!r} needs the field's boundary phase")
    return beta, gamma


@dataclass(frozen=True)
class DeterminantResult:
    """``script_P = det(z - E)`` and ``normalized_P = script_P / (rho_{a-1} ... rho_b)``."""

    script_P: ScaledComplex
    normalized_P: ScaledComplex
    boundary_decoration: str
    a: int
    b: int
    z: complex


def det_P(field: VerblunskyField, z, decoration: str = "both", a: int | None = None,
          b: int | None = None) -> DeterminantResult:
    """Characteristic determinant of the (decorated) block on ``[a, b]``.

    For ``a > b`` both values are 1.
    """
    a = field.a if a is None else a
    b = field.b if b is None else b
    beta, gamma = _decoration(field, decoration)
    if b < a:
        one = ScaledComplex.one()
        return DeterminantResult(one, one, decoration, a, b, complex(z))
    lm, ph = char_poly_scaled(field.alpha, field.first, a, b, complex(z), beta, gamma)
    script = ScaledComplex(float(lm), complex(ph))
    norm = script.scale(-float(log_rho_sum(field.alpha, field.first, a - 1, b)))
    return DeterminantResult(script, norm, decoration, a, b, complex(z))


def det_A(field: VerblunskyField, z, decoration: str = "both", a: int | None = None,
          b: int | None = None) -> ScaledComplex:
    """Determinant of the tridiagonal ``A`` on ``[a, b]``."""
    a = field.a if a is None else a
    b = field.b if b is None else b
    beta, gamma = _decoration(field, decoration)
    lm, ph = det_A_scaled(field.alpha, field.first, a, b, complex(z), beta, gamma)
    return ScaledComplex(float(lm), complex(ph))


@dataclass(frozen=True)
class GreenEntry:
    """Magnitude of ``G^{beta,gamma}_{[a,b],z}(x, y)`` (phase is not tracked)."""

    value: ScaledComplex
    x: int
    y: int
    a: int
    b: int
    z: complex


def green_log_abs(alpha, first: int, a: int, b: int, x: int, y: int, z, beta, gamma,
                  denominator=None) -> np.ndarray:
    """Batched ``log|G(x, y)|`` by Cramer's rule on the tridiagonal A.

    ``|G(x,y)| = |det A_[a,x-1]| |det A_[y+1,b]| prod_{k=x}^{y-1} rho_k / |det A_[a,b]|``
    with the left minor keeping beta and the right minor keeping gamma.
    ``G`` is symmetric, so ``x > y`` is handled by swapping.
    """
    if x > y:
        x, y = y, x
    left, _ = det_A_scaled(alpha, first, a, x - 1, z, beta, None)
    right, _ = det_A_scaled(alpha, first, y + 1, b, z, None, gamma)
    if denominator is None:
        denominator, _ = det_A_scaled(alpha, first, a, b, z, beta, gamma)
    return left + right + log_rho_sum(alpha, first, x, y - 1) - denominator


def green_entry(field: VerblunskyField, z, x: int, y: int, a: int | None = None,
                b: int | None = None) -> GreenEntry:
    """``|G(x, y)|`` on the fully modified block; raises SingularSystemError at eigenvalues."""
    a = field.a if a is None else a
    b = field.b if b is None else b
    if not (a <= min(x, y) and max(x, y) <= b):
        raise ParameterError(f"sites ({x}, {y}) outside [{a}, {b}]")
    beta, gamma = _decoration(field, "both")
    z = complex(z)
    denom, _ = det_A_scaled(field.alpha, field.first, a, b, z, beta, gamma)
    if not float(denom) >= EIGEN_GUARD:
        raise SingularSystemError(z)
    lg = green_log_abs(field.alpha, field.first, a, b, x, y, z, beta, gamma, denominator=denom)
    return GreenEntry(ScaledComplex(float(lg), 1.0 + 0j), x, y, a, b, z)


def green_direct(field: VerblunskyField, z, columns=None, a: int | None = None,
                 b: int | None = None) -> np.ndarray:
    """Columns of ``A^{-1}`` by banded LU with partial pivoting.

    ``columns`` are site indices (default: all); the result has one column per
    requested site and one row per site of ``[a, b]``.
    """
    from .cmv_core import build_A

    A = build_A(field, z, a=a, b=b)
    n = A.diag.size
    cols = np.arange(n) if columns is None else np.asarray(columns, dtype=int) - A.a
    if np.any(cols < 0) or np.any(cols >= n):
        raise ParameterError("requested Green columns outside the interval")
    rhs = np.zeros((n, cols.size), dtype=complex)
    rhs[cols, np.arange(cols.size)] = 1.0
    denom, _ = det_A_scaled(field.alpha, field.first, A.a, A.b, complex(z), A.beta, A.gamma)
    if not float(denom) >= EIGEN_GUARD:
        raise SingularSystemError(z)
    try:
        G = scipy.linalg.solve_banded((1, 1), A.banded(), rhs, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystemError(z, f"tridiagonal solve failed at z = {complex(z)!r}: {exc}") from exc
    return G


def poisson_reconstruct(field: VerblunskyField, z, x: int, psi_boundary, green_row=None) -> complex:
    """Right-hand side of the Poisson formula at an interior site ``a < x < b``.

    ``psi_boundary = (Psi(a-1), Psi(a), Psi(b), Psi(b+1))``.  ``green_row`` is
    ``G(x, .)`` over ``[a, b]`` (complex entries); computed when omitted.
    Boundary brackets use the field's unmodified alpha_{a-1}, alpha_b and their rho.
    """
    a, b = field.a, field.b
    if not a < x < b:
        raise ParameterError(f"Poisson formula needs a < x < b, got x = {x} on [{a}, {b}]")
    z = complex(z)
    if green_row is None:
        green_row = green_direct(field, z, columns=[x])[:, 0]  # G symmetric: column = row
    green_row = np.asarray(green_row)
    psi_am1, psi_a, psi_b, psi_bp1 = (complex(v) for v in psi_boundary)
    beta, gamma = field.beta, field.gamma
    al_l, al_r = field[a - 1], field[b]
    r_l, r_r = float(_rho_unchecked(al_l)), float(_rho_unchecked(al_r))
    if a % 2:
        left = psi_a * (z * beta.conjugate() - z * al_l.conjugate()) + psi_am1 * z * r_l
    else:
        left = psi_a * (al_l - beta) - psi_am1 * r_l
    if b % 2:
        right = psi_b * (-al_r.conjugate() + gamma.conjugate()) - psi_bp1 * r_r
    else:
        right = psi_b * (z * al_r - z * gamma) + psi_bp1 * z * r_r
    return complex(-green_row[0] * left - green_row[-1] * right)


def sandwich_bound(field: VerblunskyField, z, delta: float):
    """Evaluate the boundary-sandwich display for ``|P^{-1,1}_{[a,b]}|``.

    Returns ``(lower, middle, upper)`` with
    ``lower = |P^{-1,.}_{[a,b-1]}| - 1/delta^2`` and
    ``upper = (2/delta) |P^{-1,.}_{[a,b-1]}| + delta``.
    """
    f = field.with_boundaries(-1.0, 1.0)
    mid = abs(det_P(f, z, "both").normalized_P)
    short = abs(det_P(f, z, "left", f.a, f.b - 1).normalized_P)
    return short - 1.0 / delta**2, mid, 2.0 / delta * short + delta
