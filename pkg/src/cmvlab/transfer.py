"""Szegő recurrence and the one-step transfer cocycle.

``S_z(alpha) = (1/rho) [[z, -conj(alpha)], [-alpha z, 1]]`` maps
``(phi_n, phi_n^*)`` to ``(phi_{n+1}, phi_{n+1}^*)``; products
``T_[a,b] = S(alpha_b) ... S(alpha_a)`` grow like ``e^{gamma n}`` and are kept
as a unit-max-norm matrix plus a log scale.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .determinants import ScaledComplex, char_poly_scaled, log_rho_sum
from .errors import DomainError, ParameterError
from .model import VerblunskyField, _rho_unchecked, rho

__all__ = [
    "OneStep",
    "one_step",
    "TransferState",
    "propagate",
    "transfer_matrix",
    "norm2x2",
    "log_norm_batch",
    "SzegoPair",
    "szego_polys",
    "monic_szego",
    "reflect",
    "transfer_vs_determinant",
    "determinant_transfer_matrix",
]


@dataclass(frozen=True)
class OneStep:
    entries: np.ndarray
    z: complex
    alpha: complex

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.entries))

    def su11(self):
        """``(u, v)`` of ``z^{-1/2} S`` (principal root) in the ``[[u, v], [conj v, conj u]]`` form."""
        s = cmath.sqrt(self.z)
        m = self.entries / s
        return complex(m[0, 0]), complex(m[0, 1])

    def su11_residual(self) -> float:
        """Distance of ``z^{-1/2} S`` from SU(1,1); only meaningful for |z| = 1."""
        s = cmath.sqrt(self.z)
        m = self.entries / s
        u, v = m[0, 0], m[0, 1]
        return float(max(abs(abs(u) ** 2 - abs(v) ** 2 - 1.0),
                         abs(m[1, 0] - np.conj(v)), abs(m[1, 1] - np.conj(u))))


def one_step(z, alpha) -> OneStep:
    z, alpha = complex(z), complex(alpha)
    if z == 0:
        raise ParameterError("one-step cocycle needs z != 0")
    r = rho(alpha)
    m = np.array([[z, -alpha.conjugate()], [-alpha * z, 1.0]]) / r
    return OneStep(m, z, alpha)


@dataclass(frozen=True)
class TransferState:
    """``T = exp(log_scale) * matrix`` with ``max |matrix_ij| = 1``."""

    matrix: np.ndarray
    log_scale: float = 0.0
    step_count: int = 0

    @classmethod
    def identity(cls) -> "TransferState":
        return cls(np.eye(2, dtype=complex), 0.0, 0)

    def materialize(self) -> np.ndarray:
        return math.exp(self.log_scale) * self.matrix

    @property
    def log_norm(self) -> float:
        """log of the spectral norm of T."""
        return self.log_scale + math.log(float(norm2x2(self.matrix)))


def propagate(state: TransferState, alpha, z) -> TransferState:
    """Left-multiply by ``S_z(alpha)`` for each coefficient in ``alpha`` (in order)."""
    m, ls = state.matrix, state.log_scale
    alphas = np.atleast_1d(np.asarray(alpha, dtype=complex))
    for al in alphas:
        m = one_step(z, al).entries @ m
        s = float(np.max(np.abs(m)))
        m = m / s
        ls += math.log(s)
    return TransferState(m, ls, state.step_count + alphas.size)


def transfer_matrix(field: VerblunskyField, z, a: int | None = None, b: int | None = None) -> TransferState:
    """``T_[a,b]`` (default: the field's interval)."""
    a = field.a if a is None else a
    b = field.b if b is None else b
    if not field.covers(a, b):
        raise ParameterError(f"field does not cover [{a}, {b}]")
    seg = field.alpha[a - field.first : b - field.first + 1]
    return propagate(TransferState.identity(), seg, z)


def norm2x2(m: np.ndarray) -> np.ndarray:
    """Spectral norm of (a stack of) 2x2 matrices, from the Frobenius norm and |det|."""
    m = np.asarray(m)
    s = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    d = np.abs(m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0])
    disc = np.sqrt(np.maximum(s * s - 4 * d * d, 0.0))
    return np.sqrt(0.5 * (s + disc))


def log_norm_batch(alpha: np.ndarray, z) -> np.ndarray:
    """``log ||T||`` for each row of ``alpha`` (shape (S, n)), product in row order.

    ``z`` may be a scalar or an array broadcasting against the sample axis.
    """
    alpha = np.asarray(alpha, dtype=complex)
    if np.any(np.abs(alpha) >= 1):
        raise DomainError("Verblunsky coefficient outside the open unit disk")
    z = np.asarray(z, dtype=complex)
    shape = np.broadcast_shapes(alpha.shape[:-1], z.shape)
    t00 = np.ones(shape, dtype=complex)
    t01 = np.zeros(shape, dtype=complex)
    t10 = np.zeros(shape, dtype=complex)
    t11 = np.ones(shape, dtype=complex)
    ls = np.zeros(shape)
    r = _rho_unchecked(alpha)
    for k in range(alpha.shape[-1]):
        al, rk = alpha[..., k], r[..., k]
        ca = np.conj(al)
        n00 = (z * t00 - ca * t10) / rk
        n01 = (z * t01 - ca * t11) / rk
        n10 = (-al * z * t00 + t10) / rk
        n11 = (-al * z * t01 + t11) / rk
        s = np.maximum(np.maximum(np.abs(n00), np.abs(n01)), np.maximum(np.abs(n10), np.abs(n11)))
        t00, t01, t10, t11 = n00 / s, n01 / s, n10 / s, n11 / s
        ls += np.log(s)
    m = np.stack([np.stack([t00, t01], -1), np.stack([t10, t11], -1)], -2)
    return ls + np.log(norm2x2(m))


# ---------------------------------------------------------------------------
# Szegő polynomials


@dataclass(frozen=True)
class SzegoPair:
    """Orthonormal ``phi_n`` and ``phi_n^*`` at one z; ``log_rho_prod = sum_{k<n} log rho_k``."""

    n: int
    phi: ScaledComplex
    phi_star: ScaledComplex
    log_rho_prod: float = 0.0

    def monic(self) -> ScaledComplex:
        """``Phi_n = rho_0 ... rho_{n-1} phi_n``."""
        return self.phi.scale(self.log_rho_prod)

    def monic_star(self) -> ScaledComplex:
        return self.phi_star.scale(self.log_rho_prod)


def szego_polys(field: VerblunskyField, z, n: int) -> list[SzegoPair]:
    """``(phi_k, phi_k^*)`` for ``k = 0..n`` from the normalized 2x2 recurrence.

    Uses the field's coefficients at sites ``0..n-1``.
    """
    if n < 0:
        raise ParameterError("polynomial degree must be nonnegative")
    if n and not field.covers(0, n - 1):
        raise ParameterError(f"field does not carry alpha_0 .. alpha_{n - 1}")
    z = complex(z)
    out = [SzegoPair(0, ScaledComplex.one(), ScaledComplex.one(), 0.0)]
    vec = np.array([1.0 + 0j, 1.0 + 0j])
    ls = lr = 0.0
    for k in range(n):
        vec = one_step(z, field[k]).entries @ vec
        s = float(np.max(np.abs(vec)))
        if s > 0:
            vec = vec / s
            ls += math.log(s)
        lr += math.log(float(_rho_unchecked(field[k])))
        p, q = (ScaledComplex.from_complex(v).scale(ls) for v in vec)
        out.append(SzegoPair(k + 1, p, q, lr))
    return out


def monic_szego(alpha, z):
    """Monic ``(Phi_n, Phi_n^*)`` by the unnormalized recurrence; plain complex, short n only."""
    z = complex(z)
    p = q = 1.0 + 0j
    for al in np.asarray(alpha, dtype=complex):
        p, q = z * p - np.conj(al) * q, q - al * z * p
    return complex(p), complex(q)


def reflect(value, z, degree: int):
    """``Q^*(z) = z^n conj(Q(z))`` for |z| = 1."""
    return z**degree * np.conj(value)


# ---------------------------------------------------------------------------
# transfer matrix from determinants


def determinant_transfer_matrix(field: VerblunskyField, z, a: int | None = None,
                                b: int | None = None, log_shift: float = 0.0) -> np.ndarray:
    """Assemble ``T_[a,b]`` from characteristic determinants, times ``exp(-log_shift)``.

    ``T = (rho_a...rho_b)^{-1} [[z Q, X], [z X^*, Q^*]]`` with
    ``Q = det(z - E_[a+1,b])`` (plain truncation), ``X = det(z - E^{-1,.}_[a,b]) - z Q``
    and both reflections taken at degree ``b - a``.  Valid for |z| = 1.
    """
    a = field.a if a is None else a
    b = field.b if b is None else b
    z = complex(z)
    shift = log_shift + float(log_rho_sum(field.alpha, field.first, a, b))

    def val(lo, hi, beta):
        lm, ph = char_poly_scaled(field.alpha, field.first, lo, hi, z, beta, None)
        return complex(np.exp(lm - shift) * ph) if np.isfinite(lm) else 0j

    q = val(a + 1, b, None)
    x = val(a, b, -1.0) - z * q
    d = b - a
    return np.array([[z * q, x], [z * reflect(x, z, d), reflect(q, z, d)]])


def transfer_vs_determinant(field: VerblunskyField, z, interval=None) -> float:
    """Max entry error between the propagated ``T_[a,b]`` and its determinant assembly.

    Errors are relative to the largest entry of T.
    """
    a, b = (field.a, field.b) if interval is None else interval
    if abs(abs(complex(z)) - 1.0) > 1e-12:
        raise ParameterError("the determinant form of T is evaluated on |z| = 1 only")
    st = transfer_matrix(field, z, a, b)
    ref = determinant_transfer_matrix(field, z, a, b, log_shift=st.log_scale)
    return float(np.max(np.abs(st.matrix - ref)) / np.max(np.abs(st.matrix)))
