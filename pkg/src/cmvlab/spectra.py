"""Eigensystems of boundary-modified CMV blocks and spectral separation of adjacent blocks.

The unitary block U is diagonalised through the Cayley transform
``H = i (I - V)(I + V)^{-1}`` of ``V = lam U``, a Hermitian matrix with the
same eigenvectors.  The unimodular shift ``lam`` keeps -1 away from the
spectrum of V.  Eigenvalues come back through ``v = (i - t)/(i + t)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .cmv_core import CmvBlock, build_block
from .determinants import char_poly_scaled
from .errors import NumericalFailure, ParameterError
from .model import Arc, Distribution, VerblunskyField, sample_batch
from .montecarlo import map_chunks, proportion

__all__ = [
    "UnitaryEigenSystem",
    "eig_unitary",
    "spectral_distance",
    "ResonanceResult",
    "resonance_distances",
    "resonance_experiment",
]

RESIDUAL_TOL = 1e-8
GRAM_TOL = 1e-8
# golden-angle sequence of trial shifts; the first is no shift at all
_SHIFTS = [np.exp(1j * math.pi * (3 - math.sqrt(5)) * k) for k in range(12)]


@dataclass(frozen=True, eq=False)
class UnitaryEigenSystem:
    """Eigenvalues (sorted by angle) and orthonormal eigenvector columns.

    Row ``i`` of ``eigenvectors`` is site ``first_site + i``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float
    gram_residual: float
    first_site: int = 0
    shift: complex = 1.0

    @property
    def size(self) -> int:
        return self.eigenvalues.size

    def component(self, site: int) -> np.ndarray:
        """``Psi_k(site)`` for every k."""
        i = site - self.first_site
        if not 0 <= i < self.size:
            raise ParameterError(f"site {site} outside the block")
        return self.eigenvectors[i]


def _cayley_eig(U: np.ndarray, lam: complex):
    n = U.shape[0]
    V = lam * U
    I = np.eye(n)
    H = 1j * scipy.linalg.solve((I + V).T, (I - V).T).T  # i (I - V)(I + V)^{-1}
    H = 0.5 * (H + H.conj().T)
    t, W = scipy.linalg.eigh(H)
    v = (1j - t) / (1j + t)
    return v / lam, W


def _shift_score(block: CmvBlock, alpha_first: int, alpha, lam: complex) -> float:
    # log|det(-conj(lam) - E)|, small when -1 is near the spectrum of lam*E
    lm, _ = char_poly_scaled(alpha, alpha_first, block.a, block.b, -np.conj(lam), block.beta, block.gamma)
    return float(lm)


def eig_unitary(block, field: VerblunskyField | None = None) -> UnitaryEigenSystem:
    """Diagonalise a fully boundary-modified block (CmvBlock or dense unitary matrix).

    When ``field`` is given, the shift is chosen by the determinant test
    ``|det(-conj(lam) - E)|``; otherwise shifts are tried in order until the
    residual contract holds.
    """
    if isinstance(block, CmvBlock):
        if not block.modified:
            raise ParameterError("eig_unitary needs a boundary-modified (unitary) block")
        U = block.dense()
        first = block.a
    else:
        U = np.asarray(block, dtype=complex)
        first = 0
        if U.ndim != 2 or U.shape[0] != U.shape[1]:
            raise ParameterError("eig_unitary needs a square matrix")
    n = U.shape[0]
    shifts = list(_SHIFTS)
    if field is not None and isinstance(block, CmvBlock):
        scores = [_shift_score(block, field.first, field.alpha, s) for s in shifts]
        # shifts comfortably away from the spectrum first, then the rest by score
        order = sorted(range(len(shifts)), key=lambda i: (scores[i] <= -5.0, i if scores[i] > -5.0 else -scores[i]))
        shifts = [shifts[i] for i in order]
    last = (float("inf"), float("inf"), None)
    for lam in shifts:
        try:
            z, W = _cayley_eig(U, lam)
        except np.linalg.LinAlgError:  # -1 is an exact eigenvalue of lam * U
            continue
        # Rayleigh refinement; z is unimodular for a unitary matrix
        UW = U @ W
        z = np.einsum("ij,ij->j", W.conj(), UW)
        z = z / np.abs(z)
        res = float(np.max(np.linalg.norm(UW - W * z, axis=0))) if n else 0.0
        gram = float(np.max(np.abs(W.conj().T @ W - np.eye(n)))) if n else 0.0
        if gram > 1e-10:
            W, _ = np.linalg.qr(W)
            gram = float(np.max(np.abs(W.conj().T @ W - np.eye(n))))
        last = (res, gram, lam)
        if res <= RESIDUAL_TOL and gram <= GRAM_TOL:
            order = np.argsort(np.angle(z), kind="stable")
            return UnitaryEigenSystem(z[order], W[:, order], res, gram, first, complex(lam))
    raise NumericalFailure(
        f"eigen-decomposition failed: residual {last[0]:.3e}, gram {last[1]:.3e} after {len(shifts)} shifts"
    )


def spectral_distance(sys_a, sys_b) -> float:
    """Minimum chordal distance ``|z_i - z_j|`` between two spectra."""
    za = np.asarray(getattr(sys_a, "eigenvalues", sys_a))
    zb = np.asarray(getattr(sys_b, "eigenvalues", sys_b))
    if za.size == 0 or zb.size == 0:
        raise ParameterError("spectral distance needs two nonempty spectra")
    return float(np.min(np.abs(za[:, None] - zb[None, :])))


@dataclass(frozen=True)
class ResonanceResult:
    n: int
    delta: float
    threshold: float
    tail_prob: float
    ci_lo: float
    ci_hi: float
    count: int
    samples: int
    master_seed: int


def _block_spectrum(alpha_row, first, a, b, beta, gamma, arc):
    f = VerblunskyField(first, alpha_row, beta, gamma).window(a, b)
    z = eig_unitary(build_block(f), f).eigenvalues
    return z if arc is None else z[arc.contains(z)]


def resonance_distances(dist: Distribution, x: int, n: int, samples: int, seed: int = 0,
                        threads: int = 1, beta=-1.0, gamma=1.0, arc: Arc | None = None) -> np.ndarray:
    """``dist(sigma(E_[x-n,x+n]), sigma(E_[x+n+1,x+3n+1]))`` per sample.

    Both blocks are boundary modified, so the left one uses coefficients at
    ``x-n .. x+n-1`` and the right one ``x+n+1 .. x+3n``: no coefficient is shared.
    With ``arc`` only eigenvalues on the arc count; an empty side gives ``inf``.
    """
    if n < 0:
        raise ParameterError("n must be nonnegative")
    lo, hi = x - n - 1, x + 3 * n + 2

    def work(idx):
        alpha = sample_batch(dist, lo, hi, seed, idx)
        out = np.empty(len(idx))
        for r, row in enumerate(alpha):
            left = _block_spectrum(row, lo, x - n, x + n, beta, gamma, arc)
            right = _block_spectrum(row, lo, x + n + 1, x + 3 * n + 1, beta, gamma, arc)
            out[r] = spectral_distance(left, right) if left.size and right.size else np.inf
        return out

    return map_chunks(work, samples, threads)


def resonance_experiment(dist: Distribution, x: int, n: int, delta: float, samples: int, seed: int = 0,
                         threads: int = 1, arc: Arc | None = None) -> ResonanceResult:
    """Frequency of ``dist(sigma_left, sigma_right) < 2 e^{-delta (2n+1)}``.

    With real coefficients and real boundary phases both odd-size blocks are
    real orthogonal and always carry an eigenvalue at +1 or -1; pass an ``arc``
    avoiding those points to look at the generic part of the spectrum.
    """
    if delta < 0:
        raise ParameterError("delta must be nonnegative")
    thr = 2.0 * math.exp(-delta * (2 * n + 1))
    d = resonance_distances(dist, x, n, samples, seed, threads, arc=arc)
    p = proportion(d < thr)
    return ResonanceResult(n, float(delta), thr, p.value, p.ci_lo, p.ci_hi, p.count, p.total, seed)
