"""Theta blocks, the L/M factors, finite extended CMV blocks and the tridiagonal A.

Theta_n acts on sites {n, n+1}; it goes into L for even n and into M for odd
n.  The finite block E_[a,b] = P E P* collects Theta_n for n in [a-1, b],
projected onto [a, b].  Boundary modification replaces alpha_{a-1} by beta and
alpha_b by gamma (rho becomes 0 there), which makes E, L and M unitary.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError
from .model import VerblunskyField, _rho_unchecked, rho

__all__ = [
    "build_theta",
    "CmvBlock",
    "build_block",
    "TridiagonalA",
    "build_A",
    "tilde_alpha",
    "tridiagonal_entries",
    "unitarity_residual",
    "dump_csv",
    "read_csv",
]


def build_theta(alpha) -> np.ndarray:
    """The 2x2 block ``[[conj(alpha), rho], [rho, -alpha]]``."""
    a = complex(alpha)
    r = rho(a)
    return np.array([[a.conjugate(), r], [r, -a]])


def tilde_alpha(alpha, first: int, a: int, b: int, beta=None, gamma=None) -> np.ndarray:
    """Coefficients for sites ``a-1..b`` with the boundary substitutions applied.

    ``alpha[..., i]`` is the coefficient at site ``first + i``; leading axes are
    batch axes.  ``beta``/``gamma`` of None leave that end unmodified.
    """
    alpha = np.asarray(alpha, dtype=complex)
    lo = a - 1 - first
    if lo < 0 or b - first >= alpha.shape[-1]:
        raise ParameterError(f"coefficients do not cover sites [{a - 1}, {b}]")
    at = alpha[..., lo : b - first + 1].copy()
    if beta is not None:
        at[..., 0] = beta
    if gamma is not None:
        at[..., -1] = gamma
    return at


def tridiagonal_entries(at: np.ndarray, a: int, z, parity: int = 0):
    """Diagonal and off-diagonal of ``z L* - M`` on ``[a, b]``.

    ``at`` holds the (already substituted) coefficients for sites ``a-1..b``.
    Off-diagonal entries use rho of the interior sites ``a..b-1`` only, so the
    boundary substitution never enters them.  ``parity=1`` swaps the roles of
    L and M and yields ``z M* - L`` instead.
    """
    at = np.asarray(at, dtype=complex)
    n = at.shape[-1] - 1
    z = np.asarray(z, dtype=complex)[..., None]
    j = a + np.arange(n)
    even = (j + parity) % 2 == 0
    prev, cur = at[..., :-1], at[..., 1:]
    diag = np.where(even, z * cur + prev, -z * np.conj(prev) - np.conj(cur))
    if n > 1:
        r = _rho_unchecked(at[..., 1:-1])
        off = np.where(even[:-1], z * r, -r + 0j)
    else:
        off = np.zeros(diag.shape[:-1] + (0,), dtype=complex)
    return diag, off


@dataclass(frozen=True, eq=False)
class CmvBlock:
    """Finite CMV block on ``[a, b]`` stored as sparse banded matrices.

    ``beta``/``gamma`` record the boundary values actually used (None when that
    end is a plain truncation).
    """

    a: int
    b: int
    E: sp.csr_array
    L: sp.csr_array
    M: sp.csr_array
    beta: complex | None
    gamma: complex | None

    @property
    def size(self) -> int:
        return self.b - self.a + 1

    @property
    def modified(self) -> bool:
        return self.beta is not None and self.gamma is not None

    def dense(self) -> np.ndarray:
        return self.E.toarray()


def _factor_entries(at: np.ndarray, a: int, b: int):
    rows = {0: [], 1: []}
    cols = {0: [], 1: []}
    vals = {0: [], 1: []}
    for k, n in enumerate(range(a - 1, b + 1)):
        al = at[k]
        r = float(_rho_unchecked(al))
        theta = ((n, n, np.conj(al)), (n, n + 1, r), (n + 1, n, r), (n + 1, n + 1, -al))
        par = n % 2
        for p, q, v in theta:
            if a <= p <= b and a <= q <= b:
                rows[par].append(p - a)
                cols[par].append(q - a)
                vals[par].append(v)
    size = b - a + 1
    L = sp.csr_array((np.array(vals[0], dtype=complex), (rows[0], cols[0])), shape=(size, size))
    M = sp.csr_array((np.array(vals[1], dtype=complex), (rows[1], cols[1])), shape=(size, size))
    return L, M


def build_block(field: VerblunskyField, modify_left: bool = True, modify_right: bool = True,
                a: int | None = None, b: int | None = None) -> CmvBlock:
    """Assemble E, L, M on ``[a, b]`` (default: the field's interval).

    With ``modify_left``/``modify_right`` the field's beta/gamma replace
    alpha_{a-1}/alpha_b.
    """
    a = field.a if a is None else a
    b = field.b if b is None else b
    if b < a:
        raise ParameterError(f"empty interval [{a}, {b}]")
    if not field.covers(a - 1, b):
        raise ParameterError(f"field window [{field.first}, {field.last}] does not cover [{a - 1}, {b}]")
    beta = field.beta if modify_left else None
    gamma = field.gamma if modify_right else None
    if (modify_left and beta is None) or (modify_right and gamma is None):
        raise ParameterError("boundary modification requested but the field records no phase")
    at = tilde_alpha(field.alpha, field.first, a, b, beta, gamma)
    L, M = _factor_entries(at, a, b)
    E = (L @ M).tocsr()
    E.eliminate_zeros()
    return CmvBlock(a, b, E, L, M, beta, gamma)


@dataclass(frozen=True, eq=False)
class TridiagonalA:
    """``A = z (L^{beta,gamma})* - M^{beta,gamma}`` on ``[a, b]``; complex symmetric."""

    a: int
    b: int
    z: complex
    diag: np.ndarray
    sub: np.ndarray
    sup: np.ndarray
    beta: complex | None
    gamma: complex | None

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub, -1) + np.diag(self.sup, 1)

    def banded(self) -> np.ndarray:
        """LAPACK ``(1, 1)`` banded layout for ``scipy.linalg.solve_banded``."""
        n = self.diag.size
        ab = np.zeros((3, n), dtype=complex)
        ab[0, 1:] = self.sup
        ab[1] = self.diag
        ab[2, :-1] = self.sub
        return ab


def build_A(field: VerblunskyField, z, modify_left: bool = True, modify_right: bool = True,
            a: int | None = None, b: int | None = None) -> TridiagonalA:
    """Tridiagonal ``A^{beta,gamma}_{[a,b],z}`` from the closed-form entries."""
    a = field.a if a is None else a
    b = field.b if b is None else b
    if b < a:
        raise ParameterError(f"empty interval [{a}, {b}]")
    beta = field.beta if modify_left else None
    gamma = field.gamma if modify_right else None
    at = tilde_alpha(field.alpha, field.first, a, b, beta, gamma)
    diag, off = tridiagonal_entries(at, a, complex(z))
    return TridiagonalA(a, b, complex(z), diag, off.copy(), off.copy(), beta, gamma)


def unitarity_residual(X) -> float:
    """``max |X* X - I|`` entrywise."""
    X = X.toarray() if sp.issparse(X) else np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ParameterError(f"unitarity residual needs a square matrix, got shape {X.shape}")
    return float(np.max(np.abs(X.conj().T @ X - np.eye(X.shape[0]))))


def dump_csv(X, out=None, offset: int = 0) -> str:
    """Nonzero entries as ``row,col,re,im`` (17 significant digits).

    Row/column labels are site indices (``offset`` is the first site).  Writes
    to ``out`` (path or text file) when given and returns the text.
    """
    X = sp.coo_array(X)
    order = np.lexsort((X.col, X.row))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "re", "im"])
    for k in order:
        v = complex(X.data[k])
        if v == 0:
            continue
        w.writerow([int(X.row[k]) + offset, int(X.col[k]) + offset, f"{v.real:.17g}", f"{v.imag:.17g}"])
    text = buf.getvalue()
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    return text


def read_csv(text: str, shape: tuple[int, int], offset: int = 0) -> sp.csr_array:
    """Inverse of :func:`dump_csv`."""
    rows, cols, vals = [], [], []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append(int(rec["row"]) - offset)
        cols.append(int(rec["col"]) - offset)
        vals.append(complex(float(rec["re"]), float(rec["im"])))
    return sp.csr_array((np.array(vals, dtype=complex), (rows, cols)), shape=shape)
