import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cmvlab.cmv_core import (build_A, build_block, build_theta, dump_csv, read_csv, tridiagonal_entries,
                             unitarity_residual)
from cmvlab.errors import ParameterError
from cmvlab.model import VerblunskyField

from conftest import dense_A, dense_LM, random_alpha


def _field(rng, a, b, beta=-1.0, gamma=1.0):
    return VerblunskyField(a - 1, random_alpha(rng, b - a + 3), beta, gamma)


def test_theta_is_unitary():
    th = build_theta(0.3 - 0.4j)
    assert np.allclose(th.conj().T @ th, np.eye(2))


def test_free_block_example():
    # alpha = 0 with the standard boundary phases on [1, 2]
    f = VerblunskyField(0, [0, 0, 0, 0])
    E = build_block(f).dense()
    assert np.allclose(E, [[0, 1], [1, 0]])


@pytest.mark.parametrize("a,b", [(0, 5), (1, 6), (2, 2), (-3, 4), (1, 1), (5, 12)])
@pytest.mark.parametrize("dec", [(True, True), (True, False), (False, True), (False, False)])
def test_block_matches_dense(rng, a, b, dec):
    f = _field(rng, a, b, np.exp(0.7j), np.exp(-1.3j))
    blk = build_block(f, *dec)
    L, M = dense_LM(f.alpha, f.first, a, b, f.beta if dec[0] else None, f.gamma if dec[1] else None)
    assert np.allclose(blk.L.toarray(), L, atol=1e-14)
    assert np.allclose(blk.M.toarray(), M, atol=1e-14)
    assert np.allclose(blk.dense(), L @ M, atol=1e-14)
    if all(dec):
        assert unitarity_residual(blk.E) < 1e-13
        assert unitarity_residual(blk.L) < 1e-13 and unitarity_residual(blk.M) < 1e-13


@settings(max_examples=60, deadline=None)
@given(a=st.integers(-6, 6), size=st.integers(1, 20), seed=st.integers(0, 2**32 - 1),
       theta=st.floats(-3.1, 3.1), left=st.booleans(), right=st.booleans())
def test_tridiagonal_entries_property(a, size, seed, theta, left, right):
    rng = np.random.default_rng(seed)
    b = a + size - 1
    f = _field(rng, a, b, np.exp(1j * rng.uniform(-3, 3)), np.exp(1j * rng.uniform(-3, 3)))
    z = np.exp(1j * theta) * rng.uniform(0.5, 1.5)
    A = build_A(f, z, left, right)
    ref = dense_A(f.alpha, f.first, a, b, z, f.beta if left else None, f.gamma if right else None)
    assert np.allclose(A.dense(), ref, atol=1e-13)
    assert np.allclose(A.dense(), A.dense().T)  # complex symmetric


def test_parity_one_gives_B(rng):
    f = _field(rng, 2, 9)
    at = np.concatenate([[f.beta], f.alpha[1:-2], [f.gamma]])
    z = np.exp(0.4j)
    d, o = tridiagonal_entries(at, 2, z, parity=1)
    L, M = dense_LM(f.alpha, f.first, 2, 9, f.beta, f.gamma)
    B = z * M.conj().T - L
    assert np.allclose(np.diag(B), d) and np.allclose(np.diag(B, 1), o) and np.allclose(np.diag(B, -1), o)


def test_csv_roundtrip(rng, tmp_path):
    f = _field(rng, 3, 10)
    E = build_block(f).E
    text = dump_csv(E, tmp_path / "e.csv", offset=3)
    assert text.splitlines()[0] == "row,col,re,im"
    assert (tmp_path / "e.csv").read_text() == text
    back = read_csv(text, E.shape, offset=3)
    assert np.array_equal(back.toarray(), E.toarray())


def test_empty_interval():
    f = VerblunskyField(0, [0.1, 0.2, 0.3])
    with pytest.raises(ParameterError):
        build_block(f, a=3, b=2)
    with pytest.raises(ParameterError):
        build_block(f.with_boundaries(None, 1.0))
