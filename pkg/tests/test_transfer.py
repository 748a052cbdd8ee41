import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cmvlab.errors import DomainError, ParameterError
from cmvlab.model import Distribution, VerblunskyField, sample_field
from cmvlab.transfer import (TransferState, log_norm_batch, monic_szego, norm2x2, one_step, propagate, reflect,
                             szego_polys, transfer_matrix, transfer_vs_determinant)

from conftest import dense_charpoly, random_alpha, step


def test_free_step():
    s = one_step(np.exp(0.5j), 0)
    assert np.allclose(s.entries, np.diag([np.exp(0.5j), 1]))


@settings(max_examples=100, deadline=None)
@given(theta=st.floats(-3.14, 3.14), r=st.floats(0, 0.99), phi=st.floats(-3.14, 3.14))
def test_step_det_and_su11(theta, r, phi):
    z, al = cmath.exp(1j * theta), r * cmath.exp(1j * phi)
    s = one_step(z, al)
    assert s.det == pytest.approx(z, abs=1e-9)
    assert s.su11_residual() < 1e-9
    u, v = s.su11()
    assert abs(u) ** 2 - abs(v) ** 2 == pytest.approx(1, abs=1e-9)


def test_step_rejects_bad_input():
    with pytest.raises(ParameterError):
        one_step(0, 0.1)
    with pytest.raises(DomainError):
        one_step(1, 1.0)


def test_norm2x2_matches_svd(rng):
    m = rng.normal(size=(20, 2, 2)) + 1j * rng.normal(size=(20, 2, 2))
    assert np.allclose(norm2x2(m), np.linalg.norm(m, 2, axis=(1, 2)))


def test_propagation_matches_product(rng):
    f = VerblunskyField(-1, random_alpha(rng, 32))
    z = np.exp(1.2j)
    T = np.eye(2)
    for j in range(0, 30 + 1):
        T = step(z, f[j]) @ T
    st_ = transfer_matrix(f, z, 0, 30)
    assert np.allclose(st_.materialize(), T, rtol=1e-12)
    assert st_.step_count == 31
    assert st_.log_norm == pytest.approx(np.log(np.linalg.norm(T, 2)))
    # splitting the product is associative
    mid = transfer_matrix(f, z, 0, 12)
    assert np.allclose(propagate(mid, f.alpha[14:32], z).materialize(), T, rtol=1e-12)


def test_log_norm_batch_matches_scalar(rng):
    alpha = random_alpha(rng, 3 * 200).reshape(3, 200)
    z = np.exp(0.8j)
    ref = [propagate(TransferState.identity(), row, z).log_norm for row in alpha]
    assert np.allclose(log_norm_batch(alpha, z), ref, rtol=1e-12)


def test_long_product_does_not_overflow():
    f = sample_field(Distribution.atoms([0.5, -0.5]), (1, 20000), seed=0)
    ln = transfer_matrix(f, np.exp(1j)).log_norm
    assert np.isfinite(ln) and 0.1 * 20000 < ln < 0.25 * 20000


def test_szego_recurrence(rng):
    f = VerblunskyField(-1, random_alpha(rng, 14))
    z = np.exp(-0.6j)
    pairs = szego_polys(f, z, 12)
    assert complex(pairs[1].monic()) == pytest.approx(z - np.conj(f[0]))
    for n in (1, 5, 12):
        Phi, Phis = monic_szego(f.alpha[1:n + 1], z)
        assert complex(pairs[n].monic()) == pytest.approx(Phi, rel=1e-12)
        assert complex(pairs[n].monic_star()) == pytest.approx(Phis, rel=1e-12)
        # the reversed polynomial on the circle
        assert reflect(Phi, z, n) == pytest.approx(Phis, rel=1e-12)


def test_monic_is_left_decorated_determinant(rng):
    alpha = random_alpha(rng, 12)
    z = np.exp(2.1j)
    for n in range(1, 10):
        Phi, _ = monic_szego(alpha[1:n + 1], z)
        assert Phi == pytest.approx(dense_charpoly(alpha, -1, 0, n - 1, z, -1.0, None), rel=1e-11)


@settings(max_examples=50, deadline=None)
@given(a=st.integers(-5, 5), size=st.integers(1, 40), seed=st.integers(0, 2**32 - 1))
def test_transfer_determinant_identity(a, size, seed):
    rng = np.random.default_rng(seed)
    b = a + size - 1
    f = VerblunskyField(a - 1, random_alpha(rng, size + 2))
    assert transfer_vs_determinant(f, np.exp(1j * rng.uniform(-3, 3))) < 1e-9


def test_identity_needs_unit_circle(rng):
    f = VerblunskyField(-1, random_alpha(rng, 6))
    with pytest.raises(ParameterError):
        transfer_vs_determinant(f, 0.5)
