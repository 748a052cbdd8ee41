import numpy as np
import pytest

from cmvlab.cmv_core import build_block
from cmvlab.determinants import green_direct
from cmvlab.errors import ParameterError, SingularSystemError
from cmvlab.lyapunov_ldt import lyapunov_estimate
from cmvlab.localization import (SENTINEL_RATE, edl_conditioned, edl_experiment, edl_kernel, is_regular,
                                 localization_center, localize_eigenfunctions, profile_from_vector,
                                 two_point_experiment)
from cmvlab.model import Arc, Distribution, VerblunskyField, sample_field
from cmvlab.spectra import eig_unitary

ATOMS = Distribution.atoms([0.5, -0.5])


def test_regularity_uses_green_edges():
    f = sample_field(ATOMS, (-12, 12), seed=5)
    z = np.exp(1j)
    v = is_regular(f, 0, 10, z, 0.05)
    G = green_direct(f.window(-10, 10), z)
    assert v.left_green_logmag == pytest.approx(np.log(abs(G[10, 0])), abs=1e-9)
    assert v.right_green_logmag == pytest.approx(np.log(abs(G[10, 20])), abs=1e-9)
    assert v.regular == (max(v.left_green_logmag, v.right_green_logmag) <= -0.05 * 10)
    assert is_regular(f, 0, 10, z, -100).regular and not is_regular(f, 0, 10, z, 100).regular


def test_regularity_eigenvalue_hit():
    f = sample_field(ATOMS, (-6, 6), seed=1)
    ev = eig_unitary(build_block(f.window(-5, 5)), f).eigenvalues
    with pytest.raises(SingularSystemError):
        is_regular(f, 0, 5, ev[3], 0.1)
    v = is_regular(f, 0, 5, ev[3], 0.1, rotate_on_hit=True)
    assert v.rotated and v.z != ev[3]
    with pytest.raises(ParameterError):
        is_regular(f, 0, 7, 1j, 0.1)


def test_two_point_validation_and_determinism():
    zs = np.exp(1j * np.array([0.8, 1.6]))
    g = [0.15, 0.16]
    with pytest.raises(ParameterError):
        two_point_experiment(ATOMS, 0, 5, zs, 0.08, g, 10)
    with pytest.raises(ParameterError):
        two_point_experiment(ATOMS, 0, 5, zs, 0.01, [0.15], 10)
    r1 = two_point_experiment(ATOMS, 0, 5, zs, 0.03, g, 100, seed=2)
    r2 = two_point_experiment(ATOMS, 0, 5, zs, 0.03, g, 100, seed=2, threads=4)
    assert r1 == r2
    assert r1.frac_worst_z <= r1.frac_any_z and r1.close_cases <= r1.singular_cases
    assert sum(r1.per_z_counts) / (2 * 100) == pytest.approx(r1.frac_mean_z)


def test_two_point_fraction_decreases():
    z = np.exp(1j)
    g = lyapunov_estimate(ATOMS, z, 4000, 40)
    rs = [two_point_experiment(ATOMS, 0, n, [z], g.gamma_hat / 4, [g], 300, seed=1) for n in (5, 20)]
    assert rs[1].frac_any_z < rs[0].frac_any_z


def test_profile_of_exact_exponential():
    x = np.arange(200)
    psi = np.exp(-0.3 * np.abs(x - 80)) * np.exp(0.4j * x)
    p = profile_from_vector(psi, first_site=10)
    assert p.center == 90 and localization_center(psi, 10) == 90
    assert p.decay_rate == pytest.approx(-0.3, abs=1e-9) and p.fit_r2 == pytest.approx(1.0)
    assert profile_from_vector(np.eye(20)[3]).decay_rate == SENTINEL_RATE


def test_random_profiles_decay_free_profiles_do_not():
    arc = Arc(1.2, 1.9)
    f = sample_field(ATOMS, (1, 300), seed=0)
    prof = localize_eigenfunctions(eig_unitary(build_block(f), f), arc)
    rates = np.array([p.decay_rate for p in prof])
    assert np.median(rates) < -0.05
    free = VerblunskyField(0, np.zeros(302))
    prof0 = localize_eigenfunctions(build_block(free), arc)
    assert np.median(np.abs([p.decay_rate for p in prof0])) < 0.005


def test_edl_kernel_completeness():
    f = sample_field(ATOMS, (1, 80), seed=9)
    sy = eig_unitary(build_block(f), f)
    for p in (1, 40, 80):
        assert edl_kernel(sy, Arc.full(), p, p) == pytest.approx(1.0, abs=1e-9)
    # the conditioned sums over all centers add up to the diagonal weight
    tot = sum(edl_conditioned(sy, Arc.full(), 30, y) for y in range(1, 81))
    assert tot == pytest.approx(1.0, abs=1e-9)


def test_edl_experiment_small():
    r = edl_experiment(ATOMS, 120, Arc(0.4, 2.7), 40, [5, 10, 20, 30], 6, seed=1)
    assert len(r.rows) == 4 and r.samples == 6
    assert r.rows[0].mean_kernel > r.rows[-1].mean_kernel
    with pytest.raises(ParameterError):
        edl_experiment(ATOMS, 50, Arc(0.4, 2.7), 40, [20], 2)
