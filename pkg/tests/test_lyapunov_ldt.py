import math

import numpy as np
import pytest

from cmvlab.errors import ParameterError
from cmvlab.lyapunov_ldt import (bad_set_member, bad_set_stats, craig_simon_check, craig_simon_experiment,
                                 ldt_samples, ldt_tail, lyapunov_estimate)
from cmvlab.model import Distribution, sample_field

ATOMS = Distribution.atoms([0.5, -0.5])


def test_free_exponent_is_zero():
    est = lyapunov_estimate(Distribution.constant(0), np.exp(0.7j), n=2000, samples=3)
    assert abs(est.gamma_hat) < 1e-12


def test_constant_cocycle_closed_form():
    # S_1(0.5) has eigenvalues (1 +- 0.5)/rho, so gamma = log(1.5/sqrt(0.75)) = arccosh(2/sqrt(3))
    est = lyapunov_estimate(Distribution.constant(0.5), 1.0, n=10_000, samples=1)
    assert est.gamma_hat == pytest.approx(math.acosh(2 / math.sqrt(3)), abs=1e-6)
    assert est.gamma_hat == pytest.approx(0.5493061443340549, abs=1e-6)


def test_bernoulli_positive_and_thread_invariant():
    a = lyapunov_estimate(ATOMS, np.exp(1j), n=2000, samples=40, seed=5)
    b = lyapunov_estimate(ATOMS, np.exp(1j), n=2000, samples=40, seed=5, threads=4)
    assert a == b
    assert a.gamma_hat > 5 * a.std_err and not a.possibly_exceptional


def test_ldt_samples_concentrate():
    v = ldt_samples(ATOMS, np.exp(1j), (1, 400), "both", 128, seed=2)
    g = lyapunov_estimate(ATOMS, np.exp(1j), n=4000, samples=40).gamma_hat
    assert abs(np.median(v) - g) < 0.03


def test_ldt_tail_validation():
    with pytest.raises(ParameterError):
        ldt_tail(ATOMS, 1j, 0.1, (1, 10), "both", 10, None)
    with pytest.raises(ParameterError):
        ldt_tail(ATOMS, 1j, 0.1, (1, 10), "middle", 10, 0.1)
    with pytest.raises(ParameterError):
        ldt_tail(ATOMS, 1j, 0.1, (5, 4), "both", 10, 0.1)


def test_bad_sets_are_disjoint():
    st = bad_set_stats(ATOMS, np.exp(1j), 0.05, (1, 30), "left", 300, 0.16, seed=1)
    assert st.plus_count + st.minus_count <= st.total
    f = sample_field(ATOMS, (1, 30), seed=4)
    assert bad_set_member(f, np.exp(1j), 0.0, "left", 100.0) == "minus"
    assert bad_set_member(f, np.exp(1j), 0.0, "left", -100.0) == "plus"
    assert bad_set_member(f, np.exp(1j), 1e6, "left", 0.16) == "neither"


def test_craig_simon_bound_rarely_fails():
    z = np.exp(1j)
    g = lyapunov_estimate(ATOMS, z, n=4000, samples=40).gamma_hat
    rows = craig_simon_experiment(ATOMS, z, g / 2, [20, 80], 256, g, seed=3)
    assert rows[-1].fraction <= rows[0].fraction
    f = sample_field(ATOMS, (-30, 30), seed=0)
    assert craig_simon_check(f, 0, 20, z, 10.0, g)
    with pytest.raises(ParameterError):
        craig_simon_check(f, 0, 40, z, 0.1, g)
