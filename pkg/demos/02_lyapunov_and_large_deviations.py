# # Lyapunov exponent and large deviations of log|P|
#
# gamma(z) from long transfer-matrix products, then the tail
# P[|(1/n) log|P| - gamma| >= eps] for growing n.

import math

import numpy as np

from cmvlab import Arc, Distribution, ldt_tail, lyapunov_estimate
from cmvlab.montecarlo import log_linear_fit

atoms = Distribution.atoms([0.5, -0.5])

# %%
# closed-form anchor: constant alpha = 0.5 at z = 1
est = lyapunov_estimate(Distribution.constant(0.5), 1.0, n=10_000, samples=1)
print("constant cocycle", est.gamma_hat, "expected", math.acosh(2 / math.sqrt(3)))

# %%
# Bernoulli coefficients over an arc
for th in Arc(0.4, 2.7).grid(6):
    e = lyapunov_estimate(atoms, np.exp(1j * th), n=5000, samples=60)
    print(f"theta {th:5.3f}  gamma {e.gamma_hat:.4f} +- {e.std_err:.4f}")

# %%
z = np.exp(1j)
g = lyapunov_estimate(atoms, z, n=10_000, samples=100)
ns = [20, 40, 80, 160]
for dec in ("left", "right", "both"):
    tails = [ldt_tail(atoms, z, g.gamma_hat / 2, (1, n), dec, 1000, g, seed=1).tail_prob for n in ns]
    fit = log_linear_fit(ns, tails)
    print(dec.ljust(6), np.round(tails, 4), f"slope {fit.slope:.4f}  R2 {fit.r2:.3f}")
