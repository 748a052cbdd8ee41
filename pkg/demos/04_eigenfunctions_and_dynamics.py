# # Localized eigenfunctions and dynamical localization
#
# Diagonalize a size-1000 block through the Cayley transform, fit decay
# rates of eigenvectors, and average the EDL kernel over samples.

import numpy as np

from cmvlab import (Arc, Distribution, VerblunskyField, build_block, edl_experiment, edl_kernel, eig_unitary,
                    localize_eigenfunctions, sample_field)

atoms = Distribution.atoms([0.5, -0.5])
arc = Arc(0.4, 2.7)

# %%
f = sample_field(atoms, (1, 1000), seed=0)
sy = eig_unitary(build_block(f), f)
print("residual", sy.residual, "orthogonality", sy.gram_residual)

prof = localize_eigenfunctions(sy, arc)
rates = np.array([p.decay_rate for p in prof])
r2 = np.array([p.fit_r2 for p in prof])
print(len(prof), "eigenvectors on the arc; median rate", np.median(rates), "share with R2 >= 0.8", np.mean(r2 >= 0.8))

# %%
# free coefficients give extended states, no decay
free = VerblunskyField(0, np.zeros(1002))
prof0 = localize_eigenfunctions(build_block(free), arc)
print("free median |rate|", np.median(np.abs([p.decay_rate for p in prof0])))

# %%
print("kernel(p, p) over the whole circle:", edl_kernel(sy, Arc.full(), 500, 500))
res = edl_experiment(atoms, 400, arc, 150, range(10, 101, 10), 10, seed=1)
for row in res.rows:
    print(f"offset {row.offset:3d}  mean kernel {row.mean_kernel:.2e}")
print("fitted rate", res.rate, "CI", res.rate_ci)
