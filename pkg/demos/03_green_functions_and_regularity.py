# # Green's functions, regular sites and the two-point dichotomy
#
# |G(x, y)| from minors of A, checked against a banded solve; then how
# often two distant sites are both singular at the same energy.

import numpy as np

from cmvlab import Arc, Distribution, green_direct, green_entry, is_regular, lyapunov_estimate, sample_field
from cmvlab import two_point_experiment

atoms = Distribution.atoms([0.5, -0.5])
f = sample_field(atoms, (-30, 30), seed=11)
z = np.exp(1.3j)

# %%
G = green_direct(f, z)
for x, y in [(-30, 30), (-5, 5), (0, 0), (10, 29)]:
    print((x, y), abs(green_entry(f, z, x, y).value), abs(G[x + 30, y + 30]))

# %%
# off-diagonal decay along a row
row = np.abs(G[30])
print("log|G(0, y)| every 5 sites:", np.round(np.log(row[::5]), 2))

# %%
g = lyapunov_estimate(atoms, z, 5000, 60)
for n in (5, 10, 20):
    v = is_regular(f, 0, n, z, g.gamma_hat / 2)
    print(f"n {n:2d} regular {v.regular}  edges {v.left_green_logmag:.2f} {v.right_green_logmag:.2f}")

# %%
zs = np.exp(1j * Arc(0.4, 2.7).grid(4))
gam = [lyapunov_estimate(atoms, w, 5000, 60) for w in zs]
nu = min(e.gamma_hat for e in gam)
for n in (5, 10, 20):
    r = two_point_experiment(atoms, 0, n, zs, nu / 4, gam, 300, seed=2)
    print(f"n {n:2d} both singular for some z: {r.frac_any_z:.3f}  near spectrum: {r.close_fraction:.3f}")
