# # Finite CMV blocks and their determinants
#
# Build a boundary-modified block from random coefficients, look at its
# five-diagonal shape, and compare the characteristic determinant with
# the tridiagonal A = z L* - M.

import numpy as np

from cmvlab import Distribution, build_A, build_block, det_A, det_P, sample_field, unitarity_residual

# %%
dist = Distribution.atoms([0.5, -0.5])
f = sample_field(dist, (1, 12), beta=-1.0, gamma=1.0, seed=3)
blk = build_block(f)
print("block size", blk.size, "on sites", (blk.a, blk.b))
print("unitarity residual", unitarity_residual(blk.E))

# nonzero pattern: every row touches at most five columns
pattern = (np.abs(blk.dense()) > 0).astype(int)
print(pattern)

# %%
# det(z - E) against numpy, and |det A| which agrees in modulus
z = np.exp(0.8j)
p = det_P(f, z)
ref = np.linalg.det(z * np.eye(blk.size) - blk.dense())
print("det(z - E)      ", complex(p.script_P))
print("numpy           ", ref)
print("|det A|         ", abs(det_A(f, z)))
print("normalized |P|  ", abs(p.normalized_P))

# %%
# A is tridiagonal and complex symmetric
A = build_A(f, z).dense()
print("symmetric:", np.allclose(A, A.T), " bandwidth:", max(abs(i - j) for i, j in zip(*np.nonzero(A))))

# %%
# long intervals stay finite thanks to the log-scaled recurrence
g = sample_field(dist, (1, 20000), seed=1)
big = det_P(g, z)
print("log|P| over 20000 sites:", big.normalized_P.log_mag, " per site:", big.normalized_P.log_mag / 20000)
