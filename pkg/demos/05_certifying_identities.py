# # Certifying the algebraic identities
#
# Randomized checks of the relations between E, L, M, A, determinants,
# Green's functions and transfer matrices.  Each report carries the seed
# of its worst instance.

from cmvlab import run_correction_suite, run_identity_suite

for rep in run_identity_suite(200, master_seed=1):
    print(f"{rep.check_name:22s} failures {rep.failures:3d}/{rep.trials}  worst {rep.worst_error:.2e}")

print()
for rep in run_correction_suite(100, master_seed=1):
    print(f"{rep.check_name:22s} failures {rep.failures:3d}/{rep.trials}  worst {rep.worst_error:.2e}")
    for k, v in sorted(rep.diagnostics.items()):
        print(f"    {k}: {v:.2e}")
