"""
Three cluster points of the scaled vector equation
==================================================

The scaled vector system has three eigenvalue branches per degree. They head
for 0.5, 0.5 + 0.5i and 0.5 - 0.5i, but only at rate k / (2n + 1), so at
k = 10 the clustering is visible only well past n = 100.
"""

import numpy as np

from dpie import CLUSTER_POINTS, cluster_fraction, mode_spectrum, singular_value_branches

k = 10.0
rec = mode_spectrum("dpiev-scaled", k, 200)
pts = np.asarray(CLUSTER_POINTS)

print(" n   eigenvalues                                        dist*(2n+1)/k")
for n in (5, 20, 60, 100, 200):
    lam = np.array([l for m, l in rec.eigenvalues if m == n])
    dist = np.abs(lam[:, None] - pts[None]).min(axis=1).max()
    row = "  ".join(f"{l.real:.3f}{l.imag:+.3f}i" for l in lam)
    print(f"{n:3d}  {row:50s} {dist * (2 * n + 1) / k:.3f}")

for lo in (20, 60, 100, 120):
    print(f"fraction within 0.05 for n in [{lo}, 200]: {cluster_fraction(rec, n_range=(lo, 200)):.2f}")

# singular values sort into three branches as well
degrees, sv = singular_value_branches(rec)
print("\nsingular values at n = 200:", np.round(sv[degrees == 200][0], 4))
