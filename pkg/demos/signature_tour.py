"""
Layer operators on the sphere are diagonal
==========================================

Every scalar layer operator maps a spherical harmonic of degree n to a
multiple of itself. This script prints those multiples, compares them with a
brute-force surface quadrature, and shows that they stay finite as k -> 0.
"""

import numpy as np

from dpie.sphere_ops import ScalarOpKind, scalar_signatures
from dpie.oracle import oracle_evaluate

# closed-form signatures for the first few degrees at k = 1
k = 1.0
for op in ScalarOpKind:
    vals = scalar_signatures(op, 4, k)
    print(f"{op.value:>3}", "  ".join(f"{v.real:+.4f}{v.imag:+.4f}i" for v in vals))

# the oracle integrates the kernel over the sphere along two separate routes
res = oracle_evaluate(3, 1, k, 64)
exact = scalar_signatures(ScalarOpKind.SINGLE_LAYER, 3, k)[3]
print("\nS at n=3: closed form", exact, "oracle", res.scalar[ScalarOpKind.SINGLE_LAYER])

# the static limit is reached continuously: S -> 1/(2n+1)
n = np.arange(6)
for k in (1e-1, 1e-3, 1e-6, 0.0):
    s = scalar_signatures(ScalarOpKind.SINGLE_LAYER, 5, k)
    print(f"k={k:<6g} max |S - 1/(2n+1)| = {np.abs(s - 1 / (2 * n + 1)).max():.2e}")
