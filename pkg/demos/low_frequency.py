"""
Scattering down to zero frequency
=================================

The same solver runs at k = 0, where the problem becomes electrostatics plus
magnetostatics. Fields at small k approach the static ones continuously, and
the gauge link between the scattered potentials holds at every frequency.
"""

import numpy as np

from dpie import PlaneWave, boundary_residuals, eval_fields, solve_scattering

x = np.array([[1.5, 0.2, 0.3], [0.0, 0.0, -3.0], [2.0, 2.0, 1.0]])
pol, u = [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]

static = eval_fields(solve_scattering(PlaneWave(pol, u, 0.0)), x)
print("static scattered E at the first point:", np.round(static.E[0].real, 6))

for k in (1e-1, 1e-2, 1e-4, 1e-6):
    sol = solve_scattering(PlaneWave(pol, u, k))
    F = eval_fields(sol, x)
    res = boundary_residuals(sol)
    rel = np.abs(F.E - static.E).max() / np.abs(static.E).max()
    print(f"k={k:<6g} |E - E_static|/|E_static| = {rel:.1e}  "
          f"gauge link {res['gauge_link']:.1e}  net charge {res['net_charge']:.1e}")
