"""Decoupled potential integral equations for the perfectly conducting sphere.

The layer operators are diagonal in spherical harmonics on the unit sphere,
so the scalar and vector equations reduce to small per-degree systems. The
package provides the special functions, operator signatures, per-degree
systems, incoming Lorenz-gauge potentials, an end-to-end scattering solver,
spectral and conditioning studies, and two independent references: a
brute-force operator oracle and the classical Mie series.
"""

__version__ = "0.1.0"

from .analysis import (
    CLUSTER_POINTS,
    SpectrumRecord,
    SweepRecord,
    cluster_fraction,
    condition_sweep,
    mode_spectrum,
    singular_value_branches,
)
from .assembly import (
    BoundaryDataSpectrum,
    Formulation,
    ModeSystem,
    SolutionSpectrum,
    mode_system,
    solve_scalar,
    solve_vector,
    truncation_for,
)
from .errors import ConvergenceError, DomainError, SingularBlockError, TruncationError
from .incoming import (
    MultipoleKind,
    MultipoleSource,
    PlaneWave,
    gauge_audit,
    multipole_potentials,
    plane_wave_potentials,
    project_boundary_data,
)
from .mie import FieldSample, cross_sections, mie_far_field, mie_reference
from .oracle import oracle_scalar_signature, oracle_vector_block
from .scatter import (
    ScatterSolution,
    boundary_residuals,
    eval_fields,
    eval_scattered_potentials,
    gauge_link_residual,
    solve_scattering,
)
from .specfun import RadialKind, mod_radial, mod_radial_derivative
from .sphere_ops import (
    ScalarOpKind,
    scalar_signature,
    vector_L_block,
    vector_R_block,
    vector_signatures,
)

__all__ = [
    "CLUSTER_POINTS", "SpectrumRecord", "SweepRecord", "cluster_fraction",
    "condition_sweep", "mode_spectrum", "singular_value_branches",
    "BoundaryDataSpectrum", "Formulation", "ModeSystem", "SolutionSpectrum",
    "mode_system", "solve_scalar", "solve_vector", "truncation_for",
    "ConvergenceError", "DomainError", "SingularBlockError", "TruncationError",
    "MultipoleKind", "MultipoleSource", "PlaneWave", "gauge_audit",
    "multipole_potentials", "plane_wave_potentials", "project_boundary_data",
    "FieldSample", "cross_sections", "mie_far_field", "mie_reference",
    "oracle_scalar_signature", "oracle_vector_block",
    "ScatterSolution", "boundary_residuals", "eval_fields",
    "eval_scattered_potentials", "gauge_link_residual", "solve_scattering",
    "RadialKind", "mod_radial", "mod_radial_derivative",
    "ScalarOpKind", "scalar_signature", "vector_L_block", "vector_R_block",
    "vector_signatures",
]
