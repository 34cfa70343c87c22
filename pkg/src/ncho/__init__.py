"""Spectra of oscillators with noncommuting 2x2 matrix coefficients.

The operator couples two scalar channels through a pair of positive
definite Hermitian matrices.  The package reduces a pair to canonical
coordinates, assembles the block-tridiagonal parity sectors, solves their
truncations, constructs the finite-support eigenpairs that exist on special
parameter manifolds, and maps those manifolds over parameter space.
"""

from . import errors
from .closed_form import (
    BetaRoot,
    ClosedFormSolution,
    Sign,
    beta_roots,
    construct_phi,
    lambda_even,
    lambda_odd,
    membership_even,
    membership_odd,
    residual_even,
    residual_odd,
    state_residual,
    verify_eigenpair,
)
from .eigensolver import hermitian_eigh
from .hermite import default_grid, hermite_eval, hermite_table
from .matrix_core import (
    CanonicalParams,
    HermitianPair,
    canonicalize,
    commutator_norm,
    eig2,
    from_tetrad,
    m_alpha,
    n_alpha,
    validate_pair,
)
from .operator_assembly import (
    CoeffVector,
    Parity,
    SectorOperator,
    apply_operator,
    assemble_sector,
    reconstruct,
)
from .regions import (
    FAMILY_NAMES,
    RegionSample,
    ScanGrid,
    classify_point,
    export_grid,
    family_index,
    parametric_family_even,
    parametric_family_odd,
    parse_grid,
    residual_mesh,
    scan_grid,
    solve_on_ray,
)
from .spectral import (
    ConvergenceStudy,
    SpectralResult,
    commutative_spectrum,
    convergence_study,
    full_spectrum,
    spectrum_of_pair,
    tail_mass,
    truncated_spectrum,
    weyl_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "BetaRoot",
    "CanonicalParams",
    "ClosedFormSolution",
    "CoeffVector",
    "ConvergenceStudy",
    "FAMILY_NAMES",
    "HermitianPair",
    "Parity",
    "RegionSample",
    "ScanGrid",
    "SectorOperator",
    "Sign",
    "SpectralResult",
    "apply_operator",
    "assemble_sector",
    "beta_roots",
    "canonicalize",
    "classify_point",
    "commutative_spectrum",
    "commutator_norm",
    "construct_phi",
    "convergence_study",
    "default_grid",
    "eig2",
    "errors",
    "export_grid",
    "family_index",
    "from_tetrad",
    "full_spectrum",
    "hermite_eval",
    "hermite_table",
    "hermitian_eigh",
    "lambda_even",
    "lambda_odd",
    "m_alpha",
    "membership_even",
    "membership_odd",
    "n_alpha",
    "parametric_family_even",
    "parametric_family_odd",
    "parse_grid",
    "reconstruct",
    "residual_even",
    "residual_mesh",
    "residual_odd",
    "scan_grid",
    "solve_on_ray",
    "spectrum_of_pair",
    "state_residual",
    "tail_mass",
    "truncated_spectrum",
    "validate_pair",
    "verify_eigenpair",
    "weyl_bounds",
]
