"""loplab: uniform vs weak stability of rectilinear shock waves in 2D
compressible isentropic elastodynamics.

The closed-form stability condition k < k1 + k2 and an independently
constructed Lopatinski determinant with numerical root search are both
implemented and must agree; any mismatch raises
:class:`~loplab.classify.DisagreementError`.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .classify import (
    DisagreementError,
    Stability,
    StabilityVerdict,
    SweepAxis,
    SweepSpec,
    classify_closed_form,
    classify_full,
    sweep,
    sweep_spec_from_dict,
)
from .dispersion import (
    NO_REAL_BRANCH,
    BranchAmbiguity,
    DegeneratePolynomial,
    FrequencyPoint,
    NoRealBranch,
    delta_pm,
    dispersion_residual,
    full_dispersion_roots,
    hersh_candidates,
    lambda_plus,
    lambda_plus_limit,
)
from .lopatinski import (
    BranchMismatch,
    LopatinskiMatrix,
    RootRecord,
    SingularSelection,
    TransitionPoints,
    boundary_root_scan,
    build_determinant,
    closed_form_determinant,
    count_zeros_rectangle,
    find_boundary_roots,
    reduced_residual,
    scan_interior_roots,
    transition_points,
)
from .params import (
    AdmissibilityReport,
    DerivedQuantities,
    NonHyperbolicPoint,
    ShockParameters,
    check_lax,
    derive,
)
from .system import (
    UNKNOWN_ORDER,
    BoundaryKernel,
    SystemMatrices,
    assemble_boundary,
    assemble_interior,
    assemble_system,
    boundary_kernel,
    boundary_operator,
    boundary_residual,
)

__all__ = [
    "__version__",
    "ShockParameters",
    "DerivedQuantities",
    "AdmissibilityReport",
    "NonHyperbolicPoint",
    "derive",
    "check_lax",
    "UNKNOWN_ORDER",
    "SystemMatrices",
    "BoundaryKernel",
    "assemble_interior",
    "assemble_boundary",
    "assemble_system",
    "boundary_kernel",
    "boundary_operator",
    "boundary_residual",
    "FrequencyPoint",
    "NoRealBranch",
    "NO_REAL_BRANCH",
    "DegeneratePolynomial",
    "BranchAmbiguity",
    "dispersion_residual",
    "full_dispersion_roots",
    "hersh_candidates",
    "lambda_plus",
    "lambda_plus_limit",
    "delta_pm",
    "LopatinskiMatrix",
    "RootRecord",
    "TransitionPoints",
    "SingularSelection",
    "BranchMismatch",
    "build_determinant",
    "closed_form_determinant",
    "reduced_residual",
    "transition_points",
    "find_boundary_roots",
    "boundary_root_scan",
    "scan_interior_roots",
    "count_zeros_rectangle",
    "Stability",
    "StabilityVerdict",
    "DisagreementError",
    "classify_closed_form",
    "classify_full",
    "SweepAxis",
    "SweepSpec",
    "sweep",
    "sweep_spec_from_dict",
]
