"""Riccati equations with unbounded-style coefficients via dichotomous
Hamiltonian matrices: spectral projections, graph solutions and sampled
certificates."""

__version__ = "0.1.0"

from ._errors import (  # noqa: E402
    DichoRiccError,
    HypothesisFailure,
    InputError,
    NotAGraph,
    NumericalError,
)
from .certify import certify_bisectorial, certify_sectorial, dichotomy_gap, enclosure_check  # noqa: E402
from .dichotomy import (  # noqa: E402
    compute_projections,
    projections_eigen_order,
    projections_quadrature,
    projections_sign_newton,
    verify_decomposition,
)
from .estimators import RiccatiSolver, SpectralProjector  # noqa: E402
from .operator_model import HamiltonianSystem, KreinSymmetry, assemble_hamiltonian  # noqa: E402
from .riccati import (  # noqa: E402
    bound_L,
    dual_solve,
    extract_graph,
    kernel_condition,
    riccati_residual,
    solve,
    uniqueness_check,
    verify_krein,
)
from .subordination import diag_p_dominance, estimate_subordination  # noqa: E402
