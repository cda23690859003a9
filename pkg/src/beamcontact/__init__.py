"""Solvers for the fourth-order beam boundary value problem w'''' = f(x, w)
with deflection and moment data at both ends, specialized to right-hand
sides that are bounded above and non-increasing in w (contact forces).
"""

from .model import (
    BVPSpec,
    GeneralMonotone,
    PiecewiseLinearContact,
    ValidationReport,
    as_general_monotone,
    eval_rhs,
    quartic_coefficients,
    quartic_solution,
    rhs_bound,
    validate_rhs,
)
from .discretize import (
    BandedSPD,
    DiscreteSystem,
    Grid,
    NotPositiveDefiniteError,
    banded_cholesky_solve,
    build_grid,
    build_system,
    discrete_residual,
    fourth_diff_matrix,
    load_vector,
    stencil_eigenvalues,
)
from .greens import (
    PicardReport,
    QuadGrid,
    SampledFunction,
    apply_operator,
    contraction_gate,
    greens_fourth,
    greens_second,
    kernel_matrix,
    picard_reference,
    simpson_grid,
)
from .solvers import (
    IterationReport,
    NumericalError,
    apriori_bound,
    contact_map,
    contraction_constant,
    solve_contact,
    solve_contact_gap,
    solve_monotone,
)
from .truncation import fifth_derivative_contact, truncation_vector
from .expressions import Expression, ParseError, parse_expression
from .config import ConfigError, StudyConfig, load_config, parse_config

__version__ = "0.1.0"
