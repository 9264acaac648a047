"""Gromov-Wasserstein quadratic programs between finite metric-measure spaces."""

from .errors import GWError, InternalInconsistency, ValidationError
from .gwcore import (
    Coupling,
    GwProblem,
    build_constraints,
    build_gamma,
    build_problem,
    diagonal_coupling,
    flat_index,
    gw_distance,
    independence_coupling,
    objective,
    objective_tensor,
    qap_decompose,
)
from .kernels import BACKEND
from .mmspace import (
    Curve3D,
    MetricMeasureSpace,
    arc_length_space,
    delta_space,
    load_space,
    make_space,
)
from .oracle import OracleResult, oracle_1dof, oracle_grid
from .solvers import SolveResult, entropic_gw, frank_wolfe, multistart
from .spectral import (
    SpectralReport,
    certify_nonconvex,
    count_negative,
    eigenvalues_symmetric,
    principal_minor_2x2,
)
from .transport import ot_linear

__version__ = "0.1.0"
