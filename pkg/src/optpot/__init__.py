"""Closest potential of a 1D Dirichlet Schrodinger operator with prescribed
lowest eigenvalues."""
from .core import (
    Grid,
    PotentialSpec,
    SampledFunction,
    inner_product,
    make_grid,
    preset_potentials,
    sample_potential,
)
from .derivative import (
    GramMatrix,
    directional_derivative,
    eigenvalue_gradient,
    finite_difference_check,
    gram_matrix,
)
from .errors import (
    ConditioningError,
    ConfigError,
    ConsistencyError,
    ConvergenceError,
    GridMismatchError,
    InputFormatError,
    InvalidArgumentError,
)
from .forward import EigenPair, Spectrum, TridiagonalOperator, assemble, count_below, lowest_eigenpairs
from .inverse import (
    InverseSolution,
    SolverOptions,
    TargetSet,
    reduced_residual,
    scf_fixed_point,
    solve_inverse,
    stationarity_residual,
)
from .verification import independence_check, minimality_oracle, system_residual

__version__ = "0.1.0"
