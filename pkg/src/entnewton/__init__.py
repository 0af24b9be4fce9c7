"""Entropy-regularized softmax regression with (approximate) Newton solvers."""

from .errors import (
    ConfigError, DegenerateWeightError, EntNewtonError, ExpOverflowError,
    IndefiniteHessianError, InputShapeError, NumericalError, ParseError,
    PreconditionError, RankError, SymmetryError, VersionError,
)
from .kernel import Evaluation, ProblemInstance, evaluate, min_weight_squared, weights_satisfy
from .calculus import (
    GradientBundle, HessianParts, build_B1, build_B2, build_hessian,
    finite_difference_oracle, grad_total,
)
from .sketch import SampledDiagonal, leverage_scores, subsample, verify_spectral
from .solver import (
    SolverConfig, SolverTrace, estimate_M, newton_step_approx, newton_step_exact,
    solve, surrogate_diagonal,
)

__version__ = "0.1.0"
