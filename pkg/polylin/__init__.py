from .bases import LinearizationKind, Pencil, linearization_directory
from .config import DEFAULT_TOLERANCES, Tolerances
from .exceptions import PolylinException
from .experiment import Experiment, ExperimentConfig
from .linearize import build, build_C1, build_D1, build_Dk, build_R, build_T, verify_strong_linearization
from .matpoly import MatrixPolynomial, random_polynomial
from .metrics import (
    backward_error_left,
    backward_error_pencil,
    backward_error_right,
    cond_number,
    cond_number_pencil,
    diagnose,
    growth_factors,
)
from .recover import EigenTriple, lift, recover
from .report import DiagnosticsTable, plot_ratios
from .scaling import ScalingSpec, max_norm_scaling, tropical_scalings
from .solve import oracle_problem, polyeig, solve_pencil
