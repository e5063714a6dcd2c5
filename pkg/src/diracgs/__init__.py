"""Spectral ground-state solver for a nonlinear Dirac equation on a
periodic box, with a diagnostics suite for the underlying identities."""

from .algebra import ALPHA, BETA, SIGMA, dirac_symbol, projector_pm, symbol_eigenvalue
from .diagnostics import (DiagnosticsReport, run_suite, superlevel_measure,
                          tail_fraction)
from .energy import (EnergyBreakdown, derivative_along, energy,
                     nehari_identity_gap, residual_l2)
from .errors import (ConfigError, DegenerateFiberError, DiracgsError,
                     GridMismatchError, MaxIterationsError,
                     ModelValidationError, ReprMismatchError, UniquenessError)
from .field import (Grid, SpinorField, apply_dirac, dft_forward, dft_inverse,
                    graph_inner, graph_norm, graph_normalize, l2_inner,
                    l2_norm, lambda_table, lq_norm, make_field, project_pm,
                    random_field, to_frequency, to_physical, zero_field)
from .model import (ConditionReport, Nonlinearity, PotentialPair,
                    ProblemModel, F_eval, check_f_conditions,
                    check_vk_conditions, constant_pair, cq_constant,
                    decay_pair, default_model, f_eval, table_pair,
                    validate_model)
from .nehari import (InnerOptions, NehariPoint, NehariResidual,
                     criticality_residual, estimate_embedding_constant,
                     fiber_point_field, gamma, inner_maximize,
                     mountain_pass_constants, nehari_residual,
                     reduced_gradient, reduced_value, scalar_h)
from .solver import (GroundStateResult, SolveOptions, TraceRow,
                     initial_guess, minimize_ground_state, refine)

__version__ = "0.1.0"

__all__ = [
    "ALPHA", "BETA", "SIGMA", "dirac_symbol", "projector_pm",
    "symbol_eigenvalue",
    "Grid", "SpinorField", "apply_dirac", "dft_forward", "dft_inverse",
    "graph_inner", "graph_norm", "graph_normalize", "l2_inner", "l2_norm",
    "lambda_table", "lq_norm", "make_field", "project_pm", "random_field",
    "to_frequency", "to_physical", "zero_field",
    "Nonlinearity", "PotentialPair", "ProblemModel", "ConditionReport",
    "check_f_conditions", "check_vk_conditions", "constant_pair",
    "cq_constant", "decay_pair", "default_model", "f_eval", "F_eval",
    "table_pair", "validate_model",
    "EnergyBreakdown", "energy", "residual_l2", "derivative_along",
    "nehari_identity_gap",
    "InnerOptions", "NehariPoint", "NehariResidual", "criticality_residual",
    "estimate_embedding_constant", "fiber_point_field", "gamma",
    "inner_maximize", "mountain_pass_constants", "nehari_residual",
    "reduced_gradient", "reduced_value", "scalar_h",
    "SolveOptions", "GroundStateResult", "TraceRow", "initial_guess",
    "minimize_ground_state", "refine",
    "DiagnosticsReport", "run_suite", "tail_fraction", "superlevel_measure",
    "DiracgsError", "GridMismatchError", "ReprMismatchError",
    "DegenerateFiberError", "MaxIterationsError", "UniquenessError",
    "ModelValidationError", "ConfigError",
]
