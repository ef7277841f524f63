"""Implicit time integration for du/dt + A u = f with self-adjoint positive
definite A, built around factorized second-order schemes whose amplification
mimics the monotone decay of the exact evolution, plus the tools to verify
that claim: stability-function classification, threshold bisection, and a
benchmark heat problem with a closed-form solution.
"""

from .operators import (
    DimensionMismatch,
    GridFunction,
    NumericalError,
    OperatorPolynomial,
    SpdOperator,
    inner_product,
    norm,
)
from .schemes import (
    SM_SIGMA_MIN,
    THREE_LEVEL_SIGMA_MIN,
    Bootstrap,
    IntegrationResult,
    RhsTreatment,
    Scheme,
    SchemeConfig,
    integrate,
    step_backward_euler,
    step_crank_nicolson,
    step_predictor_corrector,
    step_sm2_direct,
    step_three_level,
    three_level_energy,
)
from .stability import (
    RationalFunction,
    StabilityVerdict,
    classify,
    factorized_stability_function,
    find_sigma_threshold,
    pade_approximant,
    pade_polynomials,
    pade_remainder_order,
    scheme_stability_function,
)
from .heat import (
    DEFAULT_DECAY_RATE,
    HeatProblem,
    build_operator,
    error_norm,
    exact_solution,
    forcing,
)
from .reporting import ConvergenceRow, RunReport, observed_order
from .experiments import StabilityReport, convergence_table, run_model, stability_report

__version__ = "0.1.0"

__all__ = [
    "DimensionMismatch",
    "GridFunction",
    "NumericalError",
    "OperatorPolynomial",
    "SpdOperator",
    "inner_product",
    "norm",
    "SM_SIGMA_MIN",
    "THREE_LEVEL_SIGMA_MIN",
    "Bootstrap",
    "IntegrationResult",
    "RhsTreatment",
    "Scheme",
    "SchemeConfig",
    "integrate",
    "step_backward_euler",
    "step_crank_nicolson",
    "step_predictor_corrector",
    "step_sm2_direct",
    "step_three_level",
    "three_level_energy",
    "RationalFunction",
    "StabilityVerdict",
    "classify",
    "factorized_stability_function",
    "find_sigma_threshold",
    "pade_approximant",
    "pade_polynomials",
    "pade_remainder_order",
    "scheme_stability_function",
    "DEFAULT_DECAY_RATE",
    "HeatProblem",
    "build_operator",
    "error_norm",
    "exact_solution",
    "forcing",
    "ConvergenceRow",
    "RunReport",
    "observed_order",
    "StabilityReport",
    "convergence_table",
    "run_model",
    "stability_report",
]
