"""End-to-end drivers for the benchmark heat problem.

These glue the model, the schemes and the stability tools together into
the three studies the command line exposes: a single error-history run,
a step-refinement table, and a verdict sweep over the factorized
predictor-corrector weight sigma.
"""

from __future__ import annotations

from dataclasses import dataclass

from .heat import HeatProblem, build_operator, error_norm
from .reporting import ConvergenceRow, RunReport, observed_order
from .schemes import Bootstrap, Scheme, SchemeConfig, integrate
from .stability import classify, factorized_stability_function, find_sigma_threshold

__all__ = [
    "run_model",
    "convergence_table",
    "stability_report",
    "StabilityReport",
]


def run_model(scheme, M=10, N=10, T=0.5, sigma=None,
              bootstrap=Bootstrap.CRANK_NICOLSON_FIRST_LEVEL,
              rhs_treatment=None):
    """Integrate the benchmark problem and report the error at every level."""
    problem = HeatProblem(M=M, T=T)
    operator = build_operator(M)
    config = SchemeConfig(scheme=scheme, tau=T / N, steps=N, sigma=sigma,
                          bootstrap=bootstrap, rhs_treatment=rhs_treatment)

    errors = []

    def watch(n, t, y):
        errors.append(error_norm(y, t, problem))

    exact_first = None
    if (config.scheme is Scheme.THREE_LEVEL_FACTORIZED
            and config.bootstrap is Bootstrap.EXACT_FIRST_LEVEL):
        exact_first = problem.exact_grid(config.tau)

    result = integrate(config, operator, problem.initial_state(),
                       rhs_sampler=problem.forcing_grid, observer=watch,
                       exact_first_level=exact_first)

    uses_sigma = config.effective_sigma is not None
    return RunReport(
        scheme=config.scheme.value,
        M=M,
        N=N,
        tau=config.tau,
        sigma=config.effective_sigma if uses_sigma else None,
        bootstrap=(config.bootstrap.value
                   if config.scheme is Scheme.THREE_LEVEL_FACTORIZED else None),
        rhs_treatment=config.effective_rhs_treatment.value,
        times=[float(t) for t in result.times],
        errors=errors,
        energies=None if result.energies is None else [float(e) for e in result.energies],
        sigma_flagged=result.sigma_flagged,
    )


def convergence_table(scheme, M=10, n_values=(10, 20, 40), T=0.5, sigma=None,
                      bootstrap=Bootstrap.CRANK_NICOLSON_FIRST_LEVEL,
                      rhs_treatment=None):
    """Final errors and observed orders over a strictly doubling list of N."""
    n_values = [int(n) for n in n_values]
    if not n_values:
        raise ValueError("need at least one step count")
    for coarse, fine in zip(n_values, n_values[1:]):
        if fine != 2 * coarse:
            raise ValueError("step counts must double: got "
                             f"{coarse} followed by {fine}")
    rows = []
    previous_error = None
    for n in n_values:
        report = run_model(scheme, M=M, N=n, T=T, sigma=sigma,
                           bootstrap=bootstrap, rhs_treatment=rhs_treatment)
        order = None
        if previous_error is not None:
            order = observed_order(previous_error, report.final_error)
        rows.append(ConvergenceRow(N=n, final_error=report.final_error,
                                   observed_order=order))
        previous_error = report.final_error
    return rows


@dataclass
class StabilityReport:
    """Verdicts per sigma plus the two bisected stability thresholds."""

    rows: list
    three_level_threshold: float
    monotonicity_threshold: float


def stability_report(sigmas):
    """Classify the predictor-corrector amplification for each sigma."""
    rows = [(float(s), classify(factorized_stability_function(s))) for s in sigmas]
    return StabilityReport(
        rows=rows,
        three_level_threshold=find_sigma_threshold("three_level_condition"),
        monotonicity_threshold=find_sigma_threshold("factorized_monotonicity"),
    )
