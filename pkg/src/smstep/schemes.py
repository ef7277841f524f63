"""Implicit time-stepping kernels and the level-by-level integration driver.

All schemes march the evolution problem du/dt + A u = f(t) with a
self-adjoint positive definite operator A.  Besides the classical fully
implicit and symmetric two-level schemes, the module provides a direct
second-order scheme that solves a quadratic operator polynomial, and two
factorized variants (a three-level scheme and a predictor-corrector
scheme) that reach the same accuracy using only first-degree shifted
solves (E + sigma tau A) x = b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .operators import GridFunction, OperatorPolynomial, SpdOperator, inner_product

__all__ = [
    "THREE_LEVEL_SIGMA_MIN",
    "SM_SIGMA_MIN",
    "Scheme",
    "Bootstrap",
    "RhsTreatment",
    "SchemeConfig",
    "IntegrationResult",
    "step_backward_euler",
    "step_crank_nicolson",
    "step_sm2_direct",
    "step_three_level",
    "step_predictor_corrector",
    "three_level_energy",
    "integrate",
]

THREE_LEVEL_SIGMA_MIN = math.sqrt(3.0 / 8.0)
"""Weight below which the three-level difference energy loses definiteness."""

SM_SIGMA_MIN = 1.0 / math.sqrt(2.0)
"""Weight below which the predictor-corrector amplification stops decreasing."""


class Scheme(str, Enum):
    BACKWARD_EULER = "backward_euler"
    CRANK_NICOLSON = "crank_nicolson"
    SM2_DIRECT = "sm2_direct"
    THREE_LEVEL_FACTORIZED = "three_level_factorized"
    PREDICTOR_CORRECTOR_FACTORIZED = "predictor_corrector_factorized"


class Bootstrap(str, Enum):
    """How a three-level run obtains its first computed level."""

    EXACT_FIRST_LEVEL = "exact_first_level"
    CRANK_NICOLSON_FIRST_LEVEL = "crank_nicolson_first_level"


class RhsTreatment(str, Enum):
    """How the forcing sample enters a step.

    midpoint feeds f(t + tau/2) straight in; lifted_midpoint premultiplies
    it by (E + tau A / 2), which keeps the second-order schemes that carry
    an (E + ... ) factor on the time derivative at full accuracy.
    """

    MIDPOINT = "midpoint"
    LIFTED_MIDPOINT = "lifted_midpoint"


_DEFAULT_SIGMA = {
    Scheme.THREE_LEVEL_FACTORIZED: THREE_LEVEL_SIGMA_MIN,
    Scheme.PREDICTOR_CORRECTOR_FACTORIZED: SM_SIGMA_MIN,
}

_SIGMA_FLOOR = {
    Scheme.THREE_LEVEL_FACTORIZED: THREE_LEVEL_SIGMA_MIN,
    Scheme.PREDICTOR_CORRECTOR_FACTORIZED: SM_SIGMA_MIN,
}

_DEFAULT_RHS = {
    Scheme.BACKWARD_EULER: RhsTreatment.MIDPOINT,
    Scheme.CRANK_NICOLSON: RhsTreatment.MIDPOINT,
    Scheme.SM2_DIRECT: RhsTreatment.LIFTED_MIDPOINT,
    Scheme.THREE_LEVEL_FACTORIZED: RhsTreatment.LIFTED_MIDPOINT,
    Scheme.PREDICTOR_CORRECTOR_FACTORIZED: RhsTreatment.LIFTED_MIDPOINT,
}


@dataclass(frozen=True)
class SchemeConfig:
    """Scheme selector plus step size, step count and run policies."""

    scheme: Scheme
    tau: float
    steps: int
    sigma: float | None = None
    bootstrap: Bootstrap = Bootstrap.CRANK_NICOLSON_FIRST_LEVEL
    rhs_treatment: RhsTreatment | None = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "bootstrap", Bootstrap(self.bootstrap))
        if self.rhs_treatment is not None:
            object.__setattr__(self, "rhs_treatment", RhsTreatment(self.rhs_treatment))
        if not self.tau > 0.0:
            raise ValueError("time step must be positive")
        if self.steps < 1:
            raise ValueError("need at least one time step")
        if self.sigma is not None and not self.sigma > 0.0:
            raise ValueError("weight sigma must be positive")

    @property
    def effective_sigma(self):
        """The sigma actually used: the explicit one, or the scheme default."""
        default = _DEFAULT_SIGMA.get(self.scheme)
        if default is None:
            return None
        return default if self.sigma is None else self.sigma

    @property
    def effective_rhs_treatment(self):
        if self.rhs_treatment is not None:
            return self.rhs_treatment
        return _DEFAULT_RHS[self.scheme]

    @property
    def sigma_flagged(self):
        """True when sigma sits below the proven stability threshold of the scheme."""
        floor = _SIGMA_FLOOR.get(self.scheme)
        s = self.effective_sigma
        return floor is not None and s is not None and s < floor - 1e-12


def step_backward_euler(A: SpdOperator, y: GridFunction, tau, phi=None):
    """Advance one level with the fully implicit first-order scheme.

    Solves (E + tau A)(y' - y)/tau + A y = phi for the new level y'.
    """
    if tau <= 0.0:
        raise ValueError("time step must be positive")
    resid = (-tau) * A.apply(y)
    if phi is not None:
        resid = resid + tau * phi
    return y + A.solve_shifted(tau, resid)


def step_crank_nicolson(A: SpdOperator, y: GridFunction, tau, phi=None):
    """Advance one level with the symmetric second-order scheme.

    Solves (E + tau A / 2)(y' - y)/tau + A y = phi for the new level y'.
    """
    if tau <= 0.0:
        raise ValueError("time step must be positive")
    resid = (-tau) * A.apply(y)
    if phi is not None:
        resid = resid + tau * phi
    return y + A.solve_shifted(0.5 * tau, resid)


def step_sm2_direct(A: SpdOperator, y: GridFunction, tau, phi=None):
    """Advance one level of the damped second-order scheme, solving its
    quadratic operator polynomial directly.

    Solves (E + tau A + tau^2 A^2 / 2)(y' - y)/tau + (A + tau A^2 / 2) y = phi.
    Pass phi already lifted by (E + tau A / 2) to keep second-order accuracy
    with midpoint forcing samples.
    """
    if tau <= 0.0:
        raise ValueError("time step must be positive")
    ay = A.apply(y)
    aay = A.apply(ay)
    resid = (-tau) * ay - (0.5 * tau * tau) * aay
    if phi is not None:
        resid = resid + tau * phi
    solver = OperatorPolynomial(A, (1.0, tau, 0.5 * tau * tau))
    return y + solver.solve(resid)


def _correction_residual(A, y, d, tau, sigma, phi):
    """Right side shared by the factorized schemes.

    Computes tau*phi - tau*(A + tau A^2/2) y - C d where
    C = (1 - 2 sigma) tau A + (1/2 - sigma^2) tau^2 A^2 is the defect of the
    factorized operator (E + sigma tau A)^2 against E + tau A + tau^2 A^2 / 2.
    """
    ay = A.apply(y)
    aay = A.apply(ay)
    ad = A.apply(d)
    aad = A.apply(ad)
    resid = (
        (-tau) * ay
        - (0.5 * tau * tau) * aay
        - ((1.0 - 2.0 * sigma) * tau) * ad
        - ((0.5 - sigma * sigma) * tau * tau) * aad
    )
    if phi is not None:
        resid = resid + tau * phi
    return resid


def step_three_level(A: SpdOperator, y_n: GridFunction, y_nm1: GridFunction,
                     tau, sigma, phi=None):
    """Advance the three-level factorized scheme by one level.

    Solves
        (E + sigma tau A)^2 (y' - y_n)/tau
          + (E + tau A + tau^2 A^2/2 - (E + sigma tau A)^2)(y_n - y_nm1)/tau
          + (A + tau A^2/2) y_n = phi
    with exactly two first-degree shifted solves.  Second-order accurate and
    unconditionally stable for sigma >= sqrt(3/8).
    """
    if tau <= 0.0:
        raise ValueError("time step must be positive")
    if sigma <= 0.0:
        raise ValueError("weight sigma must be positive")
    resid = _correction_residual(A, y_n, y_n - y_nm1, tau, sigma, phi)
    c = sigma * tau
    return y_n + A.solve_shifted(c, A.solve_shifted(c, resid))


def step_predictor_corrector(A: SpdOperator, y: GridFunction, tau, sigma,
                             phi_predict=None, phi_correct=None):
    """Backward Euler prediction followed by a factorized correction.

    The predicted level replaces the old level in the correction term of the
    factorized operator, turning the three-level update into a genuine
    two-level step: three first-degree shifted solves in total.  For
    sigma >= 1/sqrt(2) the resulting amplification factor decays
    monotonically in tau*lambda and vanishes at infinity.
    """
    if tau <= 0.0:
        raise ValueError("time step must be positive")
    if sigma <= 0.0:
        raise ValueError("weight sigma must be positive")
    prediction = step_backward_euler(A, y, tau, phi_predict)
    resid = _correction_residual(A, y, prediction - y, tau, sigma, phi_correct)
    c = sigma * tau
    return y + A.solve_shifted(c, A.solve_shifted(c, resid))


def three_level_energy(A: SpdOperator, tau, sigma, y_n: GridFunction,
                       y_nm1: GridFunction):
    """Quadratic stability functional of the three-level scheme at one level.

    Value: ||(y_n + y_nm1)/2||^2 weighted by A + tau A^2/2, plus
    ||(y_n - y_nm1)/tau||^2 weighted by
    (tau/2)(E + (4 sigma - 3/2) tau A + (2 sigma^2 - 3/4) tau^2 A^2).
    Non-increasing along homogeneous runs when sigma >= sqrt(3/8); below that
    weight the difference term can turn indefinite and the value may go
    negative.
    """
    v = 0.5 * (y_n + y_nm1)
    w = (1.0 / tau) * (y_n - y_nm1)
    av = A.apply(v)
    mean_part = inner_product(av, v) + 0.5 * tau * inner_product(av, av)
    aw = A.apply(w)
    diff_part = 0.5 * tau * (
        inner_product(w, w)
        + (4.0 * sigma - 1.5) * tau * inner_product(aw, w)
        + (2.0 * sigma * sigma - 0.75) * tau * tau * inner_product(aw, aw)
    )
    return mean_part + diff_part


@dataclass
class IntegrationResult:
    """Level history summary handed back by integrate()."""

    times: np.ndarray
    final_state: GridFunction
    energies: np.ndarray | None
    sigma_flagged: bool


def integrate(config: SchemeConfig, A: SpdOperator, u0: GridFunction,
              rhs_sampler=None, observer=None, exact_first_level=None):
    """March the configured scheme from t = 0 to t = steps * tau.

    rhs_sampler(t) returns the forcing grid function at time t; leave it
    None for a homogeneous problem.  observer(n, t, y), when given, sees
    every level including the initial one.  Three-level runs resolve their
    first level from the bootstrap policy; the exact-first-level policy
    requires exact_first_level.  The result carries the level times, the
    final state, the energy history (three-level runs only) and a warning
    flag for sigma below the scheme's stability threshold.
    """
    A._check(u0)
    tau = config.tau
    n_steps = config.steps
    sigma = config.effective_sigma
    lifted = config.effective_rhs_treatment is RhsTreatment.LIFTED_MIDPOINT
    times = tau * np.arange(n_steps + 1)

    def midpoint_sample(n):
        if rhs_sampler is None:
            return None
        return rhs_sampler((n + 0.5) * tau)

    def step_rhs(n):
        g = midpoint_sample(n)
        if g is None or not lifted:
            return g
        return g + (0.5 * tau) * A.apply(g)

    def notify(n, y):
        if observer is not None:
            observer(n, float(times[n]), y)

    y = u0
    notify(0, y)
    energies = None

    if config.scheme is Scheme.THREE_LEVEL_FACTORIZED:
        if config.bootstrap is Bootstrap.EXACT_FIRST_LEVEL:
            if exact_first_level is None:
                raise ValueError("exact_first_level bootstrap needs the first-level state")
            A._check(exact_first_level)
            y_next = exact_first_level
        else:
            y_next = step_crank_nicolson(A, y, tau, midpoint_sample(0))
        previous, y = y, y_next
        notify(1, y)
        energy_history = [three_level_energy(A, tau, sigma, y, previous)]
        for n in range(1, n_steps):
            previous, y = y, step_three_level(A, y, previous, tau, sigma, step_rhs(n))
            notify(n + 1, y)
            energy_history.append(three_level_energy(A, tau, sigma, y, previous))
        energies = np.asarray(energy_history)
    elif config.scheme is Scheme.PREDICTOR_CORRECTOR_FACTORIZED:
        for n in range(n_steps):
            y = step_predictor_corrector(A, y, tau, sigma,
                                         midpoint_sample(n), step_rhs(n))
            notify(n + 1, y)
    else:
        stepper = {
            Scheme.BACKWARD_EULER: step_backward_euler,
            Scheme.CRANK_NICOLSON: step_crank_nicolson,
            Scheme.SM2_DIRECT: step_sm2_direct,
        }[config.scheme]
        for n in range(n_steps):
            y = stepper(A, y, tau, step_rhs(n))
            notify(n + 1, y)

    return IntegrationResult(times=times, final_state=y, energies=energies,
                             sigma_flagged=config.sigma_flagged)
