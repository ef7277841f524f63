"""Heat conduction on the unit interval with a closed-form reference solution.

The benchmark solves du/dt - u_xx = f on 0 < x < 1 with homogeneous
Dirichlet walls and zero initial temperature.  The forcing is chosen so
that u(x, t) = x (1 - x) (1 - exp(-k t)) is the exact solution; since
that profile is quadratic in x, the three-point second difference
reproduces -u_xx without any spatial error, and every deviation measured
against the sampled profile is purely temporal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import GridFunction, SpdOperator, norm

__all__ = [
    "DEFAULT_DECAY_RATE",
    "HeatProblem",
    "build_operator",
    "exact_solution",
    "forcing",
    "error_norm",
]

DEFAULT_DECAY_RATE = 5.0


def exact_solution(x, t, decay_rate=DEFAULT_DECAY_RATE):
    """Reference temperature x (1 - x) (1 - exp(-k t))."""
    x = np.asarray(x, dtype=float)
    return x * (1.0 - x) * (-np.expm1(-decay_rate * t))


def forcing(x, t, decay_rate=DEFAULT_DECAY_RATE):
    """Source term matching the reference temperature.

    Substituting u = x (1 - x) (1 - exp(-k t)) into du/dt - u_xx gives
    du/dt = k x (1 - x) exp(-k t) and -u_xx = 2 (1 - exp(-k t)), hence
    f = k x (1 - x) exp(-k t) + 2 (1 - exp(-k t)).
    """
    x = np.asarray(x, dtype=float)
    decay = np.exp(-decay_rate * t)
    return decay_rate * x * (1.0 - x) * decay + 2.0 * (1.0 - decay)


def build_operator(M):
    """Second-difference operator on the interior nodes, with the Dirichlet
    boundary values eliminated from the end rows.

    Acts as (2 v(x) - v(x - h) - v(x + h)) / h^2 with h = 1/M.  Carries its
    exact spectral bounds 4 sin^2(k pi h / 2) / h^2 at k = 1 and k = M - 1.
    """
    M = int(M)
    if M < 2:
        raise ValueError("need at least one interior node (M >= 2)")
    h = 1.0 / M
    n = M - 1
    band = np.zeros((2, n))
    band[0, 1:] = -1.0 / h**2
    band[1, :] = 2.0 / h**2

    def eigenvalue(k):
        return 4.0 / h**2 * math.sin(0.5 * k * math.pi * h) ** 2

    return SpdOperator(n, band=band,
                       lower_bound=eigenvalue(1), upper_bound=eigenvalue(n))


@dataclass(frozen=True)
class HeatProblem:
    """Unit-interval benchmark: interior resolution M, horizon T, decay rate."""

    M: int
    T: float = 0.5
    decay_rate: float = DEFAULT_DECAY_RATE

    def __post_init__(self):
        if self.M < 2:
            raise ValueError("need at least one interior node (M >= 2)")
        if not self.T > 0.0:
            raise ValueError("time horizon must be positive")

    @property
    def h(self):
        return 1.0 / self.M

    @property
    def x(self):
        """Interior node positions x_i = i h, i = 1 .. M-1."""
        return np.arange(1, self.M) * self.h

    def operator(self):
        return build_operator(self.M)

    def initial_state(self):
        return GridFunction(np.zeros(self.M - 1), self.h)

    def exact_grid(self, t):
        return GridFunction(exact_solution(self.x, t, self.decay_rate), self.h)

    def forcing_grid(self, t):
        return GridFunction(forcing(self.x, t, self.decay_rate), self.h)


def error_norm(y, t, problem):
    """Weighted L2 distance between a state and the reference profile at time t."""
    return norm(y - problem.exact_grid(t))
