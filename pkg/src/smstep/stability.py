"""Scalar stability functions of the schemes and their classification.

On an eigen-mode of the operator, every two-level scheme multiplies the
state by s(z) with z = tau * lambda.  The exact evolution multiplies by
exp(-z), which is positive, monotonically decreasing and vanishing at
infinity; a scheme whose s shares all three traits damps fast modes
faster than slow ones, level by level, like the continuous problem.
This module builds the rational approximations of exp(-z) behind the
schemes, the amplification factor of the factorized predictor-corrector
scheme, and classifiers that test those traits numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import brentq

from .schemes import SM_SIGMA_MIN, THREE_LEVEL_SIGMA_MIN, Scheme

__all__ = [
    "RationalFunction",
    "StabilityVerdict",
    "pade_polynomials",
    "pade_approximant",
    "pade_remainder_order",
    "factorized_stability_function",
    "scheme_stability_function",
    "sampling_monotonicity_violation",
    "derivative_monotonicity_violation",
    "classify",
    "find_sigma_threshold",
]

MAX_PADE_DEGREE = 12

_REMAINDER_SAMPLES = (1e-1, 1e-2, 1e-3)


@dataclass(frozen=True)
class RationalFunction:
    """Ratio of two real polynomials, coefficients in ascending powers."""

    numerator: tuple
    denominator: tuple

    def __post_init__(self):
        object.__setattr__(self, "numerator", tuple(float(c) for c in self.numerator))
        object.__setattr__(self, "denominator", tuple(float(c) for c in self.denominator))
        if not self.numerator or not self.denominator:
            raise ValueError("need at least one coefficient on each side")
        if self.denominator[0] == 0.0:
            raise ValueError("denominator must not vanish at z = 0")

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        out = npoly.polyval(z, self.numerator) / npoly.polyval(z, self.denominator)
        return float(out) if out.ndim == 0 else out

    def derivative_numerator(self):
        """Coefficients of p'q - pq', the numerator of the derivative."""
        p = np.asarray(self.numerator)
        q = np.asarray(self.denominator)
        h = npoly.polysub(npoly.polymul(npoly.polyder(p), q),
                          npoly.polymul(p, npoly.polyder(q)))
        return tuple(float(c) for c in h)


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of classifying one stability function."""

    rho_stable: bool
    rho_bound: float
    asymptotically_stable: bool
    sm_stable: bool
    first_violation_z: float | None


def pade_polynomials(l, m):
    """Numerator and denominator coefficients of the (l, m) rational
    approximation of exp(-z), each normalized to value 1 at z = 0.

    The coefficient of z^k is
        numerator:    l! (l+m-k)! / ((l+m)! k! (l-k)!) * (-1)^k,   k <= l,
        denominator:  m! (l+m-k)! / ((l+m)! k! (m-k)!),            k <= m,
    and the approximation error is O(z^(l+m+1)).
    """
    l, m = int(l), int(m)
    if l < 0 or m < 0 or l + m == 0 or l + m > MAX_PADE_DEGREE:
        raise ValueError(f"need l, m >= 0 with 0 < l + m <= {MAX_PADE_DEGREE}")
    f = math.factorial
    num = tuple(
        (-1) ** k * f(l) * f(l + m - k) / (f(l + m) * f(k) * f(l - k))
        for k in range(l + 1)
    )
    den = tuple(
        f(m) * f(l + m - k) / (f(l + m) * f(k) * f(m - k))
        for k in range(m + 1)
    )
    return num, den


def pade_approximant(l, m):
    """The (l, m) rational approximation of exp(-z) as a RationalFunction."""
    num, den = pade_polynomials(l, m)
    return RationalFunction(num, den)


def _mp_polyval(coeffs, z):
    acc = mpmath.mpf(0)
    for c in reversed(coeffs):
        acc = acc * z + mpmath.mpf(c)
    return acc


def pade_remainder_order(l, m):
    """Observed order of exp(-z) - R_lm(z) as z -> 0.

    Fits the log-log slope of the remainder at z = 1e-1, 1e-2, 1e-3; the
    values are evaluated in extended precision because the remainder drops
    below double rounding for larger l + m.  The slope approaches l + m + 1.
    """
    num, den = pade_polynomials(l, m)
    with mpmath.workdps(60):
        logs = []
        for z in _REMAINDER_SAMPLES:
            zz = mpmath.mpf(z)
            err = abs(mpmath.e ** (-zz) - _mp_polyval(num, zz) / _mp_polyval(den, zz))
            logs.append(float(mpmath.log(err)))
    slope = np.polyfit(np.log(_REMAINDER_SAMPLES), logs, 1)[0]
    return float(slope)


def factorized_stability_function(sigma):
    """Amplification factor of the factorized predictor-corrector scheme.

        s(z) = (1 + 2 sigma z + (sigma^2 - 1/2) z^2)
             / (1 + (1 + 2 sigma) z + (sigma^2 + 2 sigma) z^2 + sigma^2 z^3)

    Positive, monotone decreasing and vanishing at infinity exactly when
    sigma >= 1/sqrt(2).
    """
    sigma = float(sigma)
    if sigma <= 0.0:
        raise ValueError("weight sigma must be positive")
    num = (1.0, 2.0 * sigma, sigma * sigma - 0.5)
    den = (1.0, 1.0 + 2.0 * sigma, sigma * sigma + 2.0 * sigma, sigma * sigma)
    return RationalFunction(num, den)


def scheme_stability_function(scheme, sigma=None):
    """One-step amplification s(z), z = tau * lambda, of a scheme on an
    eigen-mode.

    The three-level kernel is reduced to a single-step map by taking equal
    history levels; the other schemes are genuine two-level transitions.
    sigma defaults to the scheme's stability threshold where it applies.
    """
    scheme = Scheme(scheme)
    if scheme is Scheme.BACKWARD_EULER:
        return pade_approximant(0, 1)
    if scheme is Scheme.CRANK_NICOLSON:
        return pade_approximant(1, 1)
    if scheme is Scheme.SM2_DIRECT:
        return pade_approximant(0, 2)
    if scheme is Scheme.THREE_LEVEL_FACTORIZED:
        s = THREE_LEVEL_SIGMA_MIN if sigma is None else float(sigma)
        return RationalFunction((1.0, 2.0 * s - 1.0, s * s - 0.5),
                                (1.0, 2.0 * s, s * s))
    s = SM_SIGMA_MIN if sigma is None else float(sigma)
    return factorized_stability_function(s)


def _log_grid(z_max, points):
    return np.logspace(-8.0, math.log10(z_max), points)


def sampling_monotonicity_violation(s, grid, tol=1e-12):
    """First grid point whose successor has a larger s value, or None.

    An increase must exceed tol to count, so flat stretches pass.
    """
    vals = s(grid)
    rising = np.nonzero(np.diff(vals) > tol)[0]
    if rising.size == 0:
        return None
    return float(grid[rising[0]])


def derivative_monotonicity_violation(s, grid):
    """Where the analytic derivative of s first turns positive, or None.

    Scans the sign of p'q - pq' on the grid and sharpens the crossing by
    root bracketing.
    """
    h = s.derivative_numerator()
    hv = npoly.polyval(grid, h)
    positive = np.nonzero(hv > 0.0)[0]
    if positive.size == 0:
        return None
    j = int(positive[0])
    if j == 0:
        return float(grid[0])
    root = brentq(lambda z: npoly.polyval(z, h), grid[j - 1], grid[j])
    return float(root)


def classify(s, delta=0.0, tau=0.0, z_max=1e8, grid_points=2000):
    """Classify a stability function on a log grid over [1e-8, z_max].

    rho-stability compares sup |s| against exp(-delta tau) on z >= delta tau
    when delta tau > 0, and against 1 on the whole grid otherwise.
    Asymptotic stability requires |s(z_max)| < 1e-4 with |s| decreasing over
    the last decade.  The monotonicity of s is checked both by sampling and
    through the sign of the analytic derivative; the verdict records where
    the first violation sits.
    """
    grid = _log_grid(z_max, max(int(grid_points), 2000))
    vals = s(grid)
    shift = delta * tau
    if shift > 0.0:
        bound = math.exp(-shift)
        window = np.abs(vals[grid >= shift])
        sup = max(float(window.max()) if window.size else 0.0, abs(s(shift)))
    else:
        bound = 1.0
        sup = float(np.abs(vals).max())
    rho_stable = sup <= bound + 1e-12

    tail = np.abs(vals[grid >= z_max / 10.0])
    asymptotic = abs(vals[-1]) < 1e-4 and bool(np.all(np.diff(tail) <= 1e-12))

    sampled = sampling_monotonicity_violation(s, grid)
    derived = derivative_monotonicity_violation(s, grid)
    violation = derived if derived is not None else sampled
    monotone = sampled is None and derived is None

    return StabilityVerdict(
        rho_stable=rho_stable,
        rho_bound=bound,
        asymptotically_stable=asymptotic,
        sm_stable=rho_stable and asymptotic and monotone,
        first_violation_z=violation,
    )


def _three_level_condition_holds(sigma):
    # The difference-energy weight of the three-level scheme is positive
    # semidefinite iff g(z) = 1 + (4 sigma - 3/2) z + (2 sigma^2 - 3/4) z^2
    # stays nonnegative for all z >= 0.
    a = 2.0 * sigma * sigma - 0.75
    b = 4.0 * sigma - 1.5
    if a < 0.0:
        return False
    if b >= 0.0:
        return True
    if a == 0.0:
        return False
    z_min = -b / (2.0 * a)
    return 1.0 + b * z_min + a * z_min * z_min >= 0.0


def find_sigma_threshold(family, bracket=(0.3, 1.2), tol=1e-4):
    """Smallest sigma in the bracket satisfying a stability family, by bisection.

    family 'three_level_condition' asks for the positive-definite
    difference-energy weight of the three-level scheme (threshold
    sqrt(3/8)); 'factorized_monotonicity' asks for a monotone
    non-increasing predictor-corrector amplification (threshold 1/sqrt(2)).
    """
    if family == "three_level_condition":
        holds = _three_level_condition_holds
    elif family == "factorized_monotonicity":
        grid = _log_grid(1e8, 2000)

        def holds(sigma):
            s = factorized_stability_function(sigma)
            return (sampling_monotonicity_violation(s, grid) is None
                    and derivative_monotonicity_violation(s, grid) is None)
    else:
        raise ValueError(f"unknown stability family: {family!r}")

    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    if holds(lo) or not holds(hi):
        raise ValueError("bracket does not straddle the threshold")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return hi
