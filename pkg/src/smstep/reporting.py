"""Run reports and deterministic CSV emission.

All numbers are written with 16 significant digits via the same format
call, so repeated runs with identical flags produce byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "ERROR_FLOOR",
    "RunReport",
    "ConvergenceRow",
    "observed_order",
    "error_series_csv",
    "energy_series_csv",
    "convergence_csv",
    "stability_csv",
]

ERROR_FLOOR = 1e-14
"""Errors below this are rounding noise; order estimates from them are meaningless."""


def _fmt(value):
    return format(float(value), ".16g")


def _fmt_bool(value):
    return "true" if value else "false"


@dataclass
class RunReport:
    """One benchmark integration: its parameters and the error it produced."""

    scheme: str
    M: int
    N: int
    tau: float
    sigma: float | None
    bootstrap: str | None
    rhs_treatment: str
    times: list
    errors: list
    energies: list | None = None
    sigma_flagged: bool = False

    @property
    def final_error(self):
        return self.errors[-1]


@dataclass
class ConvergenceRow:
    N: int
    final_error: float
    observed_order: float | None


def observed_order(error_coarse, error_fine):
    """log2 error ratio of two runs whose step counts differ by a factor 2.

    Returns None when either error sits at the rounding floor.
    """
    if error_coarse <= ERROR_FLOOR or error_fine <= ERROR_FLOOR:
        return None
    return math.log2(error_coarse / error_fine)


def error_series_csv(report):
    """Error history of one run: header t,error."""
    lines = ["t,error"]
    lines.extend(f"{_fmt(t)},{_fmt(e)}" for t, e in zip(report.times, report.errors))
    return "\n".join(lines) + "\n"


def energy_series_csv(report):
    """Energy history of a three-level run: header t,energy, levels 1..N."""
    if report.energies is None:
        return None
    lines = ["t,energy"]
    lines.extend(f"{_fmt(t)},{_fmt(e)}"
                 for t, e in zip(report.times[1:], report.energies))
    return "\n".join(lines) + "\n"


def convergence_csv(rows):
    """Refinement study table: header N,final_error,observed_order."""
    lines = ["N,final_error,observed_order"]
    for row in rows:
        order = "" if row.observed_order is None else _fmt(row.observed_order)
        lines.append(f"{row.N},{_fmt(row.final_error)},{order}")
    return "\n".join(lines) + "\n"


def stability_csv(rows):
    """Verdict table: header sigma,rho_stable,asymptotic,sm_stable,first_violation_z."""
    lines = ["sigma,rho_stable,asymptotic,sm_stable,first_violation_z"]
    for sigma, verdict in rows:
        where = "" if verdict.first_violation_z is None else _fmt(verdict.first_violation_z)
        lines.append(
            f"{_fmt(sigma)},{_fmt_bool(verdict.rho_stable)},"
            f"{_fmt_bool(verdict.asymptotically_stable)},"
            f"{_fmt_bool(verdict.sm_stable)},{where}"
        )
    return "\n".join(lines) + "\n"
