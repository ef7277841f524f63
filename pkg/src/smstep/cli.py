"""Command line front end for the benchmark studies.

Three modes: ``run`` writes the error history of one or more integrations,
``convergence`` writes a step-refinement table, and ``stability`` writes
amplification verdicts over a sigma sweep plus the two bisected stability
thresholds.  All CSV output is deterministic; repeated runs with the same
flags produce byte-identical files.

Exit codes: 0 on success, 1 on a usage error, 2 on a numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import convergence_table, run_model, stability_report
from .operators import NumericalError
from .reporting import convergence_csv, energy_series_csv, error_series_csv, stability_csv
from .schemes import Bootstrap, Scheme

USAGE_ERROR = 1
NUMERICAL_FAILURE = 2

_SCHEMES = {
    "be": Scheme.BACKWARD_EULER,
    "cn": Scheme.CRANK_NICOLSON,
    "sm2": Scheme.SM2_DIRECT,
    "three-level": Scheme.THREE_LEVEL_FACTORIZED,
    "pc-fact": Scheme.PREDICTOR_CORRECTOR_FACTORIZED,
}

_BOOTSTRAPS = {
    "exact": Bootstrap.EXACT_FIRST_LEVEL,
    "cn": Bootstrap.CRANK_NICOLSON_FIRST_LEVEL,
}

_SIGMA_SCHEMES = ("three-level", "pc-fact")

_DEFAULT_STABILITY_SIGMAS = "0.5,0.55,0.6,0.65,0.7,0.75,0.8,1.0,1.4142135623730951"


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def build_parser():
    parser = _Parser(
        prog="smstep",
        description="Benchmark runs, refinement tables and stability verdicts "
                    "for implicit parabolic time stepping.",
    )
    parser.add_argument("--mode", choices=("run", "convergence", "stability"),
                        default="run", help="what to compute (default: run)")
    parser.add_argument("--scheme", choices=sorted(_SCHEMES),
                        help="time scheme (required for run and convergence)")
    parser.add_argument("--M", type=int, default=10,
                        help="spatial resolution, interior nodes M-1 (default: 10)")
    parser.add_argument("--N", default="10,20,40",
                        help="comma-separated step counts (default: 10,20,40)")
    parser.add_argument("--sigma", default=None,
                        help="scheme weight; in stability mode a comma-separated sweep")
    parser.add_argument("--bootstrap", choices=sorted(_BOOTSTRAPS), default=None,
                        help="first level of the three-level scheme (default: cn)")
    parser.add_argument("--T", type=float, default=0.5,
                        help="time horizon (default: 0.5)")
    parser.add_argument("--out", default=None,
                        help="output file, or directory when several files are written")
    return parser


def _parse_int_list(text, parser, flag):
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        parser.error(f"{flag} expects comma-separated integers, got {text!r}")
    if not values or any(v < 1 for v in values):
        parser.error(f"{flag} expects positive integers, got {text!r}")
    return values


def _parse_float_list(text, parser, flag):
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        parser.error(f"{flag} expects comma-separated reals, got {text!r}")
    if not values:
        parser.error(f"{flag} expects at least one value")
    return values


def _scheme_tags(args):
    parts = []
    if args.scheme in _SIGMA_SCHEMES and args.sigma is not None:
        parts.append(f"s{float(args.sigma):g}")
    if args.scheme == "three-level":
        parts.append(f"b{args.bootstrap or 'cn'}")
    return parts


def _run_filename(args, n):
    parts = [args.scheme, f"M{args.M}", f"N{n}"] + _scheme_tags(args)
    return "_".join(parts) + ".csv"


def _write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path}")


def _resolve_out(out, default_name):
    """A directory target gets a generated file name inside it."""
    path = Path(out)
    if path.is_dir() or out.endswith("/"):
        return path / default_name
    return path


def _common_checks(args, parser):
    if args.scheme is None:
        parser.error(f"--scheme is required for mode {args.mode}")
    if args.M < 2:
        parser.error("--M must be at least 2")
    if not args.T > 0.0:
        parser.error("--T must be positive")
    if args.sigma is not None and args.scheme not in _SIGMA_SCHEMES:
        parser.error(f"--sigma does not apply to scheme {args.scheme}")
    if args.bootstrap is not None and args.scheme != "three-level":
        parser.error("--bootstrap only applies to the three-level scheme")
    sigma = None
    if args.sigma is not None:
        try:
            sigma = float(args.sigma)
        except ValueError:
            parser.error(f"--sigma expects a real number, got {args.sigma!r}")
        if not sigma > 0.0:
            parser.error("--sigma must be positive")
    bootstrap = _BOOTSTRAPS[args.bootstrap or "cn"]
    return sigma, bootstrap


def _mode_run(args, parser):
    sigma, bootstrap = _common_checks(args, parser)
    n_values = _parse_int_list(args.N, parser, "--N")
    single_file = (args.out is not None and len(n_values) == 1
                   and args.out.endswith(".csv"))
    for n in n_values:
        report = run_model(_SCHEMES[args.scheme], M=args.M, N=n, T=args.T,
                           sigma=sigma, bootstrap=bootstrap)
        series = error_series_csv(report)
        energies = energy_series_csv(report)
        if report.sigma_flagged:
            print(f"warning: sigma={report.sigma:g} is below the stability "
                  f"threshold of {args.scheme}", file=sys.stderr)
        if args.out is None:
            print(f"# scheme={args.scheme} M={args.M} N={n}")
            sys.stdout.write(series)
        elif single_file:
            _write(Path(args.out), series)
        else:
            directory = Path(args.out)
            _write(directory / _run_filename(args, n), series)
            if energies is not None:
                name = _run_filename(args, n).replace(".csv", "_energy.csv")
                _write(directory / name, energies)
    return 0


def _mode_convergence(args, parser):
    sigma, bootstrap = _common_checks(args, parser)
    n_values = _parse_int_list(args.N, parser, "--N")
    try:
        rows = convergence_table(_SCHEMES[args.scheme], M=args.M,
                                 n_values=n_values, T=args.T, sigma=sigma,
                                 bootstrap=bootstrap)
    except ValueError as exc:
        parser.error(str(exc))
    text = convergence_csv(rows)
    if args.out is None:
        sys.stdout.write(text)
    else:
        name = "_".join([args.scheme, f"M{args.M}", "convergence"]
                        + _scheme_tags(args)) + ".csv"
        _write(_resolve_out(args.out, name), text)
    return 0


def _mode_stability(args, parser):
    sigmas = _parse_float_list(args.sigma or _DEFAULT_STABILITY_SIGMAS,
                               parser, "--sigma")
    report = stability_report(sigmas)
    text = stability_csv(report.rows)
    if args.out is None:
        sys.stdout.write(text)
    else:
        _write(_resolve_out(args.out, "stability.csv"), text)
    print(f"# three_level_sigma_threshold = {report.three_level_threshold:.6f}")
    print(f"# monotonicity_sigma_threshold = {report.monotonicity_threshold:.6f}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.mode == "run":
            return _mode_run(args, parser)
        if args.mode == "convergence":
            return _mode_convergence(args, parser)
        return _mode_stability(args, parser)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_FAILURE


if __name__ == "__main__":
    sys.exit(main())
