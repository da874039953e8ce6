"""
Command-line front door.

    python cli.py analyze --vector sqrt2
    python cli.py psi --spec specs/sqrt2.json --Q 5
    python cli.py ergodize --vector sqrt2 --delta 1/2 --theta 1/2,1/2
    python cli.py approx --vector sqrt2 --Q 8
    python cli.py circle --alpha golden --delta 1/4
    python cli.py verify --sweep specs/acceptance.json --out results.csv

Exit codes: 0 when every check passes, 1 when a theorem-backed check fails,
2 for bad input or a violated hypothesis.
"""

import functools
import logging
import os
import sys
from fractions import Fraction

import click
from dotenv import load_dotenv

from utils import reports
from utils.approx import certify, find_periodic_basis
from utils.circle import RotationNumber, dirichlet_pair, ergodization_steps, gap_profile, proof_mechanics_check, theorem2_check
from utils.ergodization import constructive_hit, diophantine_bound, ergodization_time_bracket, raw_time
from utils.errors import HypothesisError, TorusError
from utils.logging_setup import configure_logging
from utils.reports import STATUS_FAIL, STATUS_PASS, ReportRecord
from utils.resonance import analyze, psi
from utils.sweep import run_sweep
from utils.vector_spec import BUILTIN_VECTORS, load_sweep_spec, load_vector_spec, resolve_rotation, resolve_vector

logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_INPUT = 2


class FractionType(click.ParamType):
    name = "rational"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return Fraction(str(value).strip())
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a rational number such as 3/4 or 0.25", param, ctx)


class FractionListType(click.ParamType):
    name = "rationals"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return tuple(Fraction(part.strip()) for part in str(value).split(","))
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a comma-separated list of rationals", param, ctx)


RATIONAL = FractionType()
RATIONALS = FractionListType()


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_INPUT)


def handle_errors(command):
    """Map library errors to exit code 2 with the message on stderr."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except HypothesisError as exc:
            _fail(f"hypothesis '{exc.hypothesis}' violated: {exc}")
        except TorusError as exc:
            _fail(str(exc))

    return wrapper


def vector_options(command):
    command = click.option("--vector", "vector_name", help=f"Built-in vector: {', '.join(sorted(BUILTIN_VECTORS))}.")(command)
    command = click.option("--spec", "spec_path", type=click.Path(dir_okay=False), help="Vector-spec JSON file.")(command)
    return command


def output_options(command):
    command = click.option("--out", "out_path", type=click.Path(dir_okay=False, writable=True), help="Write the report here instead of stdout.")(command)
    command = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)(command)
    return command


def _vector(spec_path, vector_name):
    if spec_path and vector_name:
        raise click.UsageError("use either --spec or --vector, not both")
    if spec_path:
        return load_vector_spec(spec_path)
    if vector_name:
        return resolve_vector(vector_name)
    raise click.UsageError("a vector is required: pass --spec FILE or --vector NAME")


def _emit(payload, records, fmt: str, out_path: str | None):
    with click.open_file(out_path or "-", "w", encoding="utf-8") as stream:
        if fmt == "csv":
            reports.write_csv(records, stream)
        else:
            reports.write_json(payload, stream)


@click.group()
@click.option("--log-level", default=None, help="Overrides LOG_LEVEL.")
@click.option("--log-file", type=click.Path(dir_okay=False), default=None, help="Also log to this file.")
@click.option("--precision-bits", type=click.IntRange(min=8), default=None, help="Overrides TORUS_PRECISION_BITS.")
def cli(log_level, log_file, precision_bits):
    """Resonance, ergodization and periodic approximation of torus linear flows."""
    load_dotenv()
    if log_level:
        os.environ["LOG_LEVEL"] = log_level.upper()
    if precision_bits:
        os.environ["TORUS_PRECISION_BITS"] = str(precision_bits)
    configure_logging(logging.WARNING, log_file)


@cli.command("analyze")
@vector_options
@output_options
@handle_errors
def cmd_analyze(spec_path, vector_name, fmt, out_path):
    """Resonance lattice, Q_α, C_α and the normalization of a vector."""
    vector = _vector(spec_path, vector_name)
    R = analyze(vector.vector())
    record = ReportRecord(
        vector.name,
        "analyze",
        f"n={R.n}",
        measured=f"d={R.d}",
        bound=f"Q_alpha={R.Q_alpha};C_alpha={R.C_alpha}",
    )
    _emit({"vector": vector.name, "resonance": reports.resonance_json(R)}, [record], fmt, out_path)


@cli.command("psi")
@vector_options
@click.option("--Q", "Qs", type=RATIONAL, multiple=True, required=True, help="Height bound; repeat for a profile.")
@output_options
@handle_errors
def cmd_psi(spec_path, vector_name, Qs, fmt, out_path):
    """Resonance profile Ψ(Q) with its witness."""
    vector = _vector(spec_path, vector_name)
    R = analyze(vector.vector())
    values = [psi(R, Q) for Q in Qs]
    records = [
        ReportRecord(vector.name, "psi", f"Q={v.Q}", measured=f"{float(v):.12g}", bound=";".join(map(str, v.witness)))
        for v in values
    ]
    payload = {"vector": vector.name, "psi": [reports.psi_json(v) for v in values]}
    _emit(payload, records, fmt, out_path)


@cli.command("ergodize")
@vector_options
@click.option("--delta", type=RATIONAL, required=True)
@click.option("--tol", type=RATIONAL, default=None, help="Bracket width; defaults to T_hi/100.")
@click.option("--epsilon", type=RATIONAL, default=None, help="Grid resolution; defaults to δ/8.")
@click.option("--theta", type=RATIONALS, default=None, help="Leaf coordinates of a target for the constructive hit.")
@click.option("--gamma", type=RATIONAL, default=None, help="Diophantine constant γ (with --tau).")
@click.option("--tau", type=RATIONAL, default=None, help="Diophantine exponent τ (with --gamma).")
@output_options
@handle_errors
def cmd_ergodize(spec_path, vector_name, delta, tol, epsilon, theta, gamma, tau, fmt, out_path):
    """Certified bracket on the δ-ergodization time, against the C(d,α)·Ψ(C/δ) bound."""
    vector = _vector(spec_path, vector_name)
    R = analyze(vector.vector())
    bracket = ergodization_time_bracket(R, delta, tol, epsilon)
    payload = {
        "vector": vector.name,
        "bracket": reports.bracket_json(bracket),
        "raw_time_hi": str(raw_time(R, bracket.T_hi)),
    }
    status = STATUS_PASS
    bound = ""
    if bracket.bound is not None:
        bound = f"{float(bracket.bound.upper):.9g}"
        if bracket.T_hi > bracket.bound.upper:
            status = STATUS_FAIL
    records = [ReportRecord(vector.name, "theorem1", f"delta={delta}", f"{float(bracket.T_hi):.9g}", bound, status=status)]

    if theta is not None:
        hit = constructive_hit(R, delta, theta)
        payload["hit"] = reports.hit_json(hit)
        ok = hit.within_delta and hit.within_bound
        records.append(
            ReportRecord(vector.name, "hit", f"theta={','.join(map(str, theta))}", str(hit.T_star),
                         f"{float(hit.bound.upper):.9g}", status=STATUS_PASS if ok else STATUS_FAIL)
        )
    if (gamma is None) != (tau is None):
        raise click.UsageError("--gamma and --tau go together")
    if gamma is not None:
        result = diophantine_bound(R, gamma, tau, delta)
        payload["diophantine"] = reports.diophantine_json(result)
        records.append(
            ReportRecord(vector.name, "diophantine", f"gamma={gamma};tau={tau}",
                         f"{float(bracket.T_hi):.9g}", f"{float(result.value.upper):.9g}")
        )
    _emit(payload, records, fmt, out_path)
    if any(r.failed for r in records):
        sys.exit(EXIT_FAILED)


@cli.command("approx")
@vector_options
@click.option("--Q", "Q", type=RATIONAL, required=True)
@output_options
@handle_errors
def cmd_approx(spec_path, vector_name, Q, fmt, out_path):
    """Periodic basis (q_j, p_j) approximating α, with its certificate."""
    vector = _vector(spec_path, vector_name)
    R = analyze(vector.vector())
    approximation = find_periodic_basis(R, Q)
    report = certify(R, approximation)
    record = ReportRecord(
        vector.name,
        "proposition",
        f"Q={Q}",
        measured=str(max(pair.q for pair in approximation.pairs)),
        bound=f"{float(report.q_bound.upper * report.bound_factor):.9g}",
        status=STATUS_PASS if report.passed else STATUS_FAIL,
    )
    payload = {"vector": vector.name, "approximation": reports.approximation_json(approximation, report)}
    _emit(payload, [record], fmt, out_path)
    if not report.passed:
        sys.exit(EXIT_FAILED)


@cli.command("circle")
@click.option("--alpha", "alpha_ref", required=True, help="Built-in rotation name or p/q.")
@click.option("--delta", type=RATIONAL, required=True)
@click.option("--gaps", "gaps_N", type=click.IntRange(min=0), default=None, help="Also report the gap profile of N steps.")
@click.option("--mechanics", is_flag=True, help="Replay the Dirichlet step of the bound.")
@click.option("--dirichlet", "dirichlet_Q", type=RATIONAL, default=None, help="Report the Dirichlet pair for this Q.")
@output_options
@handle_errors
def cmd_circle(alpha_ref, delta, gaps_N, mechanics, dirichlet_Q, fmt, out_path):
    """N_α(δ) for the rotation by α, checked against [Ψ(2/δ)] - 1 when α is irrational."""
    name, value = resolve_rotation(alpha_ref)
    alpha = RotationNumber.from_scalar(value, name)
    passed = True
    if alpha.is_rational:
        steps = ergodization_steps(alpha, delta)
        payload = {"alpha": name, "delta": str(delta), "N": steps, "bound": None, "pass": None}
        record = ReportRecord(name, "circle", f"delta={delta}", "" if steps is None else str(steps), status=reports.STATUS_SKIPPED)
    else:
        report = theorem2_check(alpha, delta)
        passed = report.passed
        payload = reports.theorem2_json(report)
        record = ReportRecord(name, "theorem2", f"delta={delta}", str(report.N), str(report.bound),
                              status=STATUS_PASS if passed else STATUS_FAIL)
    records = [record]
    if gaps_N is not None:
        payload["gap_profile"] = reports.gap_profile_json(gap_profile(alpha, gaps_N))
    if dirichlet_Q is not None:
        q, p = dirichlet_pair(alpha, dirichlet_Q)
        payload["dirichlet"] = {"Q": str(dirichlet_Q), "q": q, "p": p}
    if mechanics:
        mech = proof_mechanics_check(alpha, delta)
        payload["mechanics"] = reports.proof_mechanics_json(mech)
        if not mech.passed:
            logger.warning(f"{name}: Dirichlet step at q={mech.q} leaves a gap at δ={delta}; N_α(δ) is unaffected")
        records.append(ReportRecord(name, "mechanics", f"delta={delta}", f"q={mech.q}",
                                    status=STATUS_PASS if mech.passed else reports.STATUS_DIAGNOSTIC))
    _emit(payload, records, fmt, out_path)
    if not passed:
        sys.exit(EXIT_FAILED)


@cli.command("verify")
@click.option("--sweep", "sweep_path", type=click.Path(dir_okay=False), required=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="csv", show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False, writable=True), default=None)
@handle_errors
def cmd_verify(sweep_path, fmt, out_path):
    """Run a sweep file; exit 1 if any theorem-backed check fails."""
    spec = load_sweep_spec(sweep_path)
    records = run_sweep(spec)
    _emit(records, records, fmt, out_path)
    click.echo(reports.summary_line(records), err=True)
    if any(r.failed for r in records):
        sys.exit(EXIT_FAILED)


if __name__ == "__main__":
    cli()
