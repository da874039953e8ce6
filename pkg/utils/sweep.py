import logging
import time
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterator, List

import numpy as np

from utils import reports
from utils.approx import certify, find_periodic_basis, proposition_threshold
from utils.circle import RotationNumber, theorem2_check
from utils.ergodization import ergodization_time_bracket
from utils.errors import HypothesisError, TorusError
from utils.lattice import IntLattice, rank, transference_check
from utils.reports import STATUS_FAIL, STATUS_PASS, STATUS_SKIPPED, ReportRecord
from utils.resonance import ResonanceData, analyze, theorem1_delta_max
from utils.scalars import RealScalar
from utils.vector_spec import SweepSpec, VectorSpec, parse_grid_value, resolve_rotation

logger = logging.getLogger(__name__)

DEFAULT_CIRCLE_DELTAS = tuple(f"1/{2**j}" for j in range(1, 9))


@contextmanager
def _timed(record: ReportRecord) -> Iterator[ReportRecord]:
    start = time.perf_counter()
    try:
        yield record
    except HypothesisError as exc:
        record.status = STATUS_SKIPPED
        record.details["hypothesis"] = exc.hypothesis
        record.details["message"] = str(exc)
    except TorusError as exc:
        logger.error(f"{record.alpha_id}/{record.check} {record.parameter}: {exc}")
        record.status = STATUS_FAIL
        record.details["error"] = str(exc)
    finally:
        record.wall_time = time.perf_counter() - start


def _ratio(measured: Fraction, bound: Fraction) -> str:
    return f"{float(measured / bound):.6g}" if bound else ""


def theorem1_rows(name: str, R: ResonanceData, spec: SweepSpec) -> List[ReportRecord]:
    rows = []
    delta_max = theorem1_delta_max(R)
    for entry in spec.deltas:
        delta = parse_grid_value(entry, delta_max)
        record = ReportRecord(name, "theorem1", f"delta={delta}")
        with _timed(record):
            if delta > delta_max:
                raise HypothesisError("theorem1", f"δ={delta} exceeds δ_max={delta_max}")
            bracket = ergodization_time_bracket(R, delta, spec.tol, spec.epsilon)
            bound = bracket.bound.upper
            record.measured = f"{float(bracket.T_hi):.9g}"
            record.bound = f"{float(bound):.9g}"
            record.ratio = _ratio(bracket.T_hi, bound)
            converged = bracket.width <= bracket.tol
            record.status = STATUS_PASS if converged and bracket.T_hi <= bound else STATUS_FAIL
            record.details = reports.bracket_json(bracket)
        rows.append(record)
    return rows


def proposition_rows(name: str, R: ResonanceData, spec: SweepSpec) -> List[ReportRecord]:
    rows = []
    threshold = proposition_threshold(R)
    for entry in spec.Qs:
        Q = parse_grid_value(entry, threshold)
        record = ReportRecord(name, "proposition", f"Q={Q}")
        with _timed(record):
            approximation = find_periodic_basis(R, Q)
            report = certify(R, approximation)
            q_max = max(pair.q for pair in approximation.pairs)
            bound = report.q_bound.upper * report.bound_factor
            record.measured = str(q_max)
            record.bound = f"{float(bound):.9g}"
            record.ratio = _ratio(Fraction(q_max), bound)
            record.status = STATUS_PASS if report.passed else STATUS_FAIL
            record.details = reports.approximation_json(approximation, report)
        rows.append(record)
    return rows


def transference_row(name: str, L: IntLattice) -> ReportRecord:
    record = ReportRecord(name, "transference", f"d={L.rank}")
    with _timed(record):
        report = transference_check(L)
        record.measured = ";".join(str(p) for p in report.products)
        record.bound = f"[1, {report.upper}]"
        record.status = STATUS_PASS if report.passed else STATUS_FAIL
        record.details = reports.transference_json(report)
    return record


def theorem2_rows(name: str, alpha: RealScalar | None, deltas) -> List[ReportRecord]:
    rows = []
    for entry in deltas:
        delta = parse_grid_value(entry, Fraction(1))
        record = ReportRecord(name, "theorem2", f"delta={delta}")
        with _timed(record):
            if alpha is None:
                raise HypothesisError("theorem2", "the circle case needs n = 2")
            report = theorem2_check(RotationNumber.from_scalar(alpha, name), delta)
            record.measured = str(report.N)
            record.bound = str(report.bound)
            record.ratio = _ratio(Fraction(report.N), Fraction(report.bound)) if report.bound > 0 else ""
            record.status = STATUS_PASS if report.passed else STATUS_FAIL
            record.details = reports.theorem2_json(report)
        rows.append(record)
    return rows


def random_lattices(count: int, max_rank: int = 4, max_entry: int = 5, seed: int = 0) -> List[IntLattice]:
    """Full-rank-in-their-span integer lattices with small entries, reproducible from seed."""
    rng = np.random.default_rng(seed)
    lattices = []
    while len(lattices) < count:
        d = int(rng.integers(1, max_rank + 1))
        rows = rng.integers(-max_entry, max_entry + 1, size=(d, max_rank)).tolist()
        if rank(rows) == d:
            lattices.append(IntLattice.from_generators(rows, max_rank))
    return lattices


def _circle_alpha(R: ResonanceData) -> RealScalar | None:
    if R.n != 2:
        return None
    return R.alpha[1 - R.normalization.unit_index]


def vector_rows(vector: VectorSpec, spec: SweepSpec) -> List[ReportRecord]:
    R = analyze(vector.vector())
    rows: List[ReportRecord] = []
    if "theorem1" in spec.checks:
        rows += theorem1_rows(vector.name, R, spec)
    if "proposition" in spec.checks:
        rows += proposition_rows(vector.name, R, spec)
    if "transference" in spec.checks:
        rows.append(transference_row(vector.name, R.Lambda))
    if "theorem2" in spec.checks:
        rows += theorem2_rows(vector.name, _circle_alpha(R), spec.circle_deltas or DEFAULT_CIRCLE_DELTAS)
    return rows


def run_sweep(spec: SweepSpec) -> List[ReportRecord]:
    """All rows of a sweep, in input order."""
    rows: List[ReportRecord] = []
    for vector in spec.vectors:
        logger.info(f"Sweep {spec.name}: vector {vector.name}")
        rows += vector_rows(vector, spec)
    if "theorem2" in spec.checks:
        for ref in spec.rotations:
            name, alpha = resolve_rotation(ref)
            rows += theorem2_rows(name, alpha, spec.circle_deltas or DEFAULT_CIRCLE_DELTAS)
    if "transference" in spec.checks:
        options = spec.transference
        count = int(options.get("random_lattices", 0))
        lattices = random_lattices(
            count,
            int(options.get("max_rank", 4)),
            int(options.get("max_entry", 5)),
            int(options.get("seed", 0)),
        )
        for i, L in enumerate(lattices):
            rows.append(transference_row(f"random-{i}", L))
    logger.info(f"Sweep {spec.name}: {reports.summary_line(rows)}")
    return rows
