"""
Report records and their JSON / CSV forms.

Rationals are written as "p/q" strings and intervals as decimal [lower,
upper] pairs with their exact endpoints, so a report read back from JSON
reproduces every exact value.
"""

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, TextIO

from utils.approx import CertificateReport, PeriodicApproximation
from utils.circle import GapProfile, ProofMechanicsReport, Theorem2Report
from utils.ergodization import DiophantineBound, ErgodizationBracket, HitResult, Theorem1Bound
from utils.lattice import IntLattice, TransferenceReport
from utils.resonance import PsiValue, ResonanceData
from utils.scalars import DyadicInterval, RealScalar

logger = logging.getLogger(__name__)

CSV_VERSION_LINE = "# torus-resonance-csv v1"
CSV_COLUMNS = ["alpha_id", "check", "parameter", "measured", "bound", "ratio", "status", "wall_time"]

STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_SKIPPED = "skipped: hypothesis"
STATUS_DIAGNOSTIC = "diagnostic"


@dataclass
class ReportRecord:
    alpha_id: str
    check: str
    parameter: str = ""
    measured: str = ""
    bound: str = ""
    ratio: str = ""
    status: str = STATUS_PASS
    wall_time: float = 0.0
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.status == STATUS_FAIL

    def csv_row(self) -> List[str]:
        return [
            self.alpha_id,
            self.check,
            self.parameter,
            self.measured,
            self.bound,
            self.ratio,
            self.status,
            f"{self.wall_time:.3f}",
        ]


def fraction_str(value) -> str:
    return str(Fraction(value))


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def interval_json(interval: DyadicInterval, digits: int = 12) -> Dict:
    lo, hi = interval.decimal_strings(digits)
    return {
        "decimal": [lo, hi],
        "exact": [fraction_str(interval.lower), fraction_str(interval.upper)],
        "width": f"{float(interval.width):.3e}",
    }


def scalar_json(x: RealScalar) -> Dict:
    return {
        "expression": str(x),
        "coefficients": {c.symbol: fraction_str(q) for c, q in x.terms},
    }


def lattice_json(L: IntLattice) -> List[List[str]]:
    return L.to_json()


def resonance_json(R: ResonanceData) -> Dict:
    return {
        "n": R.n,
        "d": R.d,
        "alpha": [scalar_json(a) for a in R.alpha],
        "K": lattice_json(R.K),
        "Lambda": lattice_json(R.Lambda),
        "Q_alpha": fraction_str(R.Q_alpha),
        "C_alpha": str(R.C_alpha),
        "scale": str(R.scale),
        "unit_index": R.normalization.unit_index,
    }


def psi_json(value: PsiValue) -> Dict:
    return {
        "Q": fraction_str(value.Q),
        "witness": [str(x) for x in value.witness],
        "resonance": scalar_json(value.resonance),
        "value": interval_json(value.enclosure),
    }


def approximation_json(A: PeriodicApproximation, report: CertificateReport) -> Dict:
    return {
        "Q": fraction_str(A.Q),
        "pairs": [
            {
                "q": str(pair.q),
                "p": [str(x) for x in pair.p],
                "omega": [fraction_str(x) for x in pair.omega],
            }
            for pair in A.pairs
        ],
        "q_bound": {
            "factor": str(report.bound_factor),
            "psi": psi_json(report.q_bound),
            "value": interval_json(report.q_bound.enclosure.scale(report.bound_factor)),
        },
        "certificates": [c.to_dict() for c in report.checks],
        "passed": report.passed,
    }


def theorem1_json(bound: Theorem1Bound) -> Dict:
    return {
        "delta": fraction_str(bound.delta),
        "C_d_alpha": str(bound.C_d_alpha),
        "psi": psi_json(bound.psi),
        "bound": interval_json(bound.enclosure),
    }


def bracket_json(bracket: ErgodizationBracket) -> Dict:
    return {
        "delta": fraction_str(bracket.delta),
        "T_lo": fraction_str(bracket.T_lo),
        "T_hi": fraction_str(bracket.T_hi),
        "T_lo_decimal": f"{float(bracket.T_lo):.9g}",
        "T_hi_decimal": f"{float(bracket.T_hi):.9g}",
        "tol": fraction_str(bracket.tol),
        "epsilon": fraction_str(bracket.epsilon),
        "verdicts": [
            {"T": fraction_str(step.T), "status": step.status.value, "epsilon": fraction_str(step.epsilon)}
            for step in bracket.trail
        ],
        "bound": None if bracket.bound is None else interval_json(bracket.bound.enclosure),
        "C_d_alpha": None if bracket.bound is None else str(bracket.bound.C_d_alpha),
    }


def hit_json(hit: HitResult) -> Dict:
    return {
        "delta": fraction_str(hit.delta),
        "target": [fraction_str(x) for x in hit.target],
        "pairs": [{"q": str(p.q), "p": [str(x) for x in p.p]} for p in hit.pairs],
        "coefficients": [fraction_str(x) for x in hit.coefficients],
        "T_star": fraction_str(hit.T_star),
        "residual": [scalar_json(r) for r in hit.residual],
        "residual_norm": interval_json(hit.residual_enclosure),
        "within_delta": hit.within_delta,
        "within_bound": hit.within_bound,
    }


def diophantine_json(result: DiophantineBound) -> Dict:
    return {
        "gamma": fraction_str(result.gamma),
        "tau": fraction_str(result.tau),
        "delta": fraction_str(result.delta),
        "C_d_alpha": str(result.C_d_alpha),
        "bound": interval_json(result.value),
        "empirical_gamma": interval_json(result.empirical.value),
        "empirical_radius": result.empirical.radius,
        "empirical_witness": [str(x) for x in result.empirical.witness],
    }


def transference_json(report: TransferenceReport) -> Dict:
    return {
        "d": report.d,
        "primal": [fraction_str(v) for v in report.primal.values],
        "primal_witnesses": [[str(x) for x in w] for w in report.primal.witnesses],
        "dual": [fraction_str(v) for v in report.dual_values],
        "dual_witnesses": [[fraction_str(x) for x in w] for w in report.dual_witnesses],
        "products": [fraction_str(p) for p in report.products],
        "upper": str(report.upper),
        "passed": report.passed,
    }


def gap_profile_json(profile: GapProfile) -> Dict:
    return {
        "N": profile.N,
        "gaps": [interval_json(iv) for iv in profile.enclosures()],
        "distinct": [scalar_json(g) for g in profile.distinct],
        "distinct_count": profile.distinct_count,
    }


def theorem2_json(report: Theorem2Report) -> Dict:
    return {
        "alpha": str(report.alpha),
        "delta": fraction_str(report.delta),
        "N": report.N,
        "psi": psi_json(report.psi),
        "bound": report.bound,
        "pass": report.passed,
    }


def proof_mechanics_json(report: ProofMechanicsReport) -> Dict:
    return {
        "alpha": str(report.alpha),
        "delta": fraction_str(report.delta),
        "q": report.q,
        "p": report.p,
        "rational_orbit_dense": report.rational_dense,
        "pointwise_close": report.pointwise_close,
        "pass": report.passed,
    }


def write_json(payload, stream: TextIO):
    if isinstance(payload, list) and payload and isinstance(payload[0], ReportRecord):
        payload = [asdict(record) for record in payload]
    json.dump(payload, stream, indent=2, ensure_ascii=False)
    stream.write("\n")


def read_records(stream: TextIO) -> List[ReportRecord]:
    return [ReportRecord(**row) for row in json.load(stream)]


def write_csv(records: Iterable[ReportRecord], stream: TextIO):
    stream.write(CSV_VERSION_LINE + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in records:
        writer.writerow(record.csv_row())


def read_csv(stream: TextIO) -> List[Dict[str, str]]:
    first = stream.readline().strip()
    if first != CSV_VERSION_LINE:
        raise ValueError(f"unsupported CSV header {first!r}")
    return list(csv.DictReader(stream))


def csv_text(records: Iterable[ReportRecord]) -> str:
    buffer = io.StringIO()
    write_csv(records, buffer)
    return buffer.getvalue()


def summary_line(records: List[ReportRecord]) -> str:
    passed = sum(r.status == STATUS_PASS for r in records)
    failed = sum(r.status == STATUS_FAIL for r in records)
    skipped = sum(r.status == STATUS_SKIPPED for r in records)
    line = f"{len(records)} rows: {passed} pass, {failed} fail, {skipped} skipped"
    diagnostics = len(records) - passed - failed - skipped
    return f"{line}, {diagnostics} diagnostic" if diagnostics else line
