"""
Periodic approximations of α whose numerators form a basis of Λ.

For Q >= (n+2)Q_α there are d pairs (q_j, p_j) with p_j ∈ Λ,
|q_j α - p_j| <= d/Q and q_j <= d·d!·C_α·Ψ(2·d!·C_α·Q), such that the p_j
form a basis of Λ. The search scans q upward, keeps every pair passing the
certified threshold test and stops at the first q where d collected
numerators span Λ.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from utils import config, scalars
from utils.errors import HypothesisError, PropositionViolationError
from utils.lattice import dual_basis, hnf, index_in, rank
from utils.resonance import PsiValue, ResonanceData, psi
from utils.scalars import to_fraction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class PeriodicPair:
    q: int
    p: tuple[int, ...]

    @property
    def omega(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.q) for x in self.p)


@dataclass(frozen=True)
class PeriodicApproximation:
    Q: Fraction
    pairs: tuple[PeriodicPair, ...]
    certificates: tuple[CheckResult, ...] = field(default=(), compare=False)
    scanned_up_to: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CertificateReport:
    Q: Fraction
    q_bound: PsiValue
    bound_factor: int
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def proposition_threshold(R: ResonanceData) -> Fraction:
    return (R.n + 2) * R.Q_alpha


def _require_threshold(R: ResonanceData, Q: Fraction):
    if Q < proposition_threshold(R):
        raise HypothesisError(
            "proposition",
            f"Q={Q} is below (n+2)Q_α={proposition_threshold(R)}",
        )


def q_bound(R: ResonanceData, Q) -> tuple[int, PsiValue]:
    """(factor, Ψ) with the denominator bound factor·Ψ(2·d!·C_α·Q), factor = d·d!·C_α."""
    Q = to_fraction(Q)
    d_fact = math.factorial(R.d)
    return R.d * d_fact * R.C_alpha, psi(R, 2 * d_fact * R.C_alpha * Q)


def within_bound(q: int, factor: int, bound: PsiValue) -> bool:
    # q <= factor / |k·α|  <=>  factor - q·|k·α| >= 0
    return scalars.sign(scalars.rational(factor) - bound.resonance * q) >= 0


def is_close(R: ResonanceData, q: int, p: Sequence[int], threshold: Fraction) -> bool:
    """Certified test |qα - p|_inf <= threshold."""
    for a, pi in zip(R.alpha, p):
        diff = a * q - pi
        if scalars.sign(threshold - diff) < 0 or scalars.sign(threshold + diff) < 0:
            return False
    return True


def _candidates(R: ResonanceData, coords: np.ndarray, coord_err: np.ndarray, reach: np.ndarray, q: int):
    centre = coords * q
    slack = coord_err * q + 1e-9
    ranges = [
        range(math.floor(c - r - s), math.ceil(c + r + s) + 1)
        for c, r, s in zip(centre, reach, slack)
    ]
    for y in itertools.product(*ranges):
        p = R.Lambda.combine(y)
        if any(p):
            yield p


def _index(R: ResonanceData, chosen: list[PeriodicPair]) -> int | None:
    return index_in(R.Lambda, [pair.p for pair in chosen])


def _greedy(R: ResonanceData, chosen: list[PeriodicPair], pair: PeriodicPair) -> list[PeriodicPair]:
    """Add pair when it raises the rank; at full rank swap it in when the index drops."""
    if len(chosen) < R.d:
        if rank([c.p for c in chosen] + [pair.p]) > len(chosen):
            return chosen + [pair]
        return chosen
    current = _index(R, chosen)
    best, best_index = chosen, current
    for i in range(len(chosen)):
        trial = chosen[:i] + chosen[i + 1:] + [pair]
        idx = _index(R, trial)
        if idx is not None and (best_index is None or idx < best_index):
            best, best_index = trial, idx
    return best


def _exhaustive(R: ResonanceData, collected: list[PeriodicPair], pair: PeriodicPair, budget: list[int]):
    """Subsets of the earlier pairs completed by pair that span Λ, within the subset budget."""
    for combo in itertools.combinations(collected, R.d - 1):
        if budget[0] <= 0:
            return None
        budget[0] -= 1
        trial = list(combo) + [pair]
        if _index(R, trial) == 1:
            return trial
    return None


def find_periodic_basis(R: ResonanceData, Q) -> PeriodicApproximation:
    Q = to_fraction(Q)
    _require_threshold(R, Q)
    threshold = Fraction(R.d) / Q
    factor, bound = q_bound(R, Q)
    q_max = math.floor(factor * bound.upper)

    coords = R.Lambda.real_coordinates(list(R.alpha))
    pairs = [scalars.float_error(c) for c in coords]
    coord_f = np.array([p[0] for p in pairs])
    coord_err = np.array([p[1] for p in pairs])
    reach = np.array([float(sum(abs(x) for x in row) * threshold) for row in dual_basis(R.Lambda)])

    collected: list[PeriodicPair] = []
    chosen: list[PeriodicPair] = []
    budget = [config.subset_cap()]
    approx, err = R.alpha_floats
    for q in range(1, q_max + 1):
        for p in _candidates(R, coord_f, coord_err, reach, q):
            gap = float(np.max(np.abs(approx * q - np.array(p, dtype=float))))
            if gap > float(threshold) + q * float(err.max()) + 1e-9:
                continue
            if not is_close(R, q, p, threshold):
                continue
            pair = PeriodicPair(q, tuple(p))
            chosen = _greedy(R, chosen, pair)
            found = chosen if len(chosen) == R.d and _index(R, chosen) == 1 else None
            if found is None and R.d > 1 and budget[0] > 0:
                found = _exhaustive(R, collected, pair, budget)
                if budget[0] <= 0:
                    logger.warning(f"Subset budget of {config.subset_cap()} exhausted at q={q}")
            collected.append(pair)
            if found is not None:
                ordered = tuple(sorted(found, key=lambda pr: (pr.q, pr.p)))
                logger.info(
                    f"Periodic basis at Q={Q}: denominators {[pr.q for pr in ordered]} "
                    f"after {len(collected)} candidate pairs"
                )
                approximation = PeriodicApproximation(Q, ordered, scanned_up_to=q)
                report = certify(R, approximation)
                return PeriodicApproximation(Q, ordered, report.checks, q)
    raise PropositionViolationError(
        f"no periodic basis with q <= {q_max} at Q={Q}; {len(collected)} pairs collected"
    )


def certify(R: ResonanceData, A: PeriodicApproximation) -> CertificateReport:
    """Re-check every property of A from scratch; failures are reported, never raised."""
    checks = [
        CheckResult("count", len(A.pairs) == R.d, f"{len(A.pairs)} pairs for d={R.d}"),
        CheckResult(
            "hypothesis",
            A.Q >= proposition_threshold(R),
            f"Q={A.Q} against (n+2)Q_α={proposition_threshold(R)}",
        ),
    ]
    threshold = Fraction(R.d) / A.Q if A.Q > 0 else Fraction(0)
    # Ψ is undefined below Q_α
    factor, bound = q_bound(R, max(A.Q, proposition_threshold(R)))
    for pair in A.pairs:
        label = f"q={pair.q}, p={list(pair.p)}"
        checks.append(CheckResult("membership", R.Lambda.contains(pair.p), label))
        checks.append(
            CheckResult(
                "closeness",
                pair.q > 0 and is_close(R, pair.q, pair.p, threshold),
                f"{label}: |qα - p| <= {threshold}",
            )
        )
        checks.append(
            CheckResult(
                "q-bound",
                within_bound(pair.q, factor, bound),
                f"{label}: q <= {factor}·Ψ({bound.Q}) <= {float(factor * bound.upper):.6g}",
            )
        )
    stacked = [pair.p for pair in A.pairs]
    spans = bool(stacked) and len(stacked) == R.d and hnf(stacked) == R.Lambda.basis
    checks.append(CheckResult("basis", spans, f"HNF of numerators equals Λ: {spans}"))
    report = CertificateReport(A.Q, bound, factor, tuple(checks))
    for check in checks:
        if not check.passed:
            logger.warning(f"Certificate check {check.name} failed: {check.detail}")
    return report
