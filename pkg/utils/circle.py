"""
Circle rotations x -> x + α mod 1.

The finite orbit {0, α, ..., Nα} mod 1 is kept as an exactly sorted list;
a set on the circle is δ-dense iff its largest circular gap is at most 2δ.
"""

import bisect
import functools
import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from utils import config, scalars
from utils.errors import DomainError, HypothesisError
from utils.resonance import PsiValue, analyze, psi
from utils.scalars import DyadicInterval, RealScalar, to_fraction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RotationNumber:
    alpha: RealScalar
    label: str = ""

    def __post_init__(self):
        if scalars.compare_abs(self.alpha, scalars.rational(1)) > 0:
            raise DomainError(f"rotation number {self.alpha} has |α| > 1; use RotationNumber.from_scalar")

    @classmethod
    def from_scalar(cls, x: RealScalar, label: str = "") -> "RotationNumber":
        """α mod 1, in [0, 1)."""
        return cls(x - scalars.floor(x), label or str(x))

    @classmethod
    def from_fraction(cls, value, label: str = "") -> "RotationNumber":
        q = to_fraction(value)
        return cls.from_scalar(scalars.rational(q), label or str(q))

    @property
    def is_rational(self) -> bool:
        return self.alpha.is_rational()

    @property
    def fraction(self) -> Fraction:
        return self.alpha.rational_value()

    @property
    def denominator(self) -> int | None:
        return self.fraction.denominator if self.is_rational else None

    def __str__(self) -> str:
        return self.label or str(self.alpha)


class _SortedOrbit:
    """Orbit points in [0, 1) kept sorted, with a multiset of circular gaps."""

    def __init__(self, threshold: RealScalar | None = None):
        self.points: list[RealScalar] = []
        self.keys: list[float] = []
        self.errors: list[float] = []
        self.gaps: Counter = Counter()
        self.threshold = threshold
        self.wide = 0
        self._wide_cache: dict[RealScalar, bool] = {}

    def _is_wide(self, gap: RealScalar) -> bool:
        if self.threshold is None:
            return False
        if gap not in self._wide_cache:
            self._wide_cache[gap] = scalars.compare(gap, self.threshold) > 0
        return self._wide_cache[gap]

    def _add_gap(self, gap: RealScalar):
        self.gaps[gap] += 1
        self.wide += self._is_wide(gap)

    def _drop_gap(self, gap: RealScalar):
        self.gaps[gap] -= 1
        if not self.gaps[gap]:
            del self.gaps[gap]
        self.wide -= self._is_wide(gap)

    def _less(self, i: int, key: float, err: float, x: RealScalar) -> bool:
        """points[i] < x, from floats when the enclosures are disjoint."""
        if self.keys[i] + self.errors[i] < key - err:
            return True
        if self.keys[i] - self.errors[i] > key + err:
            return False
        return scalars.compare(self.points[i], x) < 0

    def _gap_between(self, i: int, j: int) -> RealScalar:
        # i is followed by j in circular order
        gap = self.points[j] - self.points[i]
        return gap if j > i else gap + 1

    def insert(self, x: RealScalar) -> bool:
        key, err = scalars.float_error(x)
        pos = bisect.bisect_left(self.keys, key)
        while pos > 0 and not self._less(pos - 1, key, err, x):
            pos -= 1
        while pos < len(self.points) and self._less(pos, key, err, x):
            pos += 1
        if pos < len(self.points) and self.points[pos] == x:
            return False
        count = len(self.points)
        if count:
            left = (pos - 1) % count
            right = pos % count
            self._drop_gap(self._gap_between(left, right) if count > 1 else scalars.rational(1))
        self.points.insert(pos, x)
        self.keys.insert(pos, key)
        self.errors.insert(pos, err)
        count += 1
        if count == 1:
            self._add_gap(scalars.rational(1))
            return True
        left, right = (pos - 1) % count, (pos + 1) % count
        self._add_gap(self._gap_between(left, pos))
        self._add_gap(self._gap_between(pos, right))
        return True

    def ordered_gaps(self) -> list[RealScalar]:
        count = len(self.points)
        if count == 1:
            return [scalars.rational(1)]
        return [self._gap_between(i, (i + 1) % count) for i in range(count)]


@dataclass(frozen=True)
class GapProfile:
    N: int
    points: tuple[RealScalar, ...]
    gaps: tuple[RealScalar, ...]
    distinct: tuple[RealScalar, ...]

    @property
    def distinct_count(self) -> int:
        return len(self.distinct)

    @property
    def max_gap(self) -> RealScalar:
        return self.distinct[-1]

    def enclosures(self, width=Fraction(1, 10**12)) -> list[DyadicInterval]:
        return [scalars.enclose(g, width) for g in self.gaps]


def _sort_scalars(values) -> list[RealScalar]:
    return sorted(values, key=functools.cmp_to_key(scalars.compare))


def _fractional_part(x: RealScalar) -> RealScalar:
    return x - scalars.floor(x)


def gap_profile(alpha: RotationNumber, N: int) -> GapProfile:
    """Circular gaps of {iα mod 1 : 0 <= i <= N}, starting from the point 0."""
    if N < 0:
        raise DomainError("N must be nonnegative")
    orbit = _SortedOrbit()
    point = scalars.rational(0)
    for _ in range(N + 1):
        orbit.insert(point)
        point = _fractional_part(point + alpha.alpha)
    return GapProfile(
        N,
        tuple(orbit.points),
        tuple(orbit.ordered_gaps()),
        tuple(_sort_scalars(orbit.gaps)),
    )


def _require_delta(delta: Fraction, name: str):
    if not 0 < delta < 1:
        raise HypothesisError(name, f"δ={delta} must lie in (0, 1)")


def ergodization_steps(alpha: RotationNumber, delta) -> int | None:
    """Smallest N with {0, α, ..., Nα} δ-dense, or None when it does not exist.

    For α = p/q the value is defined iff δ >= 1/q.
    """
    delta = to_fraction(delta)
    _require_delta(delta, "circle")
    if alpha.is_rational and delta < Fraction(1, alpha.denominator):
        return None
    orbit = _SortedOrbit(threshold=scalars.rational(2 * delta))
    point = scalars.rational(0)
    cap = config.circle_step_cap()
    for N in range(cap + 1):
        orbit.insert(point)
        if orbit.wide == 0:
            logger.debug(f"N_α(δ) = {N} for α={alpha}, δ={delta}")
            return N
        point = _fractional_part(point + alpha.alpha)
    raise DomainError(f"N_α(δ) exceeds the step cap {cap} for α={alpha}, δ={delta}")


def _dirichlet_scan(alpha: RotationNumber, q_max: int, tolerance: RealScalar) -> tuple[int, int] | None:
    for q in range(1, q_max + 1):
        x = alpha.alpha * q
        p = scalars.nearest_integer(x)
        diff = x - p
        if scalars.sign(tolerance - diff) >= 0 and scalars.sign(tolerance + diff) >= 0:
            return q, p
    return None


def dirichlet_pair(alpha: RotationNumber, Q) -> tuple[int, int]:
    """Smallest q <= Q with |qα - p| <= 1/Q for p the nearest integer to qα.

    A rational α whose denominator is at most Q gives its exact (q, p).
    """
    Q = to_fraction(Q)
    if Q < 1:
        raise DomainError(f"Q={Q} must be at least 1")
    if alpha.is_rational and alpha.denominator <= Q:
        f = alpha.fraction
        return f.denominator, f.numerator
    found = _dirichlet_scan(alpha, math.floor(Q), scalars.rational(1 / Q))
    if found is None:
        raise DomainError(f"no Dirichlet pair for α={alpha} with q <= {Q}")
    return found


@dataclass(frozen=True)
class Theorem2Report:
    alpha: RotationNumber
    delta: Fraction
    psi: PsiValue
    bound: int
    N: int
    passed: bool


def _require_irrational(alpha: RotationNumber):
    if alpha.is_rational:
        raise HypothesisError("theorem2", f"α={alpha} is rational")


def theorem2_check(alpha: RotationNumber, delta) -> Theorem2Report:
    """N_α(δ) <= [Ψ_α(2/δ)] - 1 with Ψ_α the profile of (1, α)."""
    delta = to_fraction(delta)
    _require_irrational(alpha)
    _require_delta(delta, "theorem2")
    value = psi(analyze((scalars.rational(1), alpha.alpha)), 2 / delta)
    bound = value.floor() - 1
    N = ergodization_steps(alpha, delta)
    passed = N is not None and N <= bound
    if not passed:
        logger.error(f"Circle bound [Ψ(2/δ)] - 1 fails for α={alpha}, δ={delta}: N={N}, bound={bound}")
    return Theorem2Report(alpha, delta, value, bound, N, passed)


@dataclass(frozen=True)
class ProofMechanicsReport:
    alpha: RotationNumber
    delta: Fraction
    psi: PsiValue
    q: int
    p: int
    rational_dense: bool
    pointwise_close: bool

    @property
    def passed(self) -> bool:
        return self.rational_dense and self.pointwise_close


def proof_mechanics_check(alpha: RotationNumber, delta) -> ProofMechanicsReport:
    """Replays the Dirichlet step: (q, p) with |qα - p| <= Ψ⁻¹ and q <= Ψ, then
    checks that {i·p/q} (i < q) is δ/2-dense and stays within δ/2 of {iα}."""
    delta = to_fraction(delta)
    _require_irrational(alpha)
    _require_delta(delta, "theorem2")
    value = psi(analyze((scalars.rational(1), alpha.alpha)), 2 / delta)
    found = _dirichlet_scan(alpha, value.floor(), value.resonance)
    if found is None:
        logger.error(f"No Dirichlet pair below Ψ={float(value):.6g} for α={alpha}")
        return ProofMechanicsReport(alpha, delta, value, 0, 0, False, False)
    q, p = found
    half = delta / 2
    profile = gap_profile(RotationNumber.from_fraction(Fraction(p, q)), q - 1)
    # δ/2-dense means no gap wider than δ
    rational_dense = math.gcd(q, p) == 1 and scalars.compare(profile.max_gap, scalars.rational(delta)) <= 0
    # max over i < q of |iα - ip/q| = (q-1)|qα - p|/q
    drift = scalars.abs_scalar(alpha.alpha * q - p) * Fraction(q - 1, q)
    pointwise_close = scalars.compare(drift, scalars.rational(half)) <= 0
    return ProofMechanicsReport(alpha, delta, value, q, p, rational_dense, pointwise_close)
