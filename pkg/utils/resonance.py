"""
Resonance structure of a frequency vector α.

analyze() builds the integer relations K = {k : k·α = 0}, the resonance
lattice Λ = F_α ∩ Z^n (the integer orthogonal complement of K) and its
constants Q_α, C_α. psi() evaluates the resonance profile

    Ψ(Q) = max{ |k·α|⁻¹ : k ∈ Λ, 0 < |k|_inf <= Q }

by fiber-wise enumeration in lattice coordinates: floats prune, exact
sign decisions certify the survivor.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from utils import config, scalars
from utils.errors import DomainError
from utils.lattice import IntLattice, box_fibers, gram_det, integer_kernel, orthogonal_integer_complement, shortest_vector
from utils.scalars import DyadicInterval, RealScalar, to_fraction

logger = logging.getLogger(__name__)

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class Normalization:
    """α_normalized = scale · α_raw, with component unit_index equal to 1."""

    raw: tuple[RealScalar, ...]
    scale: RealScalar
    unit_index: int
    alpha: tuple[RealScalar, ...]


@dataclass(frozen=True)
class ResonanceData:
    n: int
    alpha: tuple[RealScalar, ...]
    d: int
    K: IntLattice
    Lambda: IntLattice
    Q_alpha: Fraction
    C_alpha: int
    normalization: Normalization = field(compare=False)

    @property
    def scale(self) -> RealScalar:
        return self.normalization.scale

    @cached_property
    def alpha_floats(self) -> tuple[np.ndarray, np.ndarray]:
        """Float image of α with a rigorous per-component error bound."""
        pairs = [scalars.float_error(a) for a in self.alpha]
        return np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])

    def sup_norm_float(self) -> float:
        approx, err = self.alpha_floats
        return float(np.max(np.abs(approx) + err))


@dataclass(frozen=True)
class PsiValue:
    Q: Fraction
    witness: tuple[int, ...]
    resonance: RealScalar
    enclosure: DyadicInterval

    @property
    def upper(self) -> Fraction:
        return self.enclosure.upper

    @property
    def lower(self) -> Fraction:
        return self.enclosure.lower

    def __float__(self) -> float:
        return float(self.enclosure.midpoint)

    def floor(self) -> int:
        """Integer part of Ψ = 1/|k·α|, decided exactly."""
        m = math.floor(self.enclosure.lower)
        while scalars.sign(1 - self.resonance * (m + 1)) >= 0:
            m += 1
        while m > 0 and scalars.sign(1 - self.resonance * m) < 0:
            m -= 1
        return m


def _divide_by_component(raw: Sequence[RealScalar], index: int) -> Normalization:
    """Rescale by 1/α_i when α_i is irrational.

    With c0 the first constant of α_i, the normalized coordinates live on the
    constants 1 and c/α_i (c != c0); they are independent because the raw
    constants are, and α_i/α_i is exactly the rational 1.
    """
    pivot = raw[index]
    c0, p0 = pivot.terms[0]
    constants = sorted({c for a in raw for c in a.constants if c != c0}, key=lambda c: c.symbol)
    ratios = {c: scalars.quotient_constant(c, pivot) for c in constants}
    alpha = []
    for a in raw:
        lead = a.coefficient(c0) / p0
        terms = {scalars.ONE: lead}
        for c, u in ratios.items():
            terms[u] = a.coefficient(c) - lead * pivot.coefficient(c)
        alpha.append(scalars.combination(terms))
    scale = scalars.scalar(scalars.quotient_constant(scalars.ONE, pivot))
    logger.debug(f"Normalized by the irrational component {index}: {pivot}")
    return Normalization(tuple(raw), scale, index, tuple(alpha))


def _normalize(alpha: Sequence[RealScalar]) -> Normalization:
    for i, a in enumerate(alpha):
        if a.is_rational() and a.rational_value() == 1:
            return Normalization(tuple(alpha), scalars.rational(1), i, tuple(alpha))
    candidates = [
        (abs(a.rational_value()), i)
        for i, a in enumerate(alpha)
        if a.is_rational() and not a.is_zero()
    ]
    if candidates:
        # largest rational component, first index on ties
        _, index = max(candidates, key=lambda item: (item[0], -item[1]))
        factor = 1 / alpha[index].rational_value()
        return Normalization(
            tuple(alpha), scalars.rational(factor), index, tuple(a * factor for a in alpha)
        )
    # no rational component: divide by the first component of largest modulus
    index = 0
    for i, a in enumerate(alpha):
        if scalars.compare_abs(a, alpha[index]) > 0:
            index = i
    return _divide_by_component(alpha, index)


def analyze(alpha: Iterable[RealScalar]) -> ResonanceData:
    raw = tuple(a if isinstance(a, RealScalar) else scalars.rational(a) for a in alpha)
    if not raw:
        raise DomainError("α must have at least one component")
    if all(a.is_zero() for a in raw):
        raise DomainError("α = 0 has no resonance structure")
    n = len(raw)

    # K, Λ, Q_α and C_α do not depend on the scale, so they come from the raw α
    constants = sorted({c for a in raw for c in a.constants}, key=lambda c: c.symbol)
    coefficient_rows = [[a.coefficient(c) for a in raw] for c in constants]
    K = integer_kernel(coefficient_rows, n)
    Lambda = orthogonal_integer_complement(K)
    _, q_alpha = shortest_vector(Lambda, "sup")
    normalization = _normalize(raw)
    data = ResonanceData(
        n=n,
        alpha=normalization.alpha,
        d=Lambda.rank,
        K=K,
        Lambda=Lambda,
        Q_alpha=q_alpha,
        C_alpha=gram_det(Lambda),
        normalization=normalization,
    )
    logger.info(
        f"Analyzed α in dimension {n}: d={data.d}, Q_α={data.Q_alpha}, C_α={data.C_alpha}, scale={data.scale}"
    )
    return data


def reciprocal_enclosure(x: RealScalar, relative: Fraction = Fraction(1, 1 << 40)) -> DyadicInterval:
    """Enclosure of 1/x for x != 0 with width <= relative · |1/x|."""
    if x.is_zero():
        raise ZeroDivisionError("reciprocal of zero")
    if x.is_rational():
        return DyadicInterval.point(1 / x.rational_value())
    bits = config.precision_bits()
    while True:
        interval = x.enclose_bits(bits)
        if interval.sign() in (1, -1):
            inverse = interval.reciprocal()
            if inverse.width <= relative * min(abs(inverse.lower), abs(inverse.upper)):
                return inverse
        bits *= 2


def _survivors(R: ResonanceData, radius: int) -> list[tuple[int, ...]]:
    """Lattice vectors that may attain min |k·α| over the box, after float pruning."""
    fibers = box_fibers(R.Lambda, radius)
    approx, err = R.alpha_floats
    partial = fibers.partial.astype(float)
    last = fibers.last.astype(float)
    a = partial.dot(approx)
    b = float(last.dot(approx))
    lo = fibers.lo.astype(float)[:, None]
    hi = fibers.hi.astype(float)[:, None]

    base = np.floor(-a / b)
    ys = np.clip(base[:, None] + np.arange(-1, 3)[None, :], lo, hi)
    values = np.abs(a[:, None] + ys * b)
    origin_fiber = ~np.any(fibers.partial != 0, axis=1)
    values[origin_fiber[:, None] & (ys == 0)] = np.inf

    height = R.n * radius
    margin = height * float(err.max()) + 8 * R.n * _EPS * height * float(np.abs(approx).max()) + 1e-300
    best = float(values.min())
    rows, cols = np.nonzero(values <= best + 2 * margin)

    found = set()
    for i, j in zip(rows, cols):
        y = int(ys[i, j])
        k = tuple(int(p) + y * int(l) for p, l in zip(fibers.partial[i], fibers.last))
        found.add(k)
    logger.debug(f"psi: {fibers.count} fibers, {len(found)} survivors at radius {radius}")
    return sorted(found)


def psi(R: ResonanceData, Q) -> PsiValue:
    """Ψ(Q) with the witness oriented so that k·α > 0."""
    Q = to_fraction(Q)
    if Q < R.Q_alpha:
        raise DomainError(f"Ψ is undefined for Q={Q} below Q_α={R.Q_alpha}")
    best_k = None
    best = None
    for k in _survivors(R, math.floor(Q)):
        value = scalars.abs_scalar(scalars.dot(k, R.alpha))
        # k·α = ±k'·α forces k = ±k' inside Λ, so ties never change the witness
        if best is None or scalars.compare(value, best) < 0:
            best_k, best = k, value
    if scalars.sign(scalars.dot(best_k, R.alpha)) < 0:
        best_k = tuple(-x for x in best_k)
    return PsiValue(Q, best_k, best, reciprocal_enclosure(best))


def psi_profile(R: ResonanceData, Qs: Iterable) -> list[PsiValue]:
    return [psi(R, Q) for Q in Qs]


def theorem1_delta_max(R: ResonanceData) -> Fraction:
    """Largest δ allowed by the hypothesis δ <= d²((n+2)Q_α)⁻¹."""
    return Fraction(R.d**2) / ((R.n + 2) * R.Q_alpha)
