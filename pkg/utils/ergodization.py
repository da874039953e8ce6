"""
Orbit geometry on the leaf torus F_α / Λ.

Points of the leaf are given by their coordinates in the HNF basis of Λ and
distances are quotient sup-norm distances of the ambient space. A closed
leaf (d = 1) is decided exactly. Otherwise density is decided on cells of
the basis parallelepiped, split where the answer is still open: nearby orbit
samples are looked up with a chebyshev KDTree, the distance is taken to the
orbit pieces between them, and every float result is widened by an explicit
slack before it is compared with δ.
"""

import functools
import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np
from sklearn.neighbors import KDTree

from utils import config, scalars
from utils.approx import PeriodicPair, find_periodic_basis
from utils.errors import DomainError, HypothesisError
from utils.lattice import box_points, dual_basis, rational_inverse
from utils.resonance import PsiValue, ResonanceData, psi, theorem1_delta_max
from utils.scalars import DyadicInterval, RealScalar, to_fraction

logger = logging.getLogger(__name__)

_EPS = float(np.finfo(float).eps)
_CHUNK = 200_000
_MAX_DOUBLINGS = 40
_MAX_LEVELS = 12
_MAX_OPEN_CELLS = 250_000
_NEIGHBOURS = 4
_QUERY_CHUNK = 4096


class Density(str, Enum):
    DENSE = "DENSE"
    NOT_DENSE = "NOT_DENSE"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class OrbitSegment:
    R: ResonanceData
    T: Fraction


@dataclass(frozen=True)
class LeafGeometry:
    basis: np.ndarray
    dual: np.ndarray
    dual_l1: np.ndarray
    basis_sup: np.ndarray
    alpha: np.ndarray
    alpha_err: float
    speed: float

    @property
    def diameter(self) -> float:
        # reducing coordinates to [-1/2, 1/2] reaches any point within this sup distance
        return float(self.basis_sup.sum()) / 2


@functools.lru_cache(maxsize=32)
def leaf_geometry(R: ResonanceData) -> LeafGeometry:
    basis = np.array(R.Lambda.basis, dtype=float)
    dual = np.array([[float(x) for x in row] for row in dual_basis(R.Lambda)])
    approx, err = R.alpha_floats
    return LeafGeometry(
        basis=basis,
        dual=dual,
        dual_l1=np.abs(dual).sum(axis=1),
        basis_sup=np.abs(basis).max(axis=1),
        alpha=approx,
        alpha_err=float(err.max()),
        speed=R.sup_norm_float(),
    )


@dataclass(frozen=True)
class DensityVerdict:
    status: Density
    T: Fraction
    delta: Fraction
    epsilon: Fraction
    grid_shape: tuple[int, ...] = ()
    covering_radius: float = 0.0
    max_distance: float = 0.0
    slack: float = 0.0
    samples: int = 0
    witness: tuple[Fraction, ...] | None = None
    witness_distance: DyadicInterval | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "T": str(self.T),
            "delta": str(self.delta),
            "epsilon": str(self.epsilon),
            "grid_shape": list(self.grid_shape),
            "covering_radius": self.covering_radius,
            "max_distance": self.max_distance,
            "samples": self.samples,
            "witness": None if self.witness is None else [str(x) for x in self.witness],
            "witness_distance": None
            if self.witness_distance is None
            else list(self.witness_distance.decimal_strings()),
            "note": self.note,
        }


def _float_slack(geometry: LeafGeometry, T: float) -> float:
    reach = T * geometry.speed
    return T * geometry.alpha_err + 8 * _EPS * (reach + geometry.basis_sup.sum()) + 1e-12


def _reduce(geometry: LeafGeometry, points: np.ndarray) -> np.ndarray:
    """Subtract the lattice vector floor(coords)·B; the result lies in the basis parallelepiped."""
    coords = points.dot(geometry.dual.T)
    return points - np.floor(coords).dot(geometry.basis)


def _orbit_points(geometry: LeafGeometry, T: float, count: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    stop = count + 1 if stop is None else stop
    times = np.arange(start, stop, dtype=float) * (T / count) if count else np.zeros(1)
    return _reduce(geometry, times[:, None] * geometry.alpha[None, :])


def leaf_point(R: ResonanceData, coordinates: Sequence) -> tuple[Fraction, ...]:
    """Ambient rational point Σ c_j b_j for Λ-basis coordinates c."""
    coords = [to_fraction(c) for c in coordinates]
    if len(coords) != R.d:
        raise DomainError(f"expected {R.d} leaf coordinates, got {len(coords)}")
    return tuple(R.Lambda.combine(coords))


def leaf_coordinates(R: ResonanceData, point: Sequence) -> tuple[Fraction, ...]:
    coords = R.Lambda.rational_coordinates([to_fraction(x) for x in point])
    if coords is None:
        raise DomainError(f"point {list(point)} does not lie in F_α")
    return coords


def distance_to_orbit(R: ResonanceData, T, theta: Sequence, width=Fraction(1, 1000)) -> DyadicInterval:
    """Enclosure of min over t in [0, T], λ in Λ of |tα - θ - λ|_inf.

    θ is given by its coordinates in the Λ basis. The orbit is sampled with
    spacing at most width in the sup norm, so the enclosure has width about
    width/2 plus float slack.
    """
    T = to_fraction(T)
    if T < 0:
        raise DomainError("orbit segments need T >= 0")
    geometry = leaf_geometry(R)
    T_f = float(T)
    width_f = float(to_fraction(width))
    steps = math.ceil(T_f * geometry.speed / width_f) if T > 0 else 0
    steps = min(steps, config.max_samples())
    h_reach = T_f * geometry.speed / steps if steps else 0.0

    theta_c = np.array([float(to_fraction(c)) for c in theta]) % 1.0
    theta_x = theta_c.dot(geometry.basis)

    limit = geometry.diameter + h_reach
    bounds = [int(1 + math.floor(l1 * limit)) for l1 in geometry.dual_l1]
    shifts = np.array(list(itertools.product(*[range(-b, b + 1) for b in bounds])), dtype=float)
    offsets = shifts.dot(geometry.basis)

    best = math.inf
    chunk = max(1, _CHUNK // len(offsets))
    for start in range(0, steps + 1, chunk):
        samples = _orbit_points(geometry, T_f, steps, start, min(steps + 1, start + chunk))
        diff = (theta_x - samples)[:, None, :] - offsets[None, :, :]
        best = min(best, float(np.abs(diff).max(axis=2).min()))

    slack = _float_slack(geometry, T_f)
    lower = max(0.0, best - h_reach / 2 - slack)
    return DyadicInterval(Fraction(lower), Fraction(best + slack))


def _grid_shape(geometry: LeafGeometry, epsilon: float) -> tuple[int, ...]:
    d = geometry.basis.shape[0]
    return tuple(max(1, math.ceil(d * s / (2 * epsilon))) for s in geometry.basis_sup)


def _grid(shape: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    """Cell centres in Λ coordinates and the per-axis half width of a cell."""
    axes = [(np.arange(N) + 0.5) / N for N in shape]
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([m.reshape(-1) for m in mesh], axis=1)
    return centers, np.array([0.5 / N for N in shape])


def _subdivide(centers: np.ndarray, half: np.ndarray) -> np.ndarray:
    offsets = np.array(list(itertools.product((-0.5, 0.5), repeat=centers.shape[1]))) * half
    return (centers[:, None, :] + offsets[None, :, :]).reshape(-1, centers.shape[1])


def _segment_distance(starts: np.ndarray, steps: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Sup distance from points[q] to the nearest segment starts[q, m] + u·steps[q, m], u in [0, 1].

    max_j |a_j + u·b_j| is convex and piecewise linear in u, so its minimum is
    attained at an end point, a zero of one term or a crossing of two terms.
    """
    a = starts - points[:, None, :]
    b = steps
    n = a.shape[-1]
    candidates = [np.zeros(a.shape[:-1]), np.ones(a.shape[:-1])]
    with np.errstate(divide="ignore", invalid="ignore"):
        for j in range(n):
            candidates.append(-a[..., j] / b[..., j])
            for k in range(j + 1, n):
                for s in (1.0, -1.0):
                    candidates.append((s * a[..., k] - a[..., j]) / (b[..., j] - s * b[..., k]))
    u = np.stack(candidates, axis=-1)
    u = np.clip(np.nan_to_num(u, nan=0.0, posinf=0.0, neginf=0.0), 0.0, 1.0)
    values = np.abs(a[..., None, :] + u[..., None] * b[..., None, :]).max(axis=-1)
    return values.min(axis=(-1, -2))


@dataclass(frozen=True)
class _OrbitCloud:
    """Reduced orbit samples and their neighbouring Λ translates, indexed by a chebyshev KDTree."""

    tree: KDTree
    cloud: np.ndarray
    sample: np.ndarray
    step: np.ndarray
    last: int

    @classmethod
    def build(cls, geometry: LeafGeometry, T: float, steps: int) -> "_OrbitCloud":
        d, n = geometry.basis.shape
        samples = _orbit_points(geometry, T, steps)
        shifts = np.array(list(itertools.product((-1, 0, 1), repeat=d)), dtype=float).dot(geometry.basis)
        cloud = (samples[:, None, :] + shifts[None, :, :]).reshape(-1, n)
        step = geometry.alpha * (T / steps) if steps else np.zeros(n)
        return cls(
            KDTree(cloud, metric="chebyshev"),
            cloud,
            np.repeat(np.arange(len(samples)), len(shifts)),
            step,
            steps,
        )

    def distances(self, points: np.ndarray) -> np.ndarray:
        """Upper bounds for the distance of each point to the orbit segment."""
        k = min(_NEIGHBOURS, len(self.cloud))
        out = np.empty(len(points))
        for start in range(0, len(points), _QUERY_CHUNK):
            chunk = points[start : start + _QUERY_CHUNK]
            _, index = self.tree.query(chunk, k=k)
            starts = self.cloud[index]
            sample = self.sample[index][..., None]
            forward = np.where(sample < self.last, self.step, 0.0)
            backward = np.where(sample > 0, -self.step, 0.0)
            out[start : start + len(chunk)] = _segment_distance(
                np.concatenate([starts, starts], axis=1),
                np.concatenate([forward, backward], axis=1),
                chunk,
            )
        return out


def _circle_verdict(R: ResonanceData, T: Fraction, delta: Fraction, epsilon: Fraction) -> DensityVerdict | None:
    """Exact verdict on a closed leaf: the orbit covers an arc of T·|a| turns of α = a·b."""
    b = R.Lambda.basis[0]
    j = next(i for i, x in enumerate(b) if x)
    if not R.alpha[j].is_rational():
        return None
    a = R.alpha[j].rational_value() / b[j]
    s = max(abs(x) for x in b)
    covered = T * abs(a)
    farthest = max(Fraction(0), 1 - covered) * s / 2
    common = dict(grid_shape=(1,), max_distance=float(farthest), note="closed leaf")
    if farthest <= delta:
        return DensityVerdict(Density.DENSE, T, delta, epsilon, **common)
    witness = ((1 + covered) / 2,) if a > 0 else ((1 - covered) / 2,)
    return DensityVerdict(
        Density.NOT_DENSE,
        T,
        delta,
        epsilon,
        witness=witness,
        witness_distance=DyadicInterval.point(farthest),
        **common,
    )


def is_delta_dense(R: ResonanceData, T, delta, epsilon=None) -> DensityVerdict:
    """Three-valued, certified answer to "is the orbit segment of length T δ-dense?".

    Cells of the basis parallelepiped are split until each one is within δ
    of the orbit or a cell centre is certified farther than δ from it.
    """
    T, delta = to_fraction(T), to_fraction(delta)
    epsilon = to_fraction(epsilon) if epsilon is not None else delta / 8
    if delta <= 0 or epsilon <= 0:
        raise DomainError("δ and ε must be positive")
    if T < 0:
        raise DomainError("orbit segments need T >= 0")
    if R.d == 1:
        verdict = _circle_verdict(R, T, delta, epsilon)
        if verdict is not None:
            return verdict
    geometry = leaf_geometry(R)
    eps_f, T_f, delta_f = float(epsilon), float(T), float(delta)

    shape = _grid_shape(geometry, eps_f)
    budget = config.max_samples()
    if math.prod(shape) > budget:
        return DensityVerdict(Density.UNKNOWN, T, delta, epsilon, shape, note="grid exceeds sample budget")
    centers, half = _grid(shape)

    translates = 3**R.d
    steps = math.ceil(T_f * geometry.speed / eps_f) if T > 0 else 0
    steps = min(steps, max(1, budget // translates - 1))
    orbit = _OrbitCloud.build(geometry, T_f, steps)
    slack = _float_slack(geometry, T_f)

    common = dict(grid_shape=shape, slack=slack, samples=steps + 1)
    witness, enclosure, worst_distance = None, None, 0.0
    for level in range(_MAX_LEVELS + 1):
        rho = float(geometry.basis_sup.dot(half))
        upper = orbit.distances(centers.dot(geometry.basis)) + slack
        worst = int(np.argmax(upper))
        worst_distance = max(worst_distance, float(upper[worst])) if level else float(upper[worst])
        common.update(covering_radius=rho, max_distance=worst_distance)
        open_cells = upper + rho > delta_f
        if not open_cells.any():
            logger.debug(f"T={T}: DENSE after {level} subdivisions, covering radius {rho:.3g}")
            return DensityVerdict(Density.DENSE, T, delta, epsilon, note=f"{level} subdivisions", **common)

        # a witness needs the sampled distance to clear δ by more than half its sample spacing
        excess = Fraction(float(upper[worst]) - delta_f)
        if excess > epsilon / 256:
            candidate = tuple(Fraction(float(c)).limit_denominator(1 << 30) for c in centers[worst])
            if candidate != witness:
                witness = candidate
                enclosure = distance_to_orbit(R, T, witness, min(epsilon / 4, excess))
                if enclosure.lower > delta:
                    logger.debug(f"T={T}: NOT_DENSE, witness {witness} at distance >= {float(enclosure.lower):.6g}")
                    return DensityVerdict(
                        Density.NOT_DENSE, T, delta, epsilon, witness=witness, witness_distance=enclosure, **common
                    )

        if open_cells.sum() * 2**R.d > min(budget, _MAX_OPEN_CELLS):
            break
        centers = _subdivide(centers[open_cells], half)
        half = half / 2
    return DensityVerdict(
        Density.UNKNOWN,
        T,
        delta,
        epsilon,
        witness=witness,
        witness_distance=enclosure,
        note=f"undecided after {level} subdivisions",
        **common,
    )


@dataclass(frozen=True)
class Theorem1Bound:
    delta: Fraction
    C_d_alpha: int
    psi: PsiValue

    @property
    def enclosure(self) -> DyadicInterval:
        return self.psi.enclosure.scale(self.C_d_alpha)

    @property
    def upper(self) -> Fraction:
        return self.enclosure.upper


def theorem1_constant(R: ResonanceData) -> int:
    return R.d**2 * math.factorial(R.d) * R.C_alpha


def _require_theorem1(R: ResonanceData, delta: Fraction):
    delta_max = theorem1_delta_max(R)
    if not 0 < delta <= delta_max:
        raise HypothesisError(
            "theorem1",
            f"δ={delta} must satisfy 0 < δ <= d²((n+2)Q_α)⁻¹ = {delta_max}",
        )


def theorem1_bound(R: ResonanceData, delta) -> Theorem1Bound:
    """C_{d,α}·Ψ(2C_{d,α}/δ) with C_{d,α} = d²·d!·C_α."""
    delta = to_fraction(delta)
    _require_theorem1(R, delta)
    constant = theorem1_constant(R)
    return Theorem1Bound(delta, constant, psi(R, 2 * constant / delta))


@dataclass(frozen=True)
class VerdictStep:
    T: Fraction
    status: Density
    epsilon: Fraction


@dataclass(frozen=True)
class ErgodizationBracket:
    delta: Fraction
    T_lo: Fraction
    T_hi: Fraction
    tol: Fraction
    epsilon: Fraction
    trail: tuple[VerdictStep, ...] = field(default=(), compare=False)
    bound: Theorem1Bound | None = field(default=None, compare=False)

    @property
    def width(self) -> Fraction:
        return self.T_hi - self.T_lo

    def epsilon_at(self, T) -> Fraction:
        """Grid resolution of the decided verdict recorded at T."""
        T = to_fraction(T)
        for step in self.trail:
            if step.T == T and step.status != Density.UNKNOWN:
                return step.epsilon
        raise DomainError(f"no decided verdict recorded at T={T}")


def _decide(R, T, delta, epsilon, trail: list, refinements: int = 3) -> tuple[Density, Fraction]:
    """Density verdict at T, halving ε on UNKNOWN up to `refinements` times."""
    for _ in range(refinements + 1):
        verdict = is_delta_dense(R, T, delta, epsilon)
        trail.append(VerdictStep(T, verdict.status, epsilon))
        if verdict.status != Density.UNKNOWN:
            return verdict.status, epsilon
        epsilon = epsilon / 2
    return Density.UNKNOWN, epsilon


def _decide_nearby(R, T_lo, mid, T_hi, delta, epsilon, trail: list) -> tuple[Density, Fraction, Fraction]:
    """First decided verdict among the quarter points around an undecided midpoint."""
    for T in ((T_lo + mid) / 2, (mid + T_hi) / 2):
        status, epsilon = _decide(R, T, delta, epsilon, trail, refinements=1)
        if status != Density.UNKNOWN:
            return status, T, epsilon
    return Density.UNKNOWN, mid, epsilon


def _grid_fits(R: ResonanceData, epsilon: Fraction) -> bool:
    if R.d == 1:
        return True
    return math.prod(_grid_shape(leaf_geometry(R), float(epsilon))) <= config.max_samples()


def ergodization_time_bracket(R: ResonanceData, delta, tol=None, epsilon=None) -> ErgodizationBracket:
    """Certified bracket T_lo <= T_α(δ) <= T_hi with T_hi - T_lo <= tol.

    The horizon doubles from 1 (capped at theorem1_bound when δ is in
    range) until a DENSE segment is found, then bisection shrinks the bracket.
    An undecided midpoint is replaced by a decided quarter point, or ε is
    halved and the midpoint retried; DomainError is raised once the grid no
    longer fits the sample budget.
    """
    delta = to_fraction(delta)
    if delta <= 0:
        raise DomainError("δ must be positive")
    epsilon = to_fraction(epsilon) if epsilon is not None else delta / 8
    bound = theorem1_bound(R, delta) if delta <= theorem1_delta_max(R) else None
    cap = bound.upper if bound is not None else None
    trail: list[VerdictStep] = []

    status, epsilon = _decide(R, Fraction(0), delta, epsilon, trail)
    if status == Density.DENSE:
        return ErgodizationBracket(delta, Fraction(0), Fraction(0), to_fraction(tol or 0), epsilon, tuple(trail), bound)

    T_lo, T_hi = Fraction(0), Fraction(1)
    for _ in range(_MAX_DOUBLINGS):
        if cap is not None and T_hi > cap:
            T_hi = cap
        status, epsilon = _decide(R, T_hi, delta, epsilon, trail)
        if status == Density.DENSE:
            break
        if status == Density.NOT_DENSE:
            T_lo = T_hi
        if cap is not None and T_hi >= cap:
            logger.error(f"Segment at the theorem1 bound T={float(cap):.6g} is not certified dense")
            cap = None
        T_hi *= 2
        logger.info(f"δ={delta}: horizon doubled to {T_hi}")
    else:
        raise DomainError(f"no certified dense horizon for δ={delta} below T={T_hi}; lower ε or raise TORUS_MAX_SAMPLES")

    tol = to_fraction(tol) if tol is not None else T_hi / 100
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    while T_hi - T_lo > tol:
        mid = (T_lo + T_hi) / 2
        status, epsilon = _decide(R, mid, delta, epsilon, trail)
        if status == Density.UNKNOWN:
            status, mid, epsilon = _decide_nearby(R, T_lo, mid, T_hi, delta, epsilon, trail)
        if status == Density.DENSE:
            T_hi = mid
        elif status == Density.NOT_DENSE:
            T_lo = mid
        elif _grid_fits(R, epsilon / 2):
            epsilon = epsilon / 2
            logger.warning(f"δ={delta}: undecided around T={float(mid):.6g}; retrying at ε={epsilon}")
        else:
            raise DomainError(
                f"δ={delta}: density undecided on [{float(T_lo):.6g}, {float(T_hi):.6g}] within the sample "
                f"budget; raise tol or TORUS_MAX_SAMPLES"
            )
    logger.info(f"δ={delta}: bracket [{float(T_lo):.6g}, {float(T_hi):.6g}] after {len(trail)} verdicts")
    return ErgodizationBracket(delta, T_lo, T_hi, tol, epsilon, tuple(trail), bound)


def raw_time(R: ResonanceData, T) -> RealScalar:
    """Time for the un-normalized vector: the normalized flow runs |scale| times slower."""
    return scalars.abs_scalar(R.scale) * to_fraction(T)


@dataclass(frozen=True)
class HitResult:
    delta: Fraction
    target: tuple[Fraction, ...]
    pairs: tuple[PeriodicPair, ...]
    coefficients: tuple[Fraction, ...]
    T_star: Fraction
    residual: tuple[RealScalar, ...]
    residual_enclosure: DyadicInterval
    within_delta: bool
    within_bound: bool
    bound: Theorem1Bound


def constructive_hit(R: ResonanceData, delta, theta: Sequence) -> HitResult:
    """Hitting time built from a periodic basis at Q = d²/δ.

    θ is given in Λ-basis coordinates. Writing θ = Σ t_j p_j mod Λ with
    t_j in [0, 1) gives T* = Σ t_j q_j and T*α - θ ≡ Σ t_j (q_j α - p_j).
    """
    delta = to_fraction(delta)
    _require_theorem1(R, delta)
    coords = [to_fraction(c) for c in theta]
    if len(coords) != R.d:
        raise DomainError(f"expected {R.d} leaf coordinates, got {len(coords)}")
    approximation = find_periodic_basis(R, Fraction(R.d**2) / delta)
    pairs = approximation.pairs
    change = [R.Lambda.coordinates(pair.p) for pair in pairs]
    inverse = rational_inverse(change)
    t = [sum(c * inverse[i][j] for i, c in enumerate(coords)) for j in range(R.d)]
    t = tuple(x - math.floor(x) for x in t)
    T_star = sum((tj * pair.q for tj, pair in zip(t, pairs)), Fraction(0))

    residual = []
    for i in range(R.n):
        total = RealScalar()
        for tj, pair in zip(t, pairs):
            if tj:
                total = total + (R.alpha[i] * pair.q - pair.p[i]) * tj
        residual.append(total)
    within = all(
        scalars.sign(delta - r) >= 0 and scalars.sign(delta + r) >= 0 for r in residual
    )
    width = delta / 1_000_000
    uppers = [scalars.enclose(scalars.abs_scalar(r), width) for r in residual]
    enclosure = DyadicInterval(
        max(u.lower for u in uppers), max(u.upper for u in uppers)
    ) if uppers else DyadicInterval.point(0)

    bound = theorem1_bound(R, delta)
    below = within_bound_time(T_star, bound)
    if not (within and below):
        logger.error(f"Constructive hit violates its guarantees: T*={T_star}, residual {enclosure}")
    return HitResult(
        delta, tuple(coords), pairs, t, T_star, tuple(residual), enclosure, within, below, bound
    )


def within_bound_time(T, bound: Theorem1Bound) -> bool:
    """Exact test T <= C_{d,α}·Ψ, i.e. C_{d,α} - T·|k·α| >= 0."""
    T = to_fraction(T)
    return scalars.sign(scalars.rational(bound.C_d_alpha) - bound.psi.resonance * T) >= 0


@dataclass(frozen=True)
class EmpiricalGamma:
    tau: Fraction
    radius: int
    value: DyadicInterval
    witness: tuple[int, ...]


def empirical_gamma(R: ResonanceData, tau, radius: int | None = None) -> EmpiricalGamma:
    """Enclosure of min |k·α|·|k|^τ over nonzero k in Λ with |k|_inf <= radius."""
    tau = to_fraction(tau)
    radius = int(radius or config.diophantine_radius())
    points = box_points(R.Lambda, radius).astype(float)
    approx, err = R.alpha_floats
    heights = np.abs(points).max(axis=1)
    powers = heights ** float(tau)
    resonance = np.abs(points.dot(approx))
    values = resonance * powers
    errors = (
        powers * (np.abs(points).dot(err + 4 * _EPS * np.abs(approx)))
        + 16 * _EPS * values
        + 1e-300
    )
    best = int(np.argmin(values))
    lower = float(np.min(values - errors))
    upper = float(values[best] + errors[best])
    witness = tuple(int(x) for x in points[best])
    return EmpiricalGamma(tau, radius, DyadicInterval(Fraction(max(lower, 0.0)), Fraction(upper)), witness)


@dataclass(frozen=True)
class DiophantineBound:
    gamma: Fraction
    tau: Fraction
    delta: Fraction
    C_d_alpha: int
    value: DyadicInterval
    empirical: EmpiricalGamma


def diophantine_bound(R: ResonanceData, gamma, tau, delta) -> DiophantineBound:
    """C_{d,α}·γ⁻¹·(2C_{d,α}/δ)^τ, after checking γ against the enumerated γ̂."""
    gamma, tau, delta = to_fraction(gamma), to_fraction(tau), to_fraction(delta)
    if gamma <= 0:
        raise HypothesisError("diophantine", f"γ={gamma} must be positive")
    if tau < R.n - 1:
        raise HypothesisError("diophantine", f"τ={tau} must be at least n-1={R.n - 1}")
    _require_theorem1(R, delta)
    constant = theorem1_constant(R)
    Q = 2 * constant / delta
    empirical = empirical_gamma(R, tau, min(math.floor(Q), config.diophantine_radius()))
    if gamma > empirical.value.upper:
        raise HypothesisError(
            "diophantine",
            f"γ={gamma} exceeds γ̂ <= {float(empirical.value.upper):.6g} "
            f"attained at k={list(empirical.witness)}",
        )
    if tau.denominator == 1:
        exact = constant / gamma * Q ** int(tau)
        value = DyadicInterval.point(exact)
    else:
        approx = float(constant / gamma) * float(Q) ** float(tau)
        value = DyadicInterval(
            Fraction(math.nextafter(approx * (1 - 8 * _EPS), 0.0)),
            Fraction(math.nextafter(approx * (1 + 8 * _EPS), math.inf)),
        )
    return DiophantineBound(gamma, tau, delta, constant, value, empirical)
