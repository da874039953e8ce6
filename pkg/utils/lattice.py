"""
Exact integer lattice linear algebra.

Lattices are sublattices of Z^n stored by their row Hermite normal form, so
two IntLattice values are equal iff they are the same lattice. Normal forms,
kernels, determinants and inverses run on sympy DomainMatrix over ZZ or QQ;
box enumeration uses numpy arrays in lattice coordinates: the outer
coordinates are bounded through the dual basis, the innermost one is solved
in closed form per fiber.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form

from utils.errors import DimensionMismatchError, DomainError
from utils.scalars import RealScalar, to_fraction

logger = logging.getLogger(__name__)

NORMS = ("sup", "l1", "dual-sup")

IntMatrix = tuple[tuple[int, ...], ...]
RationalMatrix = tuple[tuple[Fraction, ...], ...]

_INT64_SAFE = 1 << 62


def _object_array(rows, ncols: int | None = None) -> np.ndarray:
    rows = [[int(x) for x in row] for row in rows]
    if not rows:
        return np.zeros((0, ncols or 0), dtype=object)
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        raise DimensionMismatchError(f"ragged matrix with row lengths {sorted(widths)}")
    arr = np.empty((len(rows), widths.pop()), dtype=object)
    for i, row in enumerate(rows):
        arr[i, :] = row
    return arr


def _rows(arr: np.ndarray) -> IntMatrix:
    return tuple(tuple(int(x) for x in row) for row in arr)


# --- DomainMatrix conversions -----------------------------------------------


def _shape(rows, ncols: int | None = None) -> tuple[int, int]:
    widths = {len(row) for row in rows}
    if len(widths) > 1:
        raise DimensionMismatchError(f"ragged matrix with row lengths {sorted(widths)}")
    return len(rows), widths.pop() if widths else (ncols or 0)


def _zz(rows, ncols: int | None = None) -> DomainMatrix:
    rows = [list(row) for row in rows]
    return DomainMatrix([[ZZ(int(x)) for x in row] for row in rows], _shape(rows, ncols), ZZ)


def _qq(rows, ncols: int | None = None) -> DomainMatrix:
    rows = [[to_fraction(x) for x in row] for row in rows]
    entries = [[QQ(x.numerator, x.denominator) for x in row] for row in rows]
    return DomainMatrix(entries, _shape(rows, ncols), QQ)


def _fraction(domain, x) -> Fraction:
    r = domain.to_sympy(x)
    return Fraction(int(r.p), int(r.q))


def _fraction_rows(M: DomainMatrix) -> RationalMatrix:
    return tuple(tuple(Fraction(int(x.p), int(x.q)) for x in row) for row in M.to_Matrix().tolist())


def _int_rows(M: DomainMatrix) -> IntMatrix:
    return tuple(tuple(int(x) for x in row) for row in M.to_Matrix().tolist())


def hnf(M: Sequence[Sequence[int]]) -> IntMatrix:
    """Row Hermite normal form with zero rows dropped; row space is preserved.

    sympy reduces columns from the bottom row up, so the input is transposed
    with both axes reversed and the resulting columns are read back reversed.
    n zero generators are appended so every row gets a pivot pass even when
    the generators are dependent.
    """
    rows = [[int(x) for x in row] for row in M]
    if not rows:
        return ()
    n = _shape(rows)[1]
    rows = rows + [[0] * n for _ in range(n)]
    flipped = [[row[n - 1 - i] for row in reversed(rows)] for i in range(n)]
    W = hermite_normal_form(_zz(flipped, len(rows)))
    if W.shape[1] == 0:
        return ()
    columns = list(zip(*_int_rows(W)))
    return tuple(tuple(reversed(col)) for col in reversed(columns))


def _integral_rows(M) -> list[list[int]]:
    rows = []
    for row in M:
        fracs = [to_fraction(x) for x in row]
        scale = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
        rows.append([int(f * scale) for f in fracs])
    return rows


# --- rational helpers -------------------------------------------------------


def rank(rows) -> int:
    rows = [list(row) for row in rows]
    if not rows:
        return 0
    return _qq(rows).rank()


def determinant(matrix) -> Fraction:
    rows = [list(row) for row in matrix]
    if any(len(row) != len(rows) for row in rows):
        raise DimensionMismatchError("determinant of a non-square matrix")
    if not rows:
        return Fraction(1)
    return _fraction(QQ, _qq(rows).det())


def rational_inverse(matrix) -> RationalMatrix:
    M = _qq([list(row) for row in matrix])
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatchError("inverse of a non-square matrix")
    if M.det() == QQ.zero:
        raise DomainError("matrix is singular")
    return _fraction_rows(M.inv())


def mat_mul(a, b) -> RationalMatrix:
    return _fraction_rows(_qq(a) * _qq(b))


# --- lattices ---------------------------------------------------------------


@dataclass(frozen=True)
class IntLattice:
    n: int
    basis: IntMatrix

    @classmethod
    def from_generators(cls, rows, n: int) -> "IntLattice":
        rows = [list(r) for r in rows]
        for row in rows:
            if len(row) != n:
                raise DimensionMismatchError(
                    f"generator of length {len(row)} in ambient dimension {n}"
                )
        return cls(n, hnf(rows) if rows else ())

    @classmethod
    def full(cls, n: int) -> "IntLattice":
        return cls(n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, n: int) -> "IntLattice":
        return cls(n, ())

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(i for i, x in enumerate(row) if x != 0) for row in self.basis)

    def matrix(self) -> np.ndarray:
        return _object_array(self.basis, self.n)

    def combine(self, coefficients: Sequence) -> tuple:
        if len(coefficients) != self.rank:
            raise DimensionMismatchError("coefficient count differs from rank")
        out = [0] * self.n
        for c, row in zip(coefficients, self.basis):
            if c:
                for i, x in enumerate(row):
                    out[i] = out[i] + c * x
        return tuple(out)

    def _reduce(self, v: Sequence, divide, is_zero):
        if len(v) != self.n:
            raise DimensionMismatchError(f"vector of length {len(v)} in dimension {self.n}")
        residual = list(v)
        coords = []
        for row, c in zip(self.basis, self.pivots):
            q = divide(residual[c], row[c])
            if q is None:
                return None
            coords.append(q)
            residual = [a - q * b for a, b in zip(residual, row)]
        if not all(is_zero(x) for x in residual):
            return None
        return coords

    def coordinates(self, v: Sequence[int]) -> tuple[int, ...] | None:
        """Integer coordinates of v in the HNF basis, or None when v is not in the lattice."""

        def divide(a, p):
            return a // p if a % p == 0 else None

        coords = self._reduce([int(x) for x in v], divide, lambda x: x == 0)
        return None if coords is None else tuple(coords)

    def contains(self, v: Sequence[int]) -> bool:
        return self.coordinates(v) is not None

    def rational_coordinates(self, v: Sequence) -> tuple[Fraction, ...] | None:
        coords = self._reduce(
            [to_fraction(x) for x in v], lambda a, p: a / p, lambda x: x == 0
        )
        return None if coords is None else tuple(coords)

    def real_coordinates(self, x: Sequence[RealScalar]) -> tuple[RealScalar, ...] | None:
        """Exact coordinates of a RealScalar vector lying in the real span."""
        coords = self._reduce(list(x), lambda a, p: a / p, lambda s: s.is_zero())
        return None if coords is None else tuple(coords)

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self.basis]


def _saturate(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Basis of Z^n ∩ span(rows) for linearly independent integer rows B.

    With W the column HNF of B, every column of B lies in W·Z^r, so W⁻¹B is
    integral and its columns generate Z^r; its rows are then a primitive basis.
    """
    B = _zz(rows)
    W = hermite_normal_form(B)
    primitive = W.convert_to(QQ).inv() * B.convert_to(QQ)
    return tuple(tuple(int(x) for x in row) for row in _fraction_rows(primitive))


def integer_kernel(M, n: int | None = None) -> IntLattice:
    """All integer k with M kᵀ = 0; the result is saturated.

    Rational entries are allowed; each row is cleared of denominators first.
    """
    rows = _integral_rows(M)
    if n is None:
        if not rows:
            raise DimensionMismatchError("ambient dimension unknown for an empty matrix")
        n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise DimensionMismatchError("matrix rows differ from the ambient dimension")
    if not rows:
        return IntLattice.full(n)
    null = _fraction_rows(_qq(rows, n).nullspace())
    null = [row for row in null if any(row)]
    if not null:
        return IntLattice.zero(n)
    return IntLattice.from_generators(_saturate(_integral_rows(null)), n)


def orthogonal_integer_complement(L: IntLattice) -> IntLattice:
    if L.rank == 0:
        return IntLattice.full(L.n)
    return integer_kernel(L.basis, L.n)


def saturation(L: IntLattice) -> IntLattice:
    return orthogonal_integer_complement(orthogonal_integer_complement(L))


def gram_matrix(L: IntLattice) -> IntMatrix:
    B = L.matrix()
    return _rows(B.dot(B.T))


def gram_det(L: IntLattice) -> int:
    """Squared covolume of L."""
    if L.rank == 0:
        raise DomainError("gram determinant of the zero lattice")
    return int(determinant(gram_matrix(L)))


def dual_basis(L: IntLattice) -> RationalMatrix:
    """Rows (BBᵀ)⁻¹B spanning the dual lattice inside span(L)."""
    if L.rank == 0:
        raise DomainError("dual basis of the zero lattice")
    return mat_mul(rational_inverse(gram_matrix(L)), L.basis)


def index_in(L: IntLattice, rows: Sequence[Sequence[int]]) -> int | None:
    """Index of the lattice spanned by rows inside L, None if not a full-rank sublattice."""
    if len(rows) != L.rank:
        return None
    coords = []
    for row in rows:
        c = L.coordinates(row)
        if c is None:
            return None
        coords.append(c)
    det = int(determinant(coords))
    return abs(det) if det else None


# --- enumeration ------------------------------------------------------------


def coefficient_bounds(L: IntLattice, radius) -> list[int]:
    """|y_j| <= radius * |dual row j|_1 for every v = yB with |v|_inf <= radius."""
    radius = to_fraction(radius)
    return [math.floor(radius * sum(abs(x) for x in row)) for row in dual_basis(L)]


@dataclass
class Fibers:
    """Outer lattice coordinates of a box enumeration with the admissible last-coordinate range."""

    outer: np.ndarray
    partial: np.ndarray
    last: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    @property
    def count(self) -> int:
        return int(self.outer.shape[0])


def box_fibers(L: IntLattice, radius: int) -> Fibers:
    """Fibers of {v in L : |v|_inf <= radius}: for each outer coordinate tuple the
    integer range [lo, hi] of the last coordinate keeping v inside the box.

    Infeasible fibers are dropped.
    """
    d, n = L.rank, L.n
    radius = int(radius)
    bounds = coefficient_bounds(L, radius)
    span = max([abs(x) for row in L.basis for x in row] + [1]) * n
    dtype = np.int64 if (max(bounds + [1]) + 1) * span * d + radius < _INT64_SAFE else object

    B = np.array(L.basis, dtype=dtype).reshape(d, n)
    ranges = [np.arange(-b, b + 1, dtype=dtype) for b in bounds[:-1]]
    if ranges:
        grids = np.meshgrid(*ranges, indexing="ij")
        outer = np.stack([g.reshape(-1) for g in grids], axis=1)
    else:
        outer = np.zeros((1, 0), dtype=dtype)
    partial = outer.dot(B[:-1]) if d > 1 else np.zeros((1, n), dtype=dtype)
    last = B[-1]

    big = bounds[-1]
    lo = np.full(outer.shape[0], -big, dtype=dtype)
    hi = np.full(outer.shape[0], big, dtype=dtype)
    feasible = np.ones(outer.shape[0], dtype=bool)
    for i in range(n):
        b = int(last[i])
        w = partial[:, i]
        if b == 0:
            feasible &= np.abs(w) <= radius
        elif b > 0:
            lo = np.maximum(lo, -((radius + w) // b))
            hi = np.minimum(hi, (radius - w) // b)
        else:
            lo = np.maximum(lo, -((radius - w) // -b))
            hi = np.minimum(hi, (w + radius) // -b)
    feasible &= lo <= hi
    return Fibers(outer[feasible], partial[feasible], last, lo[feasible], hi[feasible])


def box_points(L: IntLattice, radius: int) -> np.ndarray:
    """All nonzero lattice vectors with sup norm <= radius, lexicographically sorted."""
    if L.rank == 0:
        return np.zeros((0, L.n), dtype=np.int64)
    fibers = box_fibers(L, radius)
    counts = (fibers.hi - fibers.lo + 1).astype(np.int64)
    total = int(counts.sum())
    if total == 0:
        return np.zeros((0, L.n), dtype=fibers.partial.dtype)
    idx = np.repeat(np.arange(fibers.count), counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    y_last = fibers.lo[idx] + (np.arange(total) - starts).astype(fibers.lo.dtype)
    points = fibers.partial[idx] + y_last[:, None] * fibers.last[None, :]
    points = points[np.any(points != 0, axis=1)]
    order = np.lexsort([points[:, i] for i in reversed(range(L.n))])
    return points[order]


def enumerate_in_box(L: IntLattice, Q) -> Iterator[tuple[int, ...]]:
    """Yield each nonzero v in L with |v|_inf <= Q once, in lexicographic order."""
    Q = to_fraction(Q)
    if Q < 1:
        raise DomainError(f"box radius must be at least 1, got {Q}")
    for row in box_points(L, math.floor(Q)):
        yield tuple(int(x) for x in row)


# --- minima -----------------------------------------------------------------


def _sign_normalized(v: Sequence) -> tuple:
    for x in v:
        if x != 0:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def span_box_vertices(L: IntLattice) -> list[tuple[Fraction, ...]]:
    """Vertices of span(L) ∩ [-1, 1]^n, one per antipodal pair."""
    d, n = L.rank, L.n
    vertices: set[tuple[Fraction, ...]] = set()
    for subset in itertools.combinations(range(n), d):
        block = [[L.basis[j][i] for j in range(d)] for i in subset]
        if determinant(block) == 0:
            continue
        inverse = rational_inverse(block)
        for signs in itertools.product((1, -1), repeat=d):
            if signs[0] < 0:
                continue
            t = [sum(inverse[j][k] * signs[k] for k in range(d)) for j in range(d)]
            x = tuple(sum(t[j] * L.basis[j][i] for j in range(d)) for i in range(n))
            if all(abs(xi) <= 1 for xi in x):
                vertices.add(_sign_normalized(x))
    return sorted(vertices)


def norm_function(L: IntLattice, norm: str):
    """Exact norm on span(L); dual-sup is the norm dual to the restricted sup norm."""
    if norm == "sup":
        return lambda v: Fraction(max(abs(int(x)) for x in v))
    if norm == "l1":
        return lambda v: Fraction(sum(abs(int(x)) for x in v))
    if norm == "dual-sup":
        vertices = span_box_vertices(L)
        return lambda v: max(abs(sum(x * int(y) for x, y in zip(vx, v))) for vx in vertices)
    raise ValueError(f"unknown norm {norm!r}; expected one of {NORMS}")


@dataclass(frozen=True)
class SuccessiveMinima:
    norm: str
    values: tuple[Fraction, ...]
    witnesses: tuple[tuple, ...]


def successive_minima(L: IntLattice, norm: str = "sup", count: int | None = None) -> SuccessiveMinima:
    """Exact successive minima of a polyhedral norm by growing-radius enumeration.

    Every supported norm dominates the sup norm on span(L), so the sup box of
    radius R holds all vectors of norm <= R.
    """
    d = L.rank
    if d == 0:
        raise DomainError("successive minima of the zero lattice")
    needed = d if count is None else min(count, d)
    measure = norm_function(L, norm)
    radius = 1
    while True:
        seen = set()
        candidates = []
        for row in box_points(L, radius):
            v = _sign_normalized(tuple(int(x) for x in row))
            if v in seen:
                continue
            seen.add(v)
            value = measure(v)
            if value <= radius:
                candidates.append((value, v))
        candidates.sort()
        chosen: list[tuple] = []
        values: list[Fraction] = []
        for value, v in candidates:
            if rank(chosen + [v]) > len(chosen):
                chosen.append(v)
                values.append(value)
                if len(chosen) == needed:
                    return SuccessiveMinima(norm, tuple(values), tuple(chosen))
        logger.debug(f"successive_minima: radius {radius} gave {len(chosen)} of {needed}")
        radius *= 2


def shortest_vector(L: IntLattice, norm: str = "sup") -> tuple[tuple[int, ...], Fraction]:
    minima = successive_minima(L, norm, count=1)
    return minima.witnesses[0], minima.values[0]


@dataclass(frozen=True)
class TransferenceReport:
    d: int
    primal: SuccessiveMinima
    dual_values: tuple[Fraction, ...]
    dual_witnesses: tuple[tuple[Fraction, ...], ...]
    products: tuple[Fraction, ...]
    upper: int

    @property
    def flags(self) -> tuple[bool, ...]:
        return tuple(1 <= p <= self.upper for p in self.products)

    @property
    def passed(self) -> bool:
        return all(self.flags)


def scaled_dual(L: IntLattice) -> tuple[IntLattice, int]:
    """D·Λ* as an integer lattice together with the scale D."""
    rows = dual_basis(L)
    scale = math.lcm(*(x.denominator for row in rows for x in row))
    return IntLattice.from_generators([[int(x * scale) for x in row] for row in rows], L.n), scale


def transference_check(L: IntLattice) -> TransferenceReport:
    """Products λ_k(box, L)·λ_{d+1-k}(box*, L*) against the bounds [1, d!]."""
    d = L.rank
    if d == 0:
        raise DomainError("transference check needs rank >= 1")
    primal = successive_minima(L, "sup")
    dual_lattice, scale = scaled_dual(L)
    dual = successive_minima(dual_lattice, "dual-sup")
    dual_values = tuple(v / scale for v in dual.values)
    dual_witnesses = tuple(tuple(Fraction(x, scale) for x in w) for w in dual.witnesses)
    products = tuple(primal.values[k] * dual_values[d - 1 - k] for k in range(d))
    report = TransferenceReport(d, primal, dual_values, dual_witnesses, products, math.factorial(d))
    if not report.passed:
        logger.error(f"Transference bound violated for basis {L.basis}: {products}")
    return report
