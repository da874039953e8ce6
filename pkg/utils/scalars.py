"""
Exact real scalars for torus frequencies.

A RealScalar is a finite rational combination of declared basis constants
(1, square roots, isolated algebraic roots). The declared constants are
trusted to be linearly independent over Q, which makes the zero test exact:
a scalar is zero iff all of its coefficients are zero. Every other decision
(signs, floors, comparisons) is made by refining dyadic enclosures until
zero is excluded.
"""

import functools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from utils import config
from utils.errors import DimensionMismatchError, IndependenceSuspectError

logger = logging.getLogger(__name__)

CONSTANT_KINDS = ("one", "sqrt", "root", "quotient")


def to_fraction(value) -> Fraction:
    """Coerce ints, Fractions, "p/q" / decimal strings and floats to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # repr gives the shortest decimal that round-trips, so 0.1 -> 1/10
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def _is_square_free(m: int) -> bool:
    if m < 2:
        return False
    f = 2
    while f * f <= m:
        if m % (f * f) == 0:
            return False
        f += 1
    return True


def _poly_eval(coefficients: Sequence[int], x: Fraction) -> Fraction:
    # coefficients are stored lowest degree first
    acc = Fraction(0)
    for c in reversed(coefficients):
        acc = acc * x + c
    return acc


def _floor_decimal(x: Fraction, digits: int) -> str:
    scaled = math.floor(x * 10**digits)
    return _render_scaled(scaled, digits)


def _ceil_decimal(x: Fraction, digits: int) -> str:
    scaled = math.ceil(x * 10**digits)
    return _render_scaled(scaled, digits)


def _render_scaled(scaled: int, digits: int) -> str:
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**digits)
    if digits == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{digits}d}"


@dataclass(frozen=True)
class DyadicInterval:
    """Closed interval with rational (dyadic whenever produced by refinement) endpoints."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"empty interval [{self.lower}, {self.upper}]")

    @classmethod
    def point(cls, value) -> "DyadicInterval":
        q = to_fraction(value)
        return cls(q, q)

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def contains(self, value) -> bool:
        q = to_fraction(value)
        return self.lower <= q <= self.upper

    def contains_interval(self, other: "DyadicInterval") -> bool:
        return self.lower <= other.lower and other.upper <= self.upper

    def sign(self) -> int | None:
        """Sign of every member, or None when the interval straddles zero."""
        if self.lower > 0:
            return 1
        if self.upper < 0:
            return -1
        if self.lower == self.upper == 0:
            return 0
        return None

    def __add__(self, other: "DyadicInterval") -> "DyadicInterval":
        return DyadicInterval(self.lower + other.lower, self.upper + other.upper)

    def __sub__(self, other: "DyadicInterval") -> "DyadicInterval":
        return DyadicInterval(self.lower - other.upper, self.upper - other.lower)

    def __neg__(self) -> "DyadicInterval":
        return DyadicInterval(-self.upper, -self.lower)

    def scale(self, factor) -> "DyadicInterval":
        q = to_fraction(factor)
        a, b = self.lower * q, self.upper * q
        return DyadicInterval(min(a, b), max(a, b))

    def __mul__(self, other: "DyadicInterval") -> "DyadicInterval":
        products = [
            self.lower * other.lower,
            self.lower * other.upper,
            self.upper * other.lower,
            self.upper * other.upper,
        ]
        return DyadicInterval(min(products), max(products))

    def abs(self) -> "DyadicInterval":
        if self.lower >= 0:
            return self
        if self.upper <= 0:
            return -self
        return DyadicInterval(Fraction(0), max(-self.lower, self.upper))

    def reciprocal(self) -> "DyadicInterval":
        if self.sign() not in (1, -1):
            raise ZeroDivisionError("interval contains zero")
        return DyadicInterval(1 / self.upper, 1 / self.lower)

    def float_bounds(self) -> tuple[float, float]:
        """Outward-rounded float enclosure."""
        lo, hi = float(self.lower), float(self.upper)
        if Fraction(lo) > self.lower:
            lo = math.nextafter(lo, -math.inf)
        if Fraction(hi) < self.upper:
            hi = math.nextafter(hi, math.inf)
        return lo, hi

    def decimal_strings(self, digits: int = 12) -> tuple[str, str]:
        return _floor_decimal(self.lower, digits), _ceil_decimal(self.upper, digits)

    def __str__(self) -> str:
        lo, hi = self.decimal_strings(8)
        return f"[{lo}, {hi}]"


@dataclass(frozen=True)
class ScaledInterval:
    """[lo/den, hi/den] with integer endpoints.

    Refinement decisions read the integers directly; Fractions are only built
    when an interval leaves this module.
    """

    lo: int
    hi: int
    den: int

    def sign(self) -> int | None:
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        return None

    def floor(self) -> int | None:
        """Common integer part of every irrational member, None if it is not yet pinned."""
        m = self.lo // self.den
        return m if self.hi <= (m + 1) * self.den else None

    def to_interval(self) -> DyadicInterval:
        return DyadicInterval(Fraction(self.lo, self.den), Fraction(self.hi, self.den))


@dataclass(frozen=True)
class BasisConstant:
    symbol: str
    kind: str
    radicand: int = 0
    polynomial: tuple[int, ...] = ()
    interval: tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))
    # quotient constants stand for numerator / denominator
    numerator: "BasisConstant | None" = None
    denominator: "RealScalar | None" = None

    def __post_init__(self):
        if self.kind not in CONSTANT_KINDS:
            raise ValueError(f"unknown constant kind {self.kind!r}")
        if not self.symbol:
            raise ValueError("constant symbol must be non-empty")
        if self.kind == "sqrt" and not _is_square_free(self.radicand):
            raise ValueError(
                f"sqrt constant {self.symbol!r} needs a square-free radicand >= 2, "
                f"got {self.radicand}"
            )
        if self.kind == "root":
            lo, hi = self.interval
            if not lo < hi:
                raise ValueError(f"isolating interval of {self.symbol!r} is empty")
            if len(self.polynomial) < 2 or self.polynomial[-1] == 0:
                raise ValueError(f"polynomial of {self.symbol!r} must have degree >= 1")
            if _poly_eval(self.polynomial, lo) * _poly_eval(self.polynomial, hi) >= 0:
                raise ValueError(
                    f"polynomial of {self.symbol!r} has no sign change on [{lo}, {hi}]"
                )
        if self.kind == "quotient":
            if self.numerator is None or self.denominator is None or self.denominator.is_zero():
                raise ValueError(f"quotient {self.symbol!r} needs a numerator and a nonzero denominator")

    def enclose(self, bits: int) -> DyadicInterval:
        """Dyadic interval containing the constant, of width at most 2**-bits."""
        lo, hi, k = _enclose_dyadic(self, bits)
        return DyadicInterval(Fraction(lo, 1 << k), Fraction(hi, 1 << k))

    def describe(self) -> str:
        if self.kind == "one":
            return "1"
        if self.kind == "sqrt":
            return f"sqrt({self.radicand})"
        if self.kind == "quotient":
            return f"{self.numerator.describe()} / ({self.denominator})"
        lo, hi = self.interval
        return f"root of {list(self.polynomial)} in [{lo}, {hi}]"

    @functools.cached_property
    def derivative(self) -> tuple[int, ...]:
        return tuple(i * c for i, c in enumerate(self.polynomial))[1:]

    @functools.cached_property
    def unit(self) -> int:
        """Common denominator of the isolating interval of a root."""
        lo, hi = self.interval
        return math.lcm(lo.denominator, hi.denominator)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _scaled_poly(coefficients: Sequence[int], m: int, scale: int) -> int:
    """scale**deg · P(m / scale), in integers."""
    deg = len(coefficients) - 1
    acc = coefficients[-1]
    power = 1
    powers = [1]
    for _ in range(deg):
        power *= scale
        powers.append(power)
    for i in range(deg - 1, -1, -1):
        acc = acc * m + coefficients[i] * powers[deg - i]
    return acc


# constant -> (k, lo, hi, sign of P at lo); the root lies in [lo, hi] / (unit · 2**k)
_ROOT_CHAINS: dict[BasisConstant, tuple[int, int, int, int]] = {}


def _root_step(c: BasisConstant, k: int, lo: int, hi: int, s_lo: int, bits: int) -> tuple[int, int, int]:
    """One Newton jump checked by exact signs, or one bisection when the jump fails."""
    k1 = k + 1
    mid = lo + hi
    scale1 = c.unit << k1
    value = _scaled_poly(c.polynomial, mid, scale1)
    if value == 0:
        return k1, mid, mid
    slope = _scaled_poly(c.derivative, mid, scale1)
    extra = min(k1, max(1, bits + 3 - k1))
    if slope:
        k2 = k1 + extra
        guess = ((mid * slope - value) << extra) // slope
        a, b = guess - 2, guess + 2
        if a >= lo << (k2 - k) and b <= hi << (k2 - k):
            scale2 = c.unit << k2
            s_a = _sign(_scaled_poly(c.polynomial, a, scale2))
            s_b = _sign(_scaled_poly(c.polynomial, b, scale2))
            if s_a == 0:
                return k2, a, a
            if s_b == 0:
                return k2, b, b
            if s_a == s_lo and s_b == -s_lo:
                return k2, a, b
    if _sign(value) == s_lo:
        return k1, mid, hi << 1
    return k1, lo << 1, mid


def _root_dyadic(c: BasisConstant, bits: int) -> tuple[int, int, int]:
    state = _ROOT_CHAINS.get(c)
    if state is None:
        lo, hi = c.interval
        state = (0, int(lo * c.unit), int(hi * c.unit), _sign(_poly_eval(c.polynomial, lo)))
    k, lo, hi, s_lo = state
    steps = 0
    while (hi - lo) << (bits + 1) > c.unit << k:
        k, lo, hi = _root_step(c, k, lo, hi, s_lo, bits)
        steps += 1
    _ROOT_CHAINS[c] = (k, lo, hi, s_lo)
    if steps:
        logger.debug(f"Root {c.symbol} advanced {steps} steps to 2^-{k} resolution")
    out = bits + 2
    den = c.unit << k
    return (lo << out) // den, -((-hi << out) // den), out


def _quotient_dyadic(c: BasisConstant, bits: int) -> tuple[int, int, int]:
    out = bits + 2
    inner = bits + 4
    while True:
        n = scalar(c.numerator).enclose_scaled(inner)
        d = c.denominator.enclose_scaled(inner)
        if d.sign() in (1, -1):
            # x/n.den divided by y/d.den
            ends = [(x * d.den, y * n.den) for x in (n.lo, n.hi) for y in (d.lo, d.hi)]
            lo = min((p << out) // q for p, q in ends)
            hi = max(-((-p << out) // q) for p, q in ends)
            if hi - lo <= 1 << (out - bits):
                return lo, hi, out
        inner *= 2


@functools.lru_cache(maxsize=4096)
def _enclose_dyadic(c: BasisConstant, bits: int) -> tuple[int, int, int]:
    """(lo, hi, k) with the constant in [lo, hi] / 2**k and hi - lo <= 2**(k - bits)."""
    if c.kind == "one":
        return 1, 1, 0
    if c.kind == "sqrt":
        a = math.isqrt(c.radicand << (2 * bits))
        return a, a + 1, bits
    if c.kind == "root":
        return _root_dyadic(c, bits)
    return _quotient_dyadic(c, bits)


ONE = BasisConstant("1", "one")


@dataclass(frozen=True)
class RealScalar:
    """Finitely supported map BasisConstant -> Fraction, kept in canonical order."""

    terms: tuple[tuple[BasisConstant, Fraction], ...] = ()

    @classmethod
    def from_mapping(cls, mapping: Mapping[BasisConstant, object]) -> "RealScalar":
        by_symbol: dict[str, tuple[BasisConstant, Fraction]] = {}
        for c, coefficient in mapping.items():
            q = to_fraction(coefficient)
            if c.symbol in by_symbol and by_symbol[c.symbol][0] != c:
                raise ValueError(f"two different constants share symbol {c.symbol!r}")
            prev = by_symbol.get(c.symbol, (c, Fraction(0)))[1]
            by_symbol[c.symbol] = (c, prev + q)
        terms = tuple(
            (c, q) for _, (c, q) in sorted(by_symbol.items()) if q != 0
        )
        return cls(terms)

    @property
    def coefficients(self) -> dict[BasisConstant, Fraction]:
        return dict(self.terms)

    @property
    def constants(self) -> tuple[BasisConstant, ...]:
        return tuple(c for c, _ in self.terms)

    def coefficient(self, c: BasisConstant) -> Fraction:
        return self.coefficients.get(c, Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(c.kind == "one" for c, _ in self.terms)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coefficient(ONE)

    def _combine(self, other: "RealScalar", factor: int) -> "RealScalar":
        merged: dict[BasisConstant, Fraction] = dict(self.terms)
        for c, q in other.terms:
            merged[c] = merged.get(c, Fraction(0)) + factor * q
        return RealScalar.from_mapping(merged)

    def __add__(self, other) -> "RealScalar":
        if not isinstance(other, RealScalar):
            other = rational(other)
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other) -> "RealScalar":
        if not isinstance(other, RealScalar):
            other = rational(other)
        return self._combine(other, -1)

    def __rsub__(self, other) -> "RealScalar":
        return rational(other) - self

    def __neg__(self) -> "RealScalar":
        return RealScalar(tuple((c, -q) for c, q in self.terms))

    def __mul__(self, factor) -> "RealScalar":
        if isinstance(factor, RealScalar):
            if not factor.is_rational():
                return NotImplemented
            factor = factor.rational_value()
        q = to_fraction(factor)
        if q == 0:
            return RealScalar()
        return RealScalar(tuple((c, coefficient * q) for c, coefficient in self.terms))

    __rmul__ = __mul__

    def __truediv__(self, divisor) -> "RealScalar":
        if isinstance(divisor, RealScalar):
            divisor = divisor.rational_value()
        q = to_fraction(divisor)
        if q == 0:
            raise ZeroDivisionError("division of a scalar by zero")
        return self * (1 / q)

    def enclose_scaled(self, bits: int) -> ScaledInterval:
        parts = [(q, _enclose_dyadic(c, bits)) for c, q in self.terms]
        if not parts:
            return ScaledInterval(0, 0, 1)
        k = max(p[2] for _, p in parts)
        common = math.lcm(*(q.denominator for q, _ in parts))
        lo = hi = 0
        for q, (c_lo, c_hi, c_k) in parts:
            factor = q.numerator * (common // q.denominator)
            a, b = (factor * c_lo) << (k - c_k), (factor * c_hi) << (k - c_k)
            lo += min(a, b)
            hi += max(a, b)
        return ScaledInterval(lo, hi, common << k)

    def enclose_bits(self, bits: int) -> DyadicInterval:
        return self.enclose_scaled(bits).to_interval()

    def coefficient_mass(self) -> Fraction:
        """Sum of |coefficients| of the non-rational constants."""
        return sum((abs(q) for c, q in self.terms if c.kind != "one"), Fraction(0))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for c, q in self.terms:
            if c.kind == "one":
                parts.append(str(q))
            elif q == 1:
                parts.append(c.symbol)
            elif q == -1:
                parts.append(f"-{c.symbol}")
            else:
                parts.append(f"{q}*{c.symbol}")
        return " + ".join(parts).replace("+ -", "- ")


def rational(value) -> RealScalar:
    return RealScalar.from_mapping({ONE: to_fraction(value)})


def scalar(c: BasisConstant, coefficient=1) -> RealScalar:
    return RealScalar.from_mapping({c: coefficient})


def sqrt_constant(m: int, symbol: str | None = None) -> BasisConstant:
    return BasisConstant(symbol or f"sqrt{m}", "sqrt", radicand=m)


def algebraic_root(symbol: str, coefficients: Iterable[int], interval) -> BasisConstant:
    lo, hi = interval
    return BasisConstant(
        symbol,
        "root",
        polynomial=tuple(int(c) for c in coefficients),
        interval=(to_fraction(lo), to_fraction(hi)),
    )


def quotient_constant(numerator: BasisConstant, denominator: RealScalar) -> BasisConstant:
    """The real number numerator / denominator as a constant of its own.

    Dividing an independent family by one fixed nonzero real keeps it independent.
    """
    return BasisConstant(
        f"{numerator.symbol}/({denominator})",
        "quotient",
        numerator=numerator,
        denominator=denominator,
    )


def combination(terms: Mapping[BasisConstant, object]) -> RealScalar:
    return RealScalar.from_mapping(terms)


def dot(k: Sequence[int], alpha: Sequence[RealScalar]) -> RealScalar:
    """k·α = k₁α₁ + … + kₙαₙ, exactly."""
    if len(k) != len(alpha):
        raise DimensionMismatchError(
            f"dot product of a {len(k)}-vector with a {len(alpha)}-vector"
        )
    merged: dict[BasisConstant, Fraction] = {}
    for ki, ai in zip(k, alpha):
        if ki == 0:
            continue
        for c, q in ai.terms:
            merged[c] = merged.get(c, Fraction(0)) + ki * q
    return RealScalar.from_mapping(merged)


def _bits_for_width(x: RealScalar, width: Fraction) -> int:
    mass = x.coefficient_mass()
    if mass == 0:
        return config.precision_bits()
    needed = math.ceil(math.log2(mass / width)) + 1 if mass > width else 1
    return max(config.precision_bits(), needed)


def enclose(x: RealScalar, width) -> DyadicInterval:
    """Interval containing x with width <= width."""
    width = to_fraction(width)
    if width <= 0:
        raise ValueError("enclosure width must be positive")
    bits = _bits_for_width(x, width)
    while True:
        interval = x.enclose_bits(bits)
        if interval.width <= width:
            return interval
        bits *= 2


def _refine(x: RealScalar, accept):
    """Double the precision until accept(interval) returns a non-None result.

    A round at b bits counts as b bisection steps for every irrational constant
    of x; the query gives up before a round would push the total past
    TORUS_SIGN_STEP_CAP.
    """
    bits = config.precision_bits()
    cap = config.sign_step_cap()
    irrational = max(1, sum(1 for c in x.constants if c.kind != "one"))
    steps = 0
    while True:
        interval = x.enclose_scaled(bits)
        steps += bits * irrational
        result = accept(interval)
        if result is not None:
            if bits > config.precision_bits():
                logger.debug(f"Refined {x} to {bits} bits")
            return result
        if steps + 2 * bits * irrational > cap:
            raise IndependenceSuspectError(
                f"no decision for {x} after {steps} refinement steps; "
                "independence assertion suspect"
            )
        bits *= 2


def sign(x: RealScalar) -> int:
    if x.is_zero():
        return 0
    if x.is_rational():
        q = x.rational_value()
        return (q > 0) - (q < 0)
    return _refine(x, lambda iv: iv.sign() if iv.sign() in (1, -1) else None)


def compare(a: RealScalar, b: RealScalar) -> int:
    return sign(a - b)


def abs_scalar(x: RealScalar) -> RealScalar:
    return x if sign(x) >= 0 else -x


def compare_abs(a: RealScalar, b: RealScalar) -> int:
    return sign(abs_scalar(a) - abs_scalar(b))


def floor(x: RealScalar) -> int:
    if x.is_rational():
        return math.floor(x.rational_value())
    # x is irrational, so it never equals a rational endpoint
    return _refine(x, ScaledInterval.floor)


def nearest_integer(x: RealScalar) -> int:
    return floor(x + Fraction(1, 2))


def to_float(x: RealScalar) -> float:
    return float(x.enclose_bits(config.precision_bits()).midpoint)


def float_error(x: RealScalar, bits: int | None = None) -> tuple[float, float]:
    """Float approximation of x and an upper bound on its absolute error."""
    interval = x.enclose_bits(bits or config.precision_bits())
    approx = float(interval.midpoint)
    err = max(abs(Fraction(approx) - interval.lower), abs(interval.upper - Fraction(approx)))
    return approx, math.nextafter(float(err), math.inf)


def rational_vector(values: Iterable) -> list[RealScalar]:
    return [rational(v) for v in values]
