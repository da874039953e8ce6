from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from utils import scalars
from utils.errors import DimensionMismatchError, IndependenceSuspectError
from utils.scalars import DyadicInterval
from utils.vector_spec import CBRT2, SQRT2

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)


def _exact_sign(a: Fraction, b: Fraction) -> int:
    # sign of a + b√2 without enclosures: compare a² with 2b² when signs differ
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0 or (a > 0) == (b > 0):
        return 1 if (a > 0 or (a == 0 and b > 0)) else -1
    dominant = a if a * a > 2 * b * b else b
    return 1 if dominant > 0 else -1


def test_to_fraction_accepts_strings_and_floats():
    assert scalars.to_fraction("3/4") == Fraction(3, 4)
    assert scalars.to_fraction(0.1) == Fraction(1, 10)
    assert scalars.to_fraction(" 2 ") == 2
    with pytest.raises(TypeError):
        scalars.to_fraction(True)


def test_rational_arithmetic_cancels_exactly(sqrt2):
    x = (sqrt2 + 1) - sqrt2
    assert x.is_rational()
    assert x.rational_value() == 1
    assert (sqrt2 * 3 - sqrt2 * 3).is_zero()
    assert str(sqrt2 * 2 - 1) == "-1 + 2*sqrt2"


def test_sign_and_compare(sqrt2):
    assert scalars.sign(sqrt2 - 1) == 1
    assert scalars.sign(scalars.rational(0)) == 0
    assert scalars.sign(7 - sqrt2 * 5) == -1
    # 3 - 2√2 ≈ 0.1716 < 1/5
    assert scalars.compare(3 - sqrt2 * 2, scalars.rational(Fraction(1, 5))) < 0
    assert scalars.compare_abs(1 - sqrt2, sqrt2 - 1) == 0


def test_floor_and_nearest_integer(sqrt2):
    assert scalars.floor(sqrt2) == 1
    assert scalars.floor(-sqrt2) == -2
    assert scalars.nearest_integer(sqrt2 * 3) == 4
    assert scalars.floor(scalars.scalar(CBRT2) * 10) == 12


def test_enclose_respects_width(sqrt2):
    width = Fraction(1, 10**20)
    interval = scalars.enclose(sqrt2, width)
    assert interval.width <= width
    assert interval.lower * interval.lower <= 2 <= interval.upper * interval.upper


def test_float_error_bounds_the_true_value(sqrt2):
    approx, err = scalars.float_error(sqrt2 * 1000 - 1414)
    exact = scalars.enclose(sqrt2 * 1000 - 1414, Fraction(1, 10**30))
    assert abs(Fraction(approx) - exact.midpoint) <= Fraction(err)


def test_dot_checks_dimensions(sqrt2):
    alpha = [scalars.rational(1), sqrt2]
    assert scalars.sign(scalars.dot((3, -2), alpha)) == 1
    with pytest.raises(DimensionMismatchError):
        scalars.dot((1, 2, 3), alpha)


def test_basis_constant_validation():
    with pytest.raises(ValueError):
        scalars.sqrt_constant(4)
    with pytest.raises(ValueError):
        scalars.algebraic_root("bad", (-2, 0, 0, 1), (2, 3))


def test_dependent_constants_hit_the_refinement_cap(monkeypatch, sqrt2):
    monkeypatch.setenv("TORUS_SIGN_STEP_CAP", "256")
    # a second name for √2: nonzero as a formal combination, zero as a number
    twin = scalars.algebraic_root("twin", (-2, 0, 1), (1, Fraction(3, 2)))
    with pytest.raises(IndependenceSuspectError):
        scalars.sign(sqrt2 - scalars.scalar(twin))


def test_twin_cube_roots_hit_the_refinement_cap(monkeypatch):
    monkeypatch.setenv("TORUS_SIGN_STEP_CAP", "20000")
    twin = scalars.algebraic_root("cbrt2-twin", (-2, 0, 0, 1), (Fraction(5, 4), Fraction(13, 10)))
    with pytest.raises(IndependenceSuspectError):
        scalars.sign(scalars.scalar(CBRT2) - scalars.scalar(twin))
    with pytest.raises(IndependenceSuspectError):
        scalars.floor(scalars.scalar(CBRT2) - scalars.scalar(twin))


@pytest.mark.parametrize("constant", [SQRT2, CBRT2], ids=["sqrt2", "cbrt2"])
def test_enclosures_nest_as_precision_grows(constant):
    previous = constant.enclose(4)
    for bits in range(5, 160, 7):
        current = constant.enclose(bits)
        assert current.width <= Fraction(1, 2**bits)
        assert previous.contains_interval(current)
        previous = current
    assert scalars.sign(scalars.scalar(constant) - previous.lower) >= 0
    assert scalars.sign(previous.upper - scalars.scalar(constant)) >= 0


def test_quotient_constants_enclose_their_value(sqrt2):
    ratio = scalars.quotient_constant(SQRT2, scalars.scalar(scalars.sqrt_constant(3)))
    interval = ratio.enclose(60)
    # √2/√3 squared is 2/3
    assert interval.lower**2 <= Fraction(2, 3) <= interval.upper**2
    assert interval.width <= Fraction(1, 2**60)
    with pytest.raises(ValueError):
        scalars.quotient_constant(SQRT2, scalars.RealScalar())


def test_interval_decimal_strings_round_outward():
    lo, hi = DyadicInterval(Fraction(1, 3), Fraction(2, 3)).decimal_strings(4)
    assert lo == "0.3333"
    assert hi == "0.6667"
    assert DyadicInterval(Fraction(-1), Fraction(1)).sign() is None


@settings(max_examples=200, deadline=None)
@given(a=rationals, b=rationals)
def test_sign_matches_exact_quadratic_test(a, b):
    x = scalars.combination({scalars.ONE: a, SQRT2: b})
    assert scalars.sign(x) == _exact_sign(a, b)


@settings(max_examples=100, deadline=None)
@given(a=rationals, b=rationals)
def test_floor_is_consistent_with_sign(a, b):
    x = scalars.combination({scalars.ONE: a, SQRT2: b})
    m = scalars.floor(x)
    assert scalars.sign(x - m) >= 0
    assert scalars.sign(x - (m + 1)) < 0
