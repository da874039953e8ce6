import itertools
from fractions import Fraction

import numpy as np
import pytest

from utils import scalars
from utils.errors import DomainError
from utils.resonance import analyze, psi, psi_profile, reciprocal_enclosure, theorem1_delta_max
from utils.vector_spec import SQRT2, SQRT3


def _oracle_min(R, Q):
    """Smallest |k·α| over the ambient box, k restricted to Λ by membership."""
    floats = np.array([scalars.to_float(a) for a in R.alpha])
    best, best_k = np.inf, None
    for k in itertools.product(range(-Q, Q + 1), repeat=R.n):
        if not any(k) or not R.Lambda.contains(k):
            continue
        value = abs(float(np.dot(k, floats)))
        if value < best:
            best, best_k = value, k
    return best_k


def test_sqrt2_structure(sqrt2_flow):
    assert sqrt2_flow.d == 2
    assert sqrt2_flow.K.rank == 0
    assert sqrt2_flow.Lambda.basis == ((1, 0), (0, 1))
    assert sqrt2_flow.Q_alpha == 1
    assert sqrt2_flow.C_alpha == 1
    assert sqrt2_flow.scale == scalars.rational(1)


def test_resonant_structure(resonant_flow):
    assert resonant_flow.d == 2
    assert resonant_flow.K.basis == ((1, 1, -1),)
    assert resonant_flow.Lambda.basis == ((1, 0, 1), (0, 1, 1))
    assert resonant_flow.Q_alpha == 1
    assert resonant_flow.C_alpha == 3


def test_rational_structure(half_flow):
    assert half_flow.d == 1
    assert half_flow.Lambda.basis == ((2, 1),)
    assert half_flow.Q_alpha == 2
    assert half_flow.C_alpha == 5


def test_normalization_divides_by_a_rational_component(sqrt2):
    R = analyze([sqrt2, scalars.rational(2)])
    assert R.normalization.unit_index == 1
    assert R.scale == scalars.rational(Fraction(1, 2))
    assert R.alpha[1] == scalars.rational(1)
    assert R.alpha[0] == sqrt2 / 2


def test_normalization_without_a_rational_component(sqrt2):
    R = analyze([sqrt2, scalars.scalar(SQRT3)])
    assert R.normalization.unit_index == 1
    assert R.alpha[1] == scalars.rational(1)
    assert not R.alpha[0].is_rational()
    # √2/√3 ≈ 0.8165 and the scale is 1/√3
    assert abs(scalars.to_float(R.alpha[0]) - 0.816496580927726) < 1e-12
    assert abs(scalars.to_float(R.scale) - 0.5773502691896258) < 1e-12
    assert abs(R.sup_norm_float() - 1) < 1e-12
    assert R.K.rank == 0
    assert R.Lambda.basis == ((1, 0), (0, 1))
    assert (R.Q_alpha, R.C_alpha) == (1, 1)
    assert scalars.sign(scalars.dot((1, -1), R.alpha)) < 0


def test_normalization_of_a_resonant_irrational_vector(sqrt2):
    R = analyze([sqrt2, sqrt2 * 2])
    assert R.normalization.unit_index == 1
    assert R.alpha == (scalars.rational(Fraction(1, 2)), scalars.rational(1))
    assert R.d == 1
    assert R.K.contains((2, -1))
    assert R.Lambda.basis == ((1, 2),)
    assert (R.Q_alpha, R.C_alpha) == (2, 5)
    assert abs(scalars.to_float(R.scale) - 0.3535533905932738) < 1e-12


def test_zero_vectors(sqrt2):
    with pytest.raises(DomainError):
        analyze(scalars.rational_vector([0, 0]))
    with pytest.raises(DomainError):
        analyze([])


@pytest.mark.parametrize(
    "Q, witness, resonance",
    [
        (1, (-1, 1), (-1, 1)),
        (5, (3, -2), (3, -2)),
        (16, (-7, 5), (-7, 5)),
        (32, (17, -12), (17, -12)),
    ],
)
def test_psi_spot_values(sqrt2_flow, sqrt2, Q, witness, resonance):
    value = psi(sqrt2_flow, Q)
    assert value.witness == witness
    assert value.resonance == resonance[0] + sqrt2 * resonance[1]
    assert value.enclosure.width <= Fraction(1, 10**9) * value.upper


def test_psi_floor(sqrt2_flow):
    # 3 + 2√2 ≈ 5.83, 7 + 5√2 ≈ 14.07
    assert psi(sqrt2_flow, 5).floor() == 5
    assert psi(sqrt2_flow, 16).floor() == 14


def test_psi_for_periodic_flow(half_flow):
    value = psi(half_flow, 2)
    assert value.witness == (2, 1)
    assert value.lower == value.upper == Fraction(2, 5)
    assert psi(half_flow, 100).upper == Fraction(2, 5)


def test_psi_below_q_alpha(half_flow):
    with pytest.raises(DomainError):
        psi(half_flow, 1)


@pytest.mark.parametrize("fixture, Qs", [("sqrt2_flow", range(1, 21)), ("resonant_flow", range(1, 7)), ("three_flow", range(1, 7))])
def test_psi_agrees_with_brute_force(request, fixture, Qs):
    R = request.getfixturevalue(fixture)
    for Q in Qs:
        value = psi(R, Q)
        oracle = _oracle_min(R, Q)
        assert scalars.compare(value.resonance, scalars.abs_scalar(scalars.dot(oracle, R.alpha))) == 0
        assert scalars.sign(scalars.dot(value.witness, R.alpha)) > 0
        assert max(abs(x) for x in value.witness) <= Q


def test_psi_profile_is_monotone(resonant_flow):
    values = psi_profile(resonant_flow, range(1, 12))
    assert all(a.lower <= b.upper for a, b in zip(values, values[1:]))


def test_reciprocal_enclosure(sqrt2):
    interval = reciprocal_enclosure(sqrt2 - 1)
    # 1/(√2 - 1) = 1 + √2
    assert (interval.lower - 1) ** 2 <= 2 <= (interval.upper - 1) ** 2
    assert interval.width <= Fraction(1, 10**11)


def test_theorem1_delta_max(sqrt2_flow, resonant_flow, half_flow):
    assert theorem1_delta_max(sqrt2_flow) == 1
    assert theorem1_delta_max(resonant_flow) == Fraction(4, 5)
    assert theorem1_delta_max(half_flow) == Fraction(1, 8)


def _box_minima(R, Q_max):
    """Smallest |k·α| over Λ ∩ [-Q, Q]^n for every Q <= Q_max, from one vectorized box."""
    axis = np.arange(-Q_max, Q_max + 1)
    box = np.stack(np.meshgrid(*[axis] * R.n, indexing="ij"), axis=-1).reshape(-1, R.n)
    kernel = np.array(R.K.basis, dtype=np.int64).reshape(-1, R.n)
    keep = box.any(axis=1) & ~(box.dot(kernel.T) != 0).any(axis=1)
    box = box[keep]
    values = np.abs(box.dot(np.array([scalars.to_float(a) for a in R.alpha])))
    heights = np.abs(box).max(axis=1)
    minima = {}
    for Q in range(1, Q_max + 1):
        inside = np.flatnonzero(heights <= Q)
        if len(inside):
            minima[Q] = tuple(int(x) for x in box[inside[np.argmin(values[inside])]])
    return minima


@pytest.mark.parametrize("fixture", ["three_flow", "cbrt2_flow"])
def test_psi_agrees_with_brute_force_in_three_dimensions(request, fixture):
    R = request.getfixturevalue(fixture)
    assert R.d == 3
    for Q, oracle in _box_minima(R, 20).items():
        value = psi(R, Q)
        assert scalars.compare(value.resonance, scalars.abs_scalar(scalars.dot(oracle, R.alpha))) == 0
        assert max(abs(x) for x in value.witness) <= Q
