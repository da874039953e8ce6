from fractions import Fraction

import numpy as np
import pytest

from utils import scalars
from utils.approx import (
    PeriodicApproximation,
    PeriodicPair,
    certify,
    find_periodic_basis,
    is_close,
    proposition_threshold,
    q_bound,
    within_bound,
)
from utils.errors import HypothesisError
from utils.lattice import determinant


def test_sqrt2_basis_at_q8(sqrt2_flow):
    A = find_periodic_basis(sqrt2_flow, 8)
    assert A.pairs == (PeriodicPair(2, (2, 3)), PeriodicPair(3, (3, 4)))
    assert abs(determinant([p.p for p in A.pairs])) == 1
    assert all(c.passed for c in A.certificates)
    assert A.pairs[0].omega == (1, Fraction(3, 2))


def test_q_bound_value(sqrt2_flow, sqrt2):
    factor, bound = q_bound(sqrt2_flow, 4)
    assert factor == 4
    # 4Ψ(16) = 4(7 + 5√2)
    assert bound.resonance == sqrt2 * 5 - 7
    assert 56 < factor * bound.upper < Fraction(563, 10)
    assert within_bound(56, factor, bound)
    assert not within_bound(57, factor, bound)


def test_periodic_flow_basis(half_flow):
    A = find_periodic_basis(half_flow, proposition_threshold(half_flow))
    assert A.pairs == (PeriodicPair(2, (2, 1)),)
    assert certify(half_flow, A).passed


def test_below_threshold_is_a_hypothesis_error(sqrt2_flow):
    with pytest.raises(HypothesisError) as exc:
        find_periodic_basis(sqrt2_flow, 3)
    assert exc.value.hypothesis == "proposition"


@pytest.mark.parametrize("fixture", ["sqrt2_flow", "resonant_flow"])
@pytest.mark.parametrize("multiple", [1, 2, 4])
def test_certificates_pass_on_the_q_grid(request, fixture, multiple):
    R = request.getfixturevalue(fixture)
    Q = multiple * proposition_threshold(R)
    A = find_periodic_basis(R, Q)
    report = certify(R, A)
    assert report.passed
    assert len(A.pairs) == R.d

    # independent float oracle for closeness and membership
    floats = np.array([scalars.to_float(a) for a in R.alpha])
    for pair in A.pairs:
        assert R.Lambda.contains(pair.p)
        gap = np.max(np.abs(pair.q * floats - np.array(pair.p, dtype=float)))
        assert gap <= R.d / Q + 1e-12
        assert pair.q <= report.bound_factor * report.q_bound.upper


def test_certify_reports_without_raising(sqrt2_flow):
    bad = PeriodicApproximation(Fraction(8), (PeriodicPair(2, (2, 3)), PeriodicPair(4, (4, 6))))
    report = certify(sqrt2_flow, bad)
    assert not report.passed
    failed = {c.name for c in report.checks if not c.passed}
    assert failed == {"closeness", "basis"}


def test_is_close_is_exact_at_the_boundary(half_flow):
    # |1·1 - 0| = 1 exactly
    assert is_close(half_flow, 1, (0, 0), Fraction(1))
    assert not is_close(half_flow, 1, (0, 0), Fraction(99, 100))
