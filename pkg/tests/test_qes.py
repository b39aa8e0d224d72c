import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ptquartic import qes
from ptquartic.qes import BivarPoly

B, L = BivarPoly.b(), BivarPoly.lam()


def test_system_for_J1_is_a_single_equation():
    sys1 = qes.qes_recurrence_system(1)
    assert sys1.exact(Fraction(3), Fraction(-2)) == [[-2 + 9]]


def test_system_for_J2():
    # (lambda + b^2) c0 = 2 b c1 and (lambda + b^2) c1 = 2 c0
    m = qes.qes_recurrence_system(2).exact(Fraction(2), Fraction(1))
    s = 1 + 4
    assert m == [[s, -2 * 2], [-2, s]]


@pytest.mark.parametrize("J", [1, 2, 3, 4, 5])
def test_recurrence_closes_at_degree_J_minus_1(J):
    m = qes.qes_recurrence_system(J).exact(Fraction(1, 3), Fraction(2, 7))
    assert len(m) == J and all(len(r) == J for r in m)


def test_Q1_and_Q2_exact():
    assert qes.qes_polynomial(1) == L + B ** 2
    assert qes.qes_polynomial(2) == (L + B ** 2) ** 2 - 4 * B


def test_Q3_closed_form():
    q3 = L ** 3 + 3 * B ** 2 * L ** 2 + 3 * B ** 4 * L - 16 * B * L + B ** 6 - 16 * B ** 3 + 16
    assert qes.qes_polynomial(3) == q3


@pytest.mark.parametrize("J", range(1, 8))
def test_degree_and_monic(J):
    Q = qes.qes_polynomial(J)
    assert Q.degree_lambda == J
    assert Q.coeff_in_lambda(J) == {0: 1}
    assert all(v != 0 for _, v in Q)


@pytest.mark.parametrize("J", [1, 2, 3, 4])
def test_recurrence_rederived_symbolically(J):
    assert qes.rederive_recurrence(J)


def test_json_round_trip_and_decimal_strings():
    data = qes.qes_to_json(3)
    text = json.dumps(data)
    J, Q = qes.qes_from_json(text)
    assert J == 3 and Q == qes.qes_polynomial(3)
    assert all(isinstance(t["coeff"], str) for t in data["terms"])
    assert {(t["db"], t["dl"]): t["coeff"] for t in data["terms"]}[(3, 0)] == "-16"


@pytest.mark.parametrize("J, b, roots", [(1, 1.0, [-1.0]), (2, 1.0, [1.0, -3.0])])
def test_real_roots(J, b, roots):
    assert qes.qes_eigenvalues(J, b) == pytest.approx(roots, abs=1e-13)


def test_complex_pair_for_negative_b():
    r = qes.qes_eigenvalues(2, -1.0)
    assert sorted((x.imag for x in r)) == pytest.approx([-2.0, 2.0])
    assert all(x.real == pytest.approx(-1.0) for x in r)


@settings(max_examples=30, deadline=None)
@given(J=st.integers(1, 6), b=st.floats(-3, 3))
def test_roots_are_roots(J, b):
    Q = qes.qes_polynomial(J)
    for r in qes.qes_eigenvalues(J, b):
        scale = sum(abs(c) * max(1.0, abs(b)) ** i * max(1.0, abs(r)) ** j for (i, j), c in Q)
        assert abs(Q(b, r)) < 1e-10 * scale


def test_discriminants():
    assert qes.qes_discriminant(2) == {1: 16}
    assert qes.qes_discriminant(3) == {3: 16384, 0: -6912}
    assert qes.has_collision(2, 0)
    assert not qes.has_collision(2, Fraction(1))
    assert qes.has_collision(3, Fraction(3, 4))        # 16384 b^3 = 6912


def test_eigenfunction_polynomials():
    p = qes.qes_eigenfunction(1, 1.0, -1.0)
    assert np.allclose(p.coeffs, [1.0])
    a = qes.qes_eigenfunction(2, 1.0, 1.0)
    c = qes.qes_eigenfunction(2, 1.0, -3.0)
    assert np.allclose(a.coeffs, [1.0, 1.0])          # z + 1
    assert np.allclose(c.coeffs, [-1.0, 1.0])         # z - 1
    assert a.real_roots == pytest.approx((-1.0,))
    assert not np.allclose(a.coeffs, c.coeffs)


def test_eigenfunction_collision():
    with pytest.raises(qes.QesCollision):
        qes.qes_eigenfunction(2, 0.0, 0.0)


def test_exact_kernel():
    vec = qes.qes_eigenfunction_exact(2, 1, 1)
    assert [str(v) for v in vec] == ["1", "1"]


def test_invalid_J():
    for bad in (0, -1, 1.5):
        with pytest.raises(qes.QesError):
            qes.qes_polynomial(bad)


def test_roots_match_shooting_at_b1():
    from ptquartic.spectrum import Shooter, mismatch_scale
    for r in qes.qes_eigenvalues(3, 1.0):
        sh = Shooter.for_region(1.0, 3.0, [r], 1e-12)
        assert abs(sh.W(r)) < 1e-8 * mismatch_scale(1.0, 3.0, r)


def test_string_form():
    assert str(qes.qes_polynomial(2)) == "lambda^2 + 2*b^2*lambda + b^4 - 4*b"
