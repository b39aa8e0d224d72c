import math

import pytest

from ptquartic import nevanlinna as nv
from ptquartic.contour import ProblemPoint
from ptquartic.spectrum import lowest_levels


def top(b, J, k=0):
    evs, _, _ = lowest_levels(b, J, k + 1)
    return [e.lam for e in evs for _ in range(e.multiplicity)][k].real


@pytest.fixture(scope="module")
def lam0():
    return top(0.0, 0.0)


def test_qes_point_has_a_zero():
    v = nv.asymptotic_values(ProblemPoint(1.0, 1.0, -1.0))
    assert v.a_zero and not v.c_infinite
    assert abs(v.c) == pytest.approx(1.0)
    assert math.isinf(v.t.real)


def test_integer_non_qes_point_has_real_c():
    lam = top(1.0, 1.0, 1)          # level 0 is the QES eigenvalue -1
    v = nv.asymptotic_values(ProblemPoint(1.0, 1.0, lam))
    assert not v.a_zero
    assert abs(v.c.imag) < 1e-5 * abs(v.c)


def test_non_integer_point_has_complex_c():
    v = nv.asymptotic_values(ProblemPoint(0.0, 0.5, top(0.0, 0.5)))
    assert abs(v.c.imag) > 1e-3 * abs(v.c)
    assert not v.a_zero


def test_constraints_on_values(lam0):
    v = nv.asymptotic_values(ProblemPoint(0.0, 0.0, lam0))
    assert not (v.a_zero and v.c_infinite)
    assert abs(v.c) > 1e-6 and abs(v.c - v.a) > 1e-6


def test_off_locus_is_rejected():
    with pytest.raises(nv.NotOnLocus):
        nv.asymptotic_values(ProblemPoint(0.0, 0.0, -3.0))


def test_symmetric_value(lam0):
    s0 = nv.symmetric_value_A(0.0, lam0)
    s1 = nv.symmetric_value_A(0.0, top(0.0, 0.0, 1))
    assert 0 < s0.A < 1 and 0 < s1.A < 1
    assert abs(s0.A - s1.A) > 1e-3
    assert s0.identity_residual < 1e-6 and s1.identity_residual < 1e-6


def test_moebius_relation_at_J0(lam0):
    assert nv.moebius_residual(0.0, lam0) < 1e-8


@pytest.mark.parametrize("a_ratio, c_ratio, verdict", [
    (1e-9, 0.3, nv.QES),
    (1.0, 1e-9, nv.INTEGER_REAL_C),
    (1.0, 0.1, nv.NON_INTEGER),
    (3e-4, 0.1, nv.INCONCLUSIVE),
    (1.0, 2e-4, nv.INCONCLUSIVE),
])
def test_classify(a_ratio, c_ratio, verdict):
    assert nv.classify(a_ratio, c_ratio) == verdict


def test_verdict_examples(lam0):
    assert nv.theorem2_check(ProblemPoint(1.0, 1.0, -1.0)).classification == nv.QES
    assert nv.theorem2_check(ProblemPoint(0.0, 0.0, lam0)).classification == nv.INTEGER_REAL_C
    v = nv.theorem2_check(ProblemPoint(0.0, 0.5, top(0.0, 0.5)))
    assert v.classification == nv.NON_INTEGER and v.consistent


def test_verdict_does_not_depend_on_the_second_solution():
    lam = top(0.0, -0.5)
    a = nv.theorem2_check(ProblemPoint(0.0, -0.5, lam))
    b = nv.theorem2_check(ProblemPoint(0.0, -0.5, lam), mu=0.37)
    assert a.classification == b.classification == nv.NON_INTEGER


SAMPLES = [complex(-1 + 2 * k / 7, 0) for k in range(8)]


def test_schwarzian_identity(lam0):
    rep = nv.schwarzian_residual(ProblemPoint(0.0, 0.0, lam0), SAMPLES)
    assert rep.residual < 1e-4 and not rep.skipped


def test_schwarzian_target_is_linear_in_lambda(lam0):
    d = 1e-3
    base = nv.schwarzian_residual(ProblemPoint(0.0, 0.0, lam0), SAMPLES).residual
    shifted = nv.schwarzian_residual(ProblemPoint(0.0, 0.0, lam0), SAMPLES, lam_shift=d).residual
    assert shifted == pytest.approx(2 * d, rel=1e-2, abs=base + 1e-6)


def test_schwarzian_is_moebius_invariant(lam0):
    p = ProblemPoint(0.0, 0.0, lam0)
    y0, y10 = nv._origin_states(p)
    alpha, beta = 1.7, 0.6
    num = y0.scaled(alpha)
    den = nv._combine(y0, y10, -beta)      # alpha f / (f - beta) with f = y / y1
    for z in (0.3 + 0.1j, -0.5 + 0.2j):
        s1, _ = nv.schwarzian_at(p, y0, y10, z)
        s2, _ = nv.schwarzian_at(p, num, den, z)
        assert abs(s1 - s2) < 1e-6 * max(1.0, abs(s1))
