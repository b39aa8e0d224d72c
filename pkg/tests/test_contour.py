import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from ptquartic.contour import (OdeState, ProblemPoint, RaySpec, SeedRadiusError, default_radius,
                               integrate, min_radius, subdominant_at, wkb_seed, wronskian)
from ptquartic.spectrum import Shooter

QES_POINT = ProblemPoint(1.0, 1.0, -1.0)


def test_seed_matches_exact_qes_solution():
    # y = exp(z^3/3 - z) solves the equation at (b, J, lambda) = (1, 1, -1)
    R = default_radius(QES_POINT)
    s = wkb_seed(QES_POINT, RaySpec.sector(1, R))
    z = s.z
    assert abs(z - R * cmath.exp(1j * math.pi / 3)) < 1e-12
    assert abs(s.dy / s.y - (z * z - 1.0)) < 1e-10 * abs(z) ** 2
    # the seed carries the normalization y ~ exp(z^3/3 - z) itself
    log_exact = z ** 3 / 3 - z
    assert abs(s.logscale + cmath.log(s.y).real - log_exact.real) < 1e-9


def test_conjugate_rays_give_conjugate_seeds():
    p = ProblemPoint(0.7, -0.3, -2.5)
    R = default_radius(p)
    up = wkb_seed(p, RaySpec.sector(1, R))
    down = wkb_seed(p, RaySpec.sector(-1, R))
    assert down.z == pytest.approx(up.z.conjugate(), abs=1e-12)
    assert down.y == pytest.approx(up.y.conjugate(), rel=1e-13)
    assert down.dy == pytest.approx(up.dy.conjugate(), rel=1e-13)
    assert down.logscale == pytest.approx(up.logscale, rel=1e-14)


@pytest.mark.parametrize("sector", [1, 0, -1])
def test_two_radius_agreement(sector):
    p = ProblemPoint(-0.5, 0.5, -3.0 + 0.5j)
    R = default_radius(p)
    a = subdominant_at(p, sector, 0j, R, 1e-12)
    b = subdominant_at(p, sector, 0j, R + 2.0, 1e-12)
    assert abs(a.value / b.value - 1.0) < 1e-8
    assert abs(a.derivative / b.derivative - 1.0) < 1e-8


def test_integration_is_linear():
    p = ProblemPoint(0.3, 0.2, -1.1)
    start = OdeState(2.0 + 1.0j, 0.3 - 0.2j, 1.1 + 0.4j)
    one = integrate(p, start, -0.5 + 0.25j, 1e-11)
    two = integrate(p, start.scaled(2.0), -0.5 + 0.25j, 1e-11)
    assert two.value == pytest.approx(2.0 * one.value, rel=1e-13)
    assert two.derivative == pytest.approx(2.0 * one.derivative, rel=1e-13)


def test_qes_solution_reaches_origin_with_known_ratio():
    s = subdominant_at(QES_POINT, 1, 0j, tol=1e-12)
    assert s.derivative / s.value == pytest.approx(-1.0, abs=1e-9)
    # and with the exact normalization y(0) = 1
    assert s.value == pytest.approx(1.0, abs=1e-8)


def test_tolerance_convergence_is_monotone():
    p = ProblemPoint(0.5, 0.5, -2.0)
    start = OdeState(3.0 * cmath.exp(1j * math.pi / 3), 1.0, 0.0)
    ref = integrate(p, start, 0.5j, 1e-14)
    errs = [abs(integrate(p, start, 0.5j, tol).value - ref.value) / abs(ref.value)
            for tol in (1e-6, 1e-8, 1e-10)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-9


def test_wronskian_of_exact_pair():
    p = ProblemPoint(0.0, 0.0, -1.0)
    s1 = OdeState(0.0, 1.0, 0.0)
    s2 = OdeState(0.0, 0.0, 1.0)
    w0 = wronskian(s1, s2)
    z = 1.5 + 0.5j
    w1 = wronskian(integrate(p, s1, z, 1e-12), integrate(p, s2, z, 1e-12))
    assert w0 == 1.0
    assert w1 == pytest.approx(1.0, rel=1e-9)


def test_invalid_states_and_rays():
    with pytest.raises(ValueError):
        OdeState(0j, 0j, 0j)
    with pytest.raises(ValueError):
        OdeState(0j, float("nan"), 1.0)
    with pytest.raises(ValueError):
        RaySpec(0.0, 0.5)
    p = ProblemPoint(3.0, 2.0, -30.0)
    with pytest.raises(SeedRadiusError):
        wkb_seed(p, RaySpec.sector(1, 0.5 * min_radius(p) + 0.5))
    with pytest.raises(ValueError):
        wronskian(OdeState(0j, 1, 0), OdeState(1j, 1, 0))


@settings(max_examples=15, deadline=None)
@given(b=st.floats(-2, 2), J=st.floats(-1.5, 1.5), re=st.floats(-12, 2), im=st.floats(0.05, 3))
def test_conjugation_symmetry_of_W(b, J, re, im):
    lam = complex(re, im)
    sh = Shooter.for_region(b, J, [lam], 1e-11)
    w = sh.W(lam)
    w_bar = sh.W(lam.conjugate())
    assert abs(w_bar + w.conjugate()) <= 1e-7 * max(abs(w), 1e-300) + 1e-14
