import math

import numpy as np
import pytest

from ptquartic.contour import ProblemPoint
from ptquartic.spectrum import (Box, NotAnEigenvalue, Shooter, count_real_zeros, eigenfunction,
                                find_eigenvalues_in_box, lowest_levels, mismatch, mismatch_scale,
                                spectrum_is_real)

# top of the spectrum at b = J = 0; with y'' = (z^4 - lambda) y the levels are negative
HARMONIC_TOP = (-1.4771497535779, -6.0033860833081, -11.802433595135,
                -18.458818704077, -25.791792378525)


def rel_W(b, J, lam):
    sh = Shooter.for_region(b, J, [lam], 1e-12)
    return abs(sh.W(lam)) / mismatch_scale(b, J, lam)


def test_qes_point_is_a_zero_of_W():
    assert rel_W(1.0, 1.0, -1.0) < 1e-8


def test_lambda_zero_is_not_an_eigenvalue():
    assert rel_W(0.0, 0.0, 0.0) > 1e-3


def test_top_of_harmonic_spectrum():
    evs, complete, _ = lowest_levels(0.0, 0.0, 5)
    assert complete
    got = [e.lam for e in evs]
    assert all(l.imag == 0.0 for l in got)
    assert [l.real for l in got] == pytest.approx(HARMONIC_TOP, abs=1e-8)


def test_box_with_five_real_levels():
    # the levels of the mirrored box [-30, 0] x [-2, 2]; see the README note on sign conventions
    sp = find_eigenvalues_in_box(0.0, 0.0, Box(-30.0, 0.0, -2.0, 2.0))
    assert sp.winding == 5
    assert not sp.complex_values()
    assert sp.real_values() == pytest.approx(sorted(HARMONIC_TOP), abs=1e-8)


def test_box_around_qes_root():
    sp = find_eigenvalues_in_box(1.0, 1.0, Box(-2.0, 0.0, -1.0, 1.0))
    assert sp.real_values() == pytest.approx([-1.0], abs=1e-9)


def test_both_qes_roots_at_b2_J2():
    r = 2.0 * math.sqrt(2.0)
    sp = find_eigenvalues_in_box(2.0, 2.0, Box(-8.0, 0.0, -1.0, 1.0))
    vals = sp.real_values()
    for q in (-4.0 + r, -4.0 - r):
        assert min(abs(v - q) for v in vals) < 1e-8


def test_eigenvalues_satisfy_residual_and_conjugation():
    sp = find_eigenvalues_in_box(-1.0, 2.0, Box(-8.0, 2.0, -4.0, 4.0))
    for e in sp.eigenvalues:
        assert e.residual < 1e-7
    pairs = sp.complex_values()
    assert pairs, "J=2, b=-1 has the QES pair -1 +- 2i"
    for lam in pairs:
        assert min(abs(lam.conjugate() - m) for m in pairs) < 1e-9
    assert min(abs(lam - (-1 + 2j)) for lam in pairs) < 1e-8


def test_ordering_rule():
    sp = find_eigenvalues_in_box(-1.0, 2.0, Box(-8.0, 2.0, -4.0, 4.0))
    kinds = [e.conjugate_pair for e in sp.eigenvalues]
    assert kinds == sorted(kinds)
    reals = sp.real_values()
    assert reals == sorted(reals)
    cplx = [(l.real, -l.imag) for l in sp.complex_values()]
    assert cplx == sorted(cplx)


def test_double_eigenvalue_at_qes_collision():
    sp = find_eigenvalues_in_box(0.0, 2.0, Box(-1.0, 1.0, -1.0, 1.0))
    assert sp.winding == 2
    assert [e.multiplicity for e in sp.eigenvalues] == [2]
    assert abs(sp.eigenvalues[0].lam) < 1e-5


def test_mismatch_is_radius_independent():
    p = ProblemPoint(0.5, -0.5, -4.0 + 1.0j)
    w1 = mismatch(p, 5.0, 1e-12)
    w2 = mismatch(p, 7.0, 1e-12)
    assert abs(w1 / w2 - 1.0) < 1e-8


def test_qes_eigenfunction_on_real_axis():
    tr = eigenfunction(ProblemPoint(1.0, 1.0, -1.0), X=1.5, n=60)
    xs, ys = tr.real_axis_values()
    exact = np.exp(xs ** 3 / 3 - xs)
    ratio = ys / exact
    assert np.max(np.abs(ratio / ratio[0] - 1.0)) < 1e-7
    assert np.all(np.abs(ys) > 0)


def test_real_eigenfunction_is_real_after_rotation():
    lam = HARMONIC_TOP[2]
    tr = eigenfunction(ProblemPoint(0.3, 0.5, lowest_levels(0.3, 0.5, 3)[0][2].lam.real))
    _, ys = tr.real_axis_values()
    assert np.max(np.abs(ys.imag)) < 1e-6 * np.max(np.abs(ys))
    assert lam < 0


@pytest.mark.parametrize("k, zeros", [(0, 0), (1, 1), (4, 0)])
def test_real_zero_counts_at_origin(k, zeros):
    pt = ProblemPoint(0.0, 0.0, HARMONIC_TOP[k])
    assert count_real_zeros(eigenfunction(pt)) == zeros


def test_eigenfunction_refuses_non_eigenvalue():
    with pytest.raises(NotAnEigenvalue):
        eigenfunction(ProblemPoint(0.0, 0.0, -3.0))


@pytest.mark.parametrize("b, J", [(0.0, 0.0), (-2.0, 1.0)])
def test_spectrum_is_real(b, J):
    rep = spectrum_is_real(b, J, 6)
    assert rep.all_real and len(rep.levels) == 6 and rep.max_imag == 0.0


def test_j2_has_a_pair_somewhere():
    rep = spectrum_is_real(-1.0, 2.0, 6)
    assert rep.complex_pairs and not rep.all_real


def test_simple_distinct_at_origin():
    rep = spectrum_is_real(0.0, 0.0, 6)
    vals = sorted(l.real for l in rep.levels)
    assert np.all(np.diff(vals) > 1.0)
