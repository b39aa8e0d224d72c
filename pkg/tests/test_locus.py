import numpy as np
import pytest

from ptquartic import locus, qes
from ptquartic.contour import ProblemPoint
from ptquartic.spectrum import Shooter, count_real_zeros, eigenfunction, mismatch_scale


@pytest.fixture(scope="module")
def j0_branch():
    from ptquartic.spectrum import lowest_levels
    lam0 = lowest_levels(0.0, 0.0, 1)[0][0].lam.real
    return locus.trace_branch(0.0, (0.0, lam0), (-2.0, 2.0))


def test_j0_branch_is_a_graph_without_events(j0_branch):
    c = j0_branch
    assert c.is_graph() and not c.events and not c.truncated
    assert c.samples[-1][0] == 2.0


def test_samples_are_on_the_locus(j0_branch):
    for b, lam in j0_branch.samples[::7]:
        sh = Shooter.for_region(b, 0.0, [lam], 1e-12)
        assert abs(sh.W(lam)) < 1e-7 * mismatch_scale(b, 0.0, lam)


def test_step_cap(j0_branch):
    pts = np.array([(b, l.real) for b, l in j0_branch.samples])
    steps = np.hypot(*np.diff(pts, axis=0).T)
    assert steps.max() <= 2 * locus.STEP_MAX


def test_zero_count_constant_along_branch():
    from ptquartic.spectrum import lowest_levels
    lam = lowest_levels(-1.0, 0.5, 2)[0][1].lam.real
    c = locus.trace_branch(0.5, (-1.0, lam), (-1.0, 1.0))
    counts = {count_real_zeros(eigenfunction(ProblemPoint(b, 0.5, l.real)))
              for b, l in c.samples[::6]}
    assert counts == {1}


def test_branch_through_qes_point_follows_q1():
    c = locus.trace_branch(1.0, (1.0, -1.0), (0.5, 1.5), deflate=False)
    assert len(c.samples) > 5
    assert max(abs(l.real + b * b) for b, l in c.samples) < 1e-8
    assert not c.events


def test_j2_fold_is_a_pair_birth():
    c = locus.trace_branch(2.0, (1.0, -3.0), (-3.0, 3.0), deflate=False, direction=-1)
    types = [e.type for e in c.events]
    assert locus.TURNING_POINT in types and locus.PAIR_BIRTH in types
    birth = next(e for e in c.events if e.type == locus.PAIR_BIRTH)
    assert abs(birth.b) < 0.05 and abs(birth.lam) < 0.3


def test_qes_intersection_on_J1_branch():
    seeds = locus.seed_levels(1.0, -3.0, 1)
    c = locus.trace_branch(1.0, (-3.0, seeds[0]), (-3.0, 0.0))
    ev = [e for e in c.events if e.type == locus.QES_INTERSECTION]
    assert len(ev) == 1
    e = ev[0]
    assert abs(qes.qes_polynomial(1)(e.b, e.lam.real)) < 1e-9
    # two eigenvalues coincide there: the QES one and the traced one
    sh = Shooter.for_region(e.b, 1.0, [e.lam], 1e-12)
    d = 1e-4
    assert abs(sh.F(e.lam.real + d) - sh.F(e.lam.real - d)) < 1e-3 * abs(sh.F(e.lam.real + 0.3))


def test_darboux_mirror_of_traced_branches():
    seeds = locus.seed_levels(1.0, -1.0, 2)
    mirror = locus.LocusFunction(-1.0)
    for k, lam in enumerate(seeds):
        c = locus.trace_branch(1.0, (-1.0, lam), (-1.0, 0.0), branch_id=str(k))
        for b, l in c.samples[::5]:
            assert abs(mirror.solve_lambda(b, l.real) - l.real) < 1e-6


def test_seed_levels_skip_qes_roots():
    seeds = locus.seed_levels(1.0, 1.0, 3)
    assert all(abs(s + 1.0) > 1e-3 for s in seeds)
    assert seeds == sorted(seeds, reverse=True)


def test_pair_events_j2_and_stability():
    ev = locus.detect_pair_events(2.0, (-1.0, 1.0), n_track=4)
    assert len(ev) == 1 and ev[0].resolved
    e = ev[0]
    assert abs(e.b) < 2e-6                     # the QES pair collides exactly at b = 0
    b_real, b_cplx = e.b_interval[::-1] if e.complex_side == "left" else e.b_interval
    b2, _ = locus.bisect_pair_birth(2.0, b_real, b_cplx, e.bracket, 1e-6, locus.TRACE_TOL / 2)
    assert abs(b2 - e.b) <= 1e-6


def test_no_pair_events_for_half_integer():
    assert locus.detect_pair_events(0.5, (-4.0, 4.0), n_track=4, grid_step=1.0) == []


def test_pair_after_birth_is_conjugation_closed():
    from ptquartic.spectrum import Box, find_eigenvalues_in_box
    sp = find_eigenvalues_in_box(-0.2, 2.0, Box(-1.5, 1.0, -2.0, 2.0))
    pair = sp.complex_values()
    assert len(pair) == 2 and pair[0] == pair[1].conjugate()


def test_sweep_small_grid():
    rep = locus.theorem1_sweep([-3, 0, 3], [-1, 0.5, 1], 6)
    assert not rep.failures and rep.max_imag < 1e-6 and not rep.complex_points


def test_sweep_rejects_large_J():
    with pytest.raises(ValueError):
        locus.theorem1_sweep([0.0], [1.2], 6)


def test_sweep_beyond_contract_may_find_pairs():
    point = locus._sweep_one((-1.0, 2.0, 6, 1e-9))
    assert point.ok and point.report.complex_pairs


def test_qes_curves_for_J2():
    curves = locus.qes_curves(2, (-3.0, 3.0), n=121)
    assert len(curves) == 2
    for c in curves:
        assert all(b >= 0 for b, _ in c.samples)
        assert all(abs(qes.qes_polynomial(2)(b, l.real)) < 1e-8 for b, l in c.samples)
