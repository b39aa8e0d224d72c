import numpy as np
import pytest

from ptquartic.oracle import fd_eigenvalues
from ptquartic.spectrum import lowest_levels

HARMONIC_FREE = [-1.4771497535779, -6.0033860833081, -11.802433595135,
                 -18.458818704077, -25.791792378525]


def test_fd_matches_reference_levels():
    fd = fd_eigenvalues(0.0, 0.0, 5)
    assert np.allclose(fd.real, HARMONIC_FREE, rtol=1e-6)
    assert np.max(np.abs(fd.imag)) < 1e-6


@pytest.mark.parametrize("b, J", [(1.0, 1.0), (-1.0, 0.5), (2.0, -1.0)])
def test_fd_agrees_with_shooting(b, J):
    evs, complete, _ = lowest_levels(b, J, 4)
    assert complete
    fd = fd_eigenvalues(b, J, 4)
    for e, f in zip(evs, fd):
        assert abs(e.lam - f) / abs(e.lam) < 1e-3


def test_fd_levels_are_ordered_from_the_top():
    fd = fd_eigenvalues(0.5, 0.0, 4)
    assert list(fd.real) == sorted(fd.real, reverse=True)


def test_fd_needs_enough_nodes():
    with pytest.raises(ValueError):
        fd_eigenvalues(0.0, 0.0, 3, nodes_per_ray=199)
