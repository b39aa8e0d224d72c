import os
import subprocess
import sys

import numpy as np
import pytest

from ptquartic import _pykernels
from ptquartic._backend import BACKEND, kernels

COEFFS = (0.4 + 0j, -1.2 + 0j, -2.0 + 0j, 0j, 1 + 0j)   # -lambda, 2J, -2b, 0, 1


def test_backend_is_reported():
    assert BACKEND in ("cython", "python")


def test_pure_python_switch():
    env = dict(os.environ, PTQUARTIC_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c",
                          "from ptquartic._backend import BACKEND; print(BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.skipif(BACKEND != "cython", reason="compiled extension not built")
@pytest.mark.parametrize("z1", [0j, 1.5 - 0.5j, -2.0 + 2.0j])
def test_backends_agree_on_segments(z1):
    args = (3.0 + 1.0j, z1, 0.2 - 0.1j, 1.0 + 0.3j, 1.5, COEFFS, 1e-11, 0.1)
    a = _pykernels.integrate_segment(*args)
    b = kernels.integrate_segment(*args)
    ya = a[0] * np.exp(a[2])
    yb = b[0] * np.exp(b[2])
    assert abs(ya - yb) <= 1e-9 * abs(ya)


@pytest.mark.skipif(BACKEND != "cython", reason="compiled extension not built")
def test_backends_agree_on_series():
    args = (1.0, 0.5, -0.5, -3.0 + 0.2j, 6.0 * np.exp(1j * np.pi / 3), 200)
    a = _pykernels.riccati_series(*args)
    b = kernels.riccati_series(*args)
    for x, y in zip(a, b):
        assert abs(x - y) <= 1e-12 * max(1.0, abs(x))


def test_step_underflow_is_an_arithmetic_error():
    assert issubclass(_pykernels.StepUnderflow, ArithmeticError)
