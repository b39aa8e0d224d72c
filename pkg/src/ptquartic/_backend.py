"""Kernel backend selection.

The compiled extension is used when importable; setting the environment
variable ``PTQUARTIC_PURE_PYTHON=1`` forces the reference implementation.
"""

import os

from . import _pykernels

if os.environ.get("PTQUARTIC_PURE_PYTHON"):
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        kernels = _pykernels
        BACKEND = "python"
    else:
        BACKEND = "cython"

STEP_ERRORS = tuple({_pykernels.StepUnderflow, kernels.StepUnderflow})

__all__ = ["kernels", "BACKEND", "STEP_ERRORS"]
