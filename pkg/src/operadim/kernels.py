"""Kernel selection: numba-compiled elimination by default, pure numpy on demand.

Set OPERADIM_KERNEL=numpy to force the fallback (or =numba to insist on the
compiled path and fail loudly if numba is unusable).
"""

from __future__ import annotations

import os
from typing import Callable

import numpy as np

_ENV_VAR = "OPERADIM_KERNEL"


def _load(choice: str) -> Callable[[np.ndarray, int], int]:
    if choice == "numpy":
        from . import _kernels_numpy

        return _kernels_numpy.dense_rank
    if choice == "numba":
        from . import _kernels_numba

        return _kernels_numba.dense_rank
    raise ValueError(f"{_ENV_VAR} must be 'numba' or 'numpy', got {choice!r}")


def active_kernel_name() -> str:
    choice = os.environ.get(_ENV_VAR, "").strip().lower()
    if choice:
        return choice
    try:
        import numba  # noqa: F401

        return "numba"
    except ImportError:
        return "numpy"


def dense_rank(A: np.ndarray, p: int) -> int:
    """Rank over GF(p) of a uint64 residue matrix; A is consumed."""
    return _load(active_kernel_name())(A, p)
