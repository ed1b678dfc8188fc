"""Statevector kernels with a compiled fast path.

The Cython extension is selected automatically when present; set
``COLLIDEKIT_KERNELS=numpy`` or ``COLLIDEKIT_KERNELS=compiled`` to force a
backend (the benchmark uses this).
"""

import os

import numpy as np

from ..errors import DimensionError
from . import numpy_backend

try:
    from . import _fastkernels as _compiled
except ImportError:
    _compiled = None

_requested = os.environ.get("COLLIDEKIT_KERNELS", "").strip().lower()
if _requested in ("", "auto"):
    _active = _compiled if _compiled is not None else numpy_backend
elif _requested == "numpy":
    _active = numpy_backend
elif _requested in ("compiled", "cython"):
    if _compiled is None:
        raise ImportError("COLLIDEKIT_KERNELS=compiled but the extension is not built")
    _active = _compiled
else:
    raise ValueError(f"unknown COLLIDEKIT_KERNELS value {_requested!r}")

#: Name of the backend selected at import time.
BACKEND = "compiled" if _active is _compiled and _compiled is not None else "numpy"


def _checked_state(psi) -> np.ndarray:
    psi = np.ascontiguousarray(psi, dtype=np.complex128).ravel()
    if psi.size < 4 or psi.size & (psi.size - 1):
        raise DimensionError(f"state length {psi.size} is not a power of two >= 4")
    return psi


def _check_qubits(n: int, *qubits):
    seen = set()
    for q in qubits:
        if not 0 <= q < n:
            raise DimensionError(f"qubit index {q} out of range for {n} qubits")
        if q in seen:
            raise DimensionError(f"qubit index {q} repeated")
        seen.add(q)


def apply_two_qubit(psi, u, q0: int, q1: int) -> np.ndarray:
    """Apply a 4x4 gate (ordered |q0 q1>) to the register; returns new amplitudes."""
    psi = _checked_state(psi)
    _check_qubits(psi.size.bit_length() - 1, q0, q1)
    u = np.ascontiguousarray(u, dtype=np.complex128)
    if u.shape != (4, 4):
        raise DimensionError(f"two-qubit gate must be 4x4, got {u.shape}")
    return _active.apply_two_qubit(psi, u, q0, q1)


def reduced_density_1(psi, j: int) -> np.ndarray:
    """2x2 reduced density matrix of qubit j."""
    psi = _checked_state(psi)
    _check_qubits(psi.size.bit_length() - 1, j)
    return _active.reduced_density_1(psi, j)


def reduced_density_2(psi, j: int, k: int) -> np.ndarray:
    """4x4 reduced density matrix of the (j, k) pair, row index |q_j q_k>."""
    psi = _checked_state(psi)
    _check_qubits(psi.size.bit_length() - 1, j, k)
    return _active.reduced_density_2(psi, j, k)
