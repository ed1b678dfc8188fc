"""Pure-numpy statevector kernels.

Amplitude layout: qubit 0 is the most significant bit, i.e. basis index
``i`` has qubit ``q`` in state ``(i >> (n - 1 - q)) & 1`` for an n-qubit
register.  Two-qubit gates are 4x4 matrices over |q0 q1>.
"""

import numpy as np


def _n_qubits(size: int) -> int:
    return size.bit_length() - 1


def apply_two_qubit(psi, u, q0, q1):
    """Apply a 4x4 gate to qubits (q0, q1); returns a new amplitude array."""
    n = _n_qubits(psi.size)
    t = psi.reshape((2,) * n)
    t = np.moveaxis(t, (q0, q1), (0, 1)).reshape(4, -1)
    t = u @ t
    t = np.moveaxis(t.reshape((2, 2) + (2,) * (n - 2)), (0, 1), (q0, q1))
    return np.ascontiguousarray(t.reshape(-1))


def reduced_density_1(psi, j):
    """2x2 reduced density matrix of qubit j."""
    n = _n_qubits(psi.size)
    t = np.moveaxis(psi.reshape((2,) * n), j, 0).reshape(2, -1)
    return t @ t.conj().T


def reduced_density_2(psi, j, k):
    """4x4 reduced density matrix of qubits (j, k), row index = |q_j q_k>."""
    n = _n_qubits(psi.size)
    t = np.moveaxis(psi.reshape((2,) * n), (j, k), (0, 1)).reshape(4, -1)
    return t @ t.conj().T
