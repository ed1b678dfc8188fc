"""Dense complex matrix kernels: tensor products, partial traces, Hermitian
eigendecomposition, matrix exponential and principal logarithm.

All functions are pure and operate on plain ``numpy`` arrays; the state and
channel layers wrap them with domain types.
"""

from __future__ import annotations

import string

import numpy as np
import scipy.linalg

from .errors import DimensionError, ShapeError, SingularChannelError

# Centralized numerical tolerances.
HERMITICITY_TOL = 1e-12
RECON_TOL = 1e-10

SIGMA_I = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

#: Pauli basis (identity first), indexed 0..3.
PAULIS = np.stack([SIGMA_I, SIGMA_X, SIGMA_Y, SIGMA_Z])


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    return m


def tensor(a, b) -> np.ndarray:
    """Kronecker product with index convention (i_a i_b, j_a j_b)."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(m, dims, keep) -> np.ndarray:
    """Reduce an operator on a tensor-product space to a subset of factors.

    Parameters
    ----------
    m : array_like
        Square matrix on the full product space.
    dims : sequence of int
        Dimension of each tensor factor, in order.
    keep : iterable of int
        1-based positions of the factors to keep (matching the usual
        tr_1, tr_2, ... labelling), e.g. ``{1}`` keeps the first factor.
    """
    m = _as_square(m)
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise DimensionError(f"invalid subsystem dims {dims}")
    total = int(np.prod(dims))
    if total != m.shape[0]:
        raise DimensionError(
            f"product of dims {dims} = {total} does not match matrix dim {m.shape[0]}"
        )
    keep0 = sorted({int(i) - 1 for i in keep})
    if not keep0:
        raise DimensionError("keep set must be non-empty")
    if keep0[0] < 0 or keep0[-1] >= len(dims):
        raise DimensionError(f"keep positions {sorted(keep)} out of range for {len(dims)} factors")

    n = len(dims)
    t = m.reshape(dims + dims)
    letters = string.ascii_lowercase
    if 2 * n > len(letters):
        raise DimensionError("too many tensor factors")
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for i in range(n):
        if i not in keep0:
            col[i] = row[i]
    out = "".join(row[i] for i in keep0) + "".join(letters[n + i] for i in keep0)
    reduced = np.einsum("".join(row + col) + "->" + out, t)
    d_keep = int(np.prod([dims[i] for i in keep0]))
    return reduced.reshape(d_keep, d_keep)


def hermitian_eig(h):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues sorted in
    descending order and eigenvectors as the matching orthonormal columns.
    """
    h = _as_square(h)
    residual = np.abs(h - h.conj().T).max()
    if residual > HERMITICITY_TOL:
        raise ShapeError(f"matrix is not Hermitian (residual {residual:.3e})")
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def matrix_exp(m) -> np.ndarray:
    """Matrix exponential (scaling-and-squaring via scipy)."""
    return scipy.linalg.expm(_as_square(m))


def matrix_log_principal(m) -> np.ndarray:
    """Principal matrix logarithm.

    Eigenvalue imaginary parts of the result lie in (-pi, pi].  Diagonalizable
    inputs go through a residual-checked eigendecomposition; defective ones
    fall back to inverse scaling-and-squaring.

    Raises
    ------
    SingularChannelError
        If the matrix is singular (no logarithm exists).
    """
    m = _as_square(m)
    evals = np.linalg.eigvals(m)
    scale = max(1.0, np.abs(evals).max())
    if np.abs(evals).min() <= 1e-14 * scale:
        raise SingularChannelError("singular matrix has no logarithm")

    log = None
    w, v = np.linalg.eig(m)
    if np.linalg.cond(v) < 1e8:
        candidate = v @ np.diag(np.log(w)) @ np.linalg.inv(v)
        if _log_residual(candidate, m) <= RECON_TOL:
            log = candidate
    if log is None:
        log = scipy.linalg.logm(m)
        if _log_residual(log, m) > RECON_TOL:
            raise np.linalg.LinAlgError("matrix logarithm failed to converge")
    return log


def _log_residual(log, m) -> float:
    back = scipy.linalg.expm(log)
    return np.abs(back - m).max() / max(1.0, np.abs(m).max())
