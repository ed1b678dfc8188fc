"""Qubit channels as Pauli transfer matrices.

A channel is stored as the real 4x4 matrix ``m`` with entries
``m[a, b] = tr(sigma_a E[sigma_b]) / 2`` over the basis (I, x, y, z); trace
preservation pins the first row to (1, 0, 0, 0).  Bloch vectors transform
affinely, ``r' = t + T r``, with ``t = m[1:, 0]`` and ``T = m[1:, 1:]``.
Complete positivity is decided through the Choi matrix (trace-1 convention).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NormalizationError, ShapeError, SingularChannelError, UnitarityError
from .linalg import PAULIS, partial_trace, tensor
from .states import DensityOperator

CP_TOL = 1e-10
_TP_ROW_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PauliTransferMatrix:
    """Trace-preserving qubit map in the Pauli basis."""

    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=float)
        if m.shape != (4, 4):
            raise ShapeError(f"transfer matrix must be 4x4, got {m.shape}")
        if abs(m[0, 0] - 1.0) > _TP_ROW_TOL or np.abs(m[0, 1:]).max() > _TP_ROW_TOL:
            raise ShapeError(f"first row {m[0]} is not (1, 0, 0, 0): map is not trace preserving")
        m[0] = (1.0, 0.0, 0.0, 0.0)
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @property
    def translation(self) -> np.ndarray:
        return self.m[1:, 0]

    @property
    def linear_block(self) -> np.ndarray:
        return self.m[1:, 1:]

    def __repr__(self):
        return f"PauliTransferMatrix({self.m.tolist()})"


def identity_ptm() -> PauliTransferMatrix:
    return PauliTransferMatrix(np.eye(4))


def channel_from_collision(u, xi: DensityOperator) -> PauliTransferMatrix:
    """Transfer matrix of ``rho -> tr_env[u (rho (x) xi) u^dag]``."""
    u = np.asarray(u, dtype=complex)
    d = 2 * xi.dim
    if u.shape != (d, d):
        raise DimensionError(f"unitary shape {u.shape} does not match system (x) environment")
    if np.abs(u.conj().T @ u - np.eye(d)).max() > 1e-10:
        raise UnitarityError("collision operator is not unitary")
    m = np.empty((4, 4))
    for b in range(4):
        joint = u @ tensor(PAULIS[b], xi.matrix) @ u.conj().T
        image = partial_trace(joint, [2, xi.dim], {1})
        for a in range(4):
            m[a, b] = 0.5 * np.trace(PAULIS[a] @ image).real
    return PauliTransferMatrix(m)


def ptm_apply_operator(ptm: PauliTransferMatrix, x) -> np.ndarray:
    """Linear action of the channel on an arbitrary 2x2 operator."""
    x = np.asarray(x, dtype=complex)
    coords = np.array([np.trace(PAULIS[a] @ x) for a in range(4)])
    out_coords = ptm.m @ coords
    return 0.5 * np.einsum("a,aij->ij", out_coords, PAULIS)


def apply(ptm: PauliTransferMatrix, rho: DensityOperator) -> DensityOperator:
    """Affine Bloch action on a state."""
    if rho.dim != 2:
        raise DimensionError(f"transfer matrices act on qubits, got dim {rho.dim}")
    return DensityOperator(ptm_apply_operator(ptm, rho.matrix))


def compose(e1: PauliTransferMatrix, e2: PauliTransferMatrix) -> PauliTransferMatrix:
    """Composition ``e1 after e2`` (matrix product)."""
    return PauliTransferMatrix(e1.m @ e2.m)


def choi(ptm: PauliTransferMatrix) -> np.ndarray:
    """Choi matrix ``(E (x) I)[|Phi+><Phi+|]`` normalized to trace 1."""
    c = np.zeros((4, 4), dtype=complex)
    for j in range(2):
        for k in range(2):
            unit = np.zeros((2, 2), dtype=complex)
            unit[j, k] = 1.0
            c += tensor(ptm_apply_operator(ptm, unit), unit)
    c *= 0.5
    return 0.5 * (c + c.conj().T)


@dataclass(frozen=True)
class CPVerdict:
    is_cp: bool
    min_eigenvalue: float


def is_completely_positive(ptm: PauliTransferMatrix, tol: float = CP_TOL) -> CPVerdict:
    """Choi positivity test; the verdict keeps the witness eigenvalue."""
    lo = float(np.linalg.eigvalsh(choi(ptm)).min())
    return CPVerdict(is_cp=bool(lo >= -tol), min_eigenvalue=lo)


def determinant(ptm: PauliTransferMatrix) -> float:
    """Determinant of the full transfer matrix (equals det of the linear block)."""
    return float(np.linalg.det(ptm.m))


def is_unitary_channel(ptm: PauliTransferMatrix, tol: float = 1e-10) -> bool:
    """True when the map is conjugation by a unitary: a proper Bloch rotation."""
    t = ptm.translation
    block = ptm.linear_block
    return bool(
        np.abs(t).max() <= tol
        and np.abs(block.T @ block - np.eye(3)).max() <= tol
        and abs(np.linalg.det(block) - 1.0) <= tol
    )


@dataclass(frozen=True)
class DivisibilityReport:
    det: float
    is_unitary: bool
    negative_det_flag: bool
    principal_log_lindblad: bool


def divisibility_report(ptm: PauliTransferMatrix) -> DivisibilityReport:
    """Determinant and Markovianity diagnostics.

    A negative determinant rules out membership in a continuous semigroup
    through the principal branch; ``principal_log_lindblad`` records whether
    log of the map is a valid generator.  These are diagnostics only, not a
    decision procedure for indivisibility.
    """
    from .errors import BranchCutError
    from .lindblad import generator_from_log, is_lindblad

    det = determinant(ptm)
    if det == 0.0:
        raise SingularChannelError("channel determinant is zero; log undefined")
    try:
        gen = generator_from_log(ptm)
        markovian = is_lindblad(gen).valid
    except (SingularChannelError, BranchCutError):
        markovian = False
    return DivisibilityReport(
        det=det,
        is_unitary=is_unitary_channel(ptm),
        negative_det_flag=det < 0.0,
        principal_log_lindblad=markovian,
    )


def universal_not_ptm() -> PauliTransferMatrix:
    """Transfer matrix of ``rho -> (I + rho^T)/3``, the minimal-determinant channel."""
    m = np.empty((4, 4))
    for b in range(4):
        image = (np.trace(PAULIS[b]) * np.eye(2) + PAULIS[b].T) / 3.0
        for a in range(4):
            m[a, b] = 0.5 * np.trace(PAULIS[a] @ image).real
    return PauliTransferMatrix(m)


def transpose_ptm() -> PauliTransferMatrix:
    """Transfer matrix of ``rho -> rho^T`` (positive but not completely positive)."""
    return PauliTransferMatrix(np.diag([1.0, 1.0, -1.0, 1.0]))


def ptm_from_kraus(kraus) -> PauliTransferMatrix:
    """Build the transfer matrix of ``rho -> sum_i A_i rho A_i^dag``.

    The operator set must satisfy ``sum A_i^dag A_i = I``.
    """
    ops = [np.asarray(a, dtype=complex) for a in kraus]
    if not ops or any(a.shape != (2, 2) for a in ops):
        raise DimensionError("Kraus operators must be a non-empty list of 2x2 matrices")
    total = sum(a.conj().T @ a for a in ops)
    if np.abs(total - np.eye(2)).max() > 1e-10:
        raise NormalizationError("Kraus operators do not sum to the identity")
    m = np.empty((4, 4))
    for b in range(4):
        image = sum(a @ PAULIS[b] @ a.conj().T for a in ops)
        for a_idx in range(4):
            m[a_idx, b] = 0.5 * np.trace(PAULIS[a_idx] @ image).real
    return PauliTransferMatrix(m)


def ptm_to_json(ptm: PauliTransferMatrix) -> dict:
    return {"ptm": ptm.m.tolist()}


def ptm_from_json(obj: dict) -> PauliTransferMatrix:
    if "ptm" not in obj:
        raise ShapeError("channel JSON must carry a 'ptm' key")
    return PauliTransferMatrix(np.asarray(obj["ptm"], dtype=float))


def kraus_from_json(obj: dict) -> PauliTransferMatrix:
    ops = []
    for entry in obj.get("kraus", []):
        re = np.asarray(entry["re"], dtype=float)
        im = np.asarray(entry.get("im", np.zeros_like(re)), dtype=float)
        ops.append(re + 1j * im)
    return ptm_from_kraus(ops)
