"""State types and elementary state-space geometry.

Density operators are validated on construction (Hermitian, unit trace,
positive up to a roundoff clamp), so downstream code can trust them.
Bloch vectors are plain length-3 float arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NormalizationError, PositivityError, ShapeError
from .linalg import HERMITICITY_TOL, PAULIS, SIGMA_I

TRACE_TOL = 1e-12
#: Eigenvalues in [-EIG_CLAMP_TOL, 0) count as zero; anything lower is an error.
EIG_CLAMP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A d x d positive unit-trace matrix.

    The stored matrix is re-hermitized and trace-normalized so that roundoff
    from iterated maps and partial traces does not accumulate.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"density operator must be square, got shape {m.shape}")
        residual = np.abs(m - m.conj().T).max()
        if residual > HERMITICITY_TOL:
            raise ShapeError(f"density operator not Hermitian (residual {residual:.3e})")
        trace = m.trace()
        if abs(trace - 1.0) > TRACE_TOL:
            raise PositivityError(f"density operator trace {trace} is not 1")
        m = 0.5 * (m + m.conj().T)
        m /= m.trace().real
        lo = np.linalg.eigvalsh(m).min()
        if lo < -EIG_CLAMP_TOL:
            raise PositivityError(f"density operator has negative eigenvalue {lo:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_bloch(cls, r) -> "DensityOperator":
        return density_from_bloch(r)

    @classmethod
    def pure(cls, amplitudes) -> "DensityOperator":
        v = np.asarray(amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            raise NormalizationError("zero vector cannot define a pure state")
        v = v / norm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int = 2) -> "DensityOperator":
        return cls(np.eye(dim, dtype=complex) / dim)

    def bloch(self) -> np.ndarray:
        return bloch_from_density(self)

    def __repr__(self):
        return f"DensityOperator(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class PureStateVector:
    """Normalized amplitude vector over an n-qubit register."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex).ravel()
        if v.size < 2 or v.size & (v.size - 1):
            raise ShapeError(f"amplitude count {v.size} is not a power of two")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > 1e-12:
            raise NormalizationError(f"state norm {norm} is not 1")
        v = v / norm
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @classmethod
    def from_qubits(cls, *qubits) -> "PureStateVector":
        """Tensor product of single-qubit amplitude pairs, first factor leftmost."""
        state = np.array([1.0 + 0j])
        for q in qubits:
            state = np.kron(state, np.asarray(q, dtype=complex).ravel())
        return cls(state)

    def __repr__(self):
        return f"PureStateVector(n_qubits={self.n_qubits})"


def bloch_from_density(rho: DensityOperator) -> np.ndarray:
    """Bloch vector r with r_j = tr(rho sigma_j); qubit states only."""
    if rho.dim != 2:
        raise DimensionError(f"Bloch vector requires a qubit state, got dim {rho.dim}")
    return np.array([np.trace(rho.matrix @ PAULIS[j]).real for j in (1, 2, 3)])


def density_from_bloch(r) -> DensityOperator:
    """Inverse of :func:`bloch_from_density`: rho = (I + r . sigma)/2."""
    r = np.asarray(r, dtype=float).ravel()
    if r.shape != (3,):
        raise ShapeError(f"Bloch vector must have 3 components, got {r.shape}")
    length = np.linalg.norm(r)
    if length > 1.0 + 1e-12:
        raise PositivityError(f"Bloch vector length {length} exceeds 1")
    m = 0.5 * (SIGMA_I + r[0] * PAULIS[1] + r[1] * PAULIS[2] + r[2] * PAULIS[3])
    return DensityOperator(m)


def hs_distance(rho1: DensityOperator, rho2: DensityOperator) -> float:
    """Hilbert-Schmidt (Frobenius) distance ||rho1 - rho2||.

    Unnormalized convention: orthogonal pure states are sqrt(2) apart.
    """
    if rho1.dim != rho2.dim:
        raise DimensionError(f"dimension mismatch {rho1.dim} != {rho2.dim}")
    return float(np.linalg.norm(rho1.matrix - rho2.matrix))


@dataclass(frozen=True)
class StateDiagnostics:
    hermiticity_residual: float
    trace_deviation: float
    min_eigenvalue: float
    hermitian_ok: bool
    trace_ok: bool
    positive_ok: bool

    @property
    def passed(self) -> bool:
        return self.hermitian_ok and self.trace_ok and self.positive_ok


def validate_state(rho) -> StateDiagnostics:
    """Report-only validity check; accepts a DensityOperator or a raw matrix."""
    m = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)
    residual = float(np.abs(m - m.conj().T).max())
    trace_dev = float(abs(m.trace() - 1.0))
    sym = 0.5 * (m + m.conj().T)
    lo = float(np.linalg.eigvalsh(sym).min())
    return StateDiagnostics(
        hermiticity_residual=residual,
        trace_deviation=trace_dev,
        min_eigenvalue=lo,
        hermitian_ok=residual <= HERMITICITY_TOL,
        trace_ok=trace_dev <= TRACE_TOL,
        positive_ok=lo >= -EIG_CLAMP_TOL,
    )


def random_density(dim: int, rng: np.random.Generator) -> DensityOperator:
    """Full-rank random state from the Ginibre ensemble."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return DensityOperator(m / m.trace())


def random_pure(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector of the given dimension."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def density_to_json(rho: DensityOperator) -> dict:
    """JSON-friendly form {"dim": n, "re": [[..]], "im": [[..]]}."""
    return {
        "dim": rho.dim,
        "re": rho.matrix.real.tolist(),
        "im": rho.matrix.imag.tolist(),
    }


def density_from_json(obj: dict) -> DensityOperator:
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    m = re + 1j * im
    if "dim" in obj and int(obj["dim"]) != m.shape[0]:
        raise DimensionError(f"declared dim {obj['dim']} does not match matrix {m.shape}")
    return DensityOperator(m)
