"""Multipartite entanglement tracking for pure-state collision runs.

The brute-force route evolves the full (N+1)-qubit statevector (system =
qubit 0, reservoir qubits 1..N in collision order) and extracts pairwise
tangles from two-qubit reductions via the Wootters concurrence, plus
one-vs-rest tangles ``4 det(rho_j)``.  Closed-form predictors for both
collision models are provided and must agree with the brute-force values;
monogamy residuals ``delta_j = tau_j - sum_k tau_jk`` are reported per qubit.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CapacityError, DimensionError, DomainError, NormalizationError
from .linalg import SIGMA_Y, tensor
from .states import DensityOperator, PureStateVector

DEFAULT_MAX_QUBITS = 20

_WOOTTERS_CLAMP = 1e-12
_YY = tensor(SIGMA_Y, SIGMA_Y)


def max_qubits() -> int:
    """Register-size cap; override with COLLIDEKIT_MAX_QUBITS."""
    raw = os.environ.get("COLLIDEKIT_MAX_QUBITS", "")
    return int(raw) if raw.strip() else DEFAULT_MAX_QUBITS


@dataclass(frozen=True)
class TangleReport:
    """Pairwise and one-vs-rest tangles of a register plus monogamy residuals."""

    step: int
    tau_pair: dict
    tau_cut: list
    delta: list

    @property
    def n_qubits(self) -> int:
        return len(self.tau_cut)

    def csv_rows(self):
        header = ["step", "j", "k", "tau_jk", "tau_cut_j", "delta_j"]
        rows = []
        for (j, k), tau in sorted(self.tau_pair.items()):
            rows.append(
                [
                    str(self.step),
                    str(j),
                    str(k),
                    f"{tau:.17g}",
                    f"{self.tau_cut[j]:.17g}",
                    f"{self.delta[j]:.17g}",
                ]
            )
        return header, rows


def _concurrence_from_matrix(m: np.ndarray) -> float:
    # The root eigenvalues of rho (sy x sy) rho* (sy x sy) equal the singular
    # values of W^T (sy x sy) W for any factorization rho = W W^dag; the SVD
    # route avoids the sqrt amplification of ~eps eigenvalue noise.
    evals, vecs = np.linalg.eigh(0.5 * (m + m.conj().T))
    if evals.min() < -_WOOTTERS_CLAMP:
        raise DomainError(f"state eigenvalue {evals.min():.3e} below clamp window")
    w = vecs * np.sqrt(np.clip(evals, 0.0, None))
    roots = np.linalg.svd(w.T @ _YY @ w, compute_uv=False)
    return float(max(0.0, roots[0] - roots[1] - roots[2] - roots[3]))


def concurrence(rho: DensityOperator) -> float:
    """Wootters concurrence of a two-qubit state; tangle = concurrence**2."""
    if rho.dim != 4:
        raise DimensionError(f"concurrence requires a two-qubit state, got dim {rho.dim}")
    return _concurrence_from_matrix(rho.matrix)


def tangle_cut(psi: PureStateVector, j: int) -> float:
    """Tangle of qubit j against the rest: 4 det of its reduced state."""
    rho = kernels.reduced_density_1(psi.amplitudes, j)
    return float(4.0 * np.linalg.det(rho).real)


def ckw_report(psi: PureStateVector, step: int = 0) -> TangleReport:
    """Full tangle inventory of a register.

    Computes every pairwise tangle (squared concurrence of the two-qubit
    reduction), every cut tangle, and the monogamy residual per qubit.
    """
    n = psi.n_qubits
    if n > max_qubits():
        raise CapacityError(f"{n} qubits exceeds cap {max_qubits()}")
    amps = psi.amplitudes
    tau_cut = [tangle_cut(psi, j) for j in range(n)]
    tau_pair = {}
    for j in range(n):
        for k in range(j + 1, n):
            c = _concurrence_from_matrix(kernels.reduced_density_2(amps, j, k))
            tau_pair[(j, k)] = c * c
    delta = []
    for j in range(n):
        paired = sum(t for (a, b), t in tau_pair.items() if j in (a, b))
        delta.append(tau_cut[j] - paired)
    return TangleReport(step=step, tau_pair=tau_pair, tau_cut=tau_cut, delta=delta)


def _qubit_pair(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    if v.shape != (2,):
        raise DimensionError(f"expected single-qubit amplitudes, got shape {v.shape}")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > 1e-12:
        raise NormalizationError(f"qubit amplitudes have norm {norm}")
    return v / norm


def evolve_pure_collisions(psi_s, phi_res, u, n: int, n_reservoir: int) -> PureStateVector:
    """Collide the system qubit with reservoir qubits 1..n on a full register.

    The register holds the system plus ``n_reservoir`` reservoir qubits, all
    initially in ``phi_res``.  Norm is preserved by construction.
    """
    if not 0 <= n <= n_reservoir:
        raise DomainError(f"need 0 <= n <= n_reservoir, got n={n}, N={n_reservoir}")
    if n_reservoir + 1 > max_qubits():
        raise CapacityError(f"{n_reservoir + 1} qubits exceeds cap {max_qubits()}")
    psi_s = _qubit_pair(psi_s)
    phi_res = _qubit_pair(phi_res)
    state = psi_s
    for _ in range(n_reservoir):
        state = np.kron(state, phi_res)
    for l in range(1, n + 1):
        state = kernels.apply_two_qubit(state, u, 0, l)
    return PureStateVector(state)


def collision_state_sequence(psi_s, phi_res, u, n_steps: int, n_reservoir: int):
    """Yield ``(n, PureStateVector)`` for n = 0..n_steps, evolving incrementally."""
    if not 0 <= n_steps <= n_reservoir:
        raise DomainError(f"need 0 <= n_steps <= n_reservoir, got {n_steps}, {n_reservoir}")
    if n_reservoir + 1 > max_qubits():
        raise CapacityError(f"{n_reservoir + 1} qubits exceeds cap {max_qubits()}")
    state = _qubit_pair(psi_s)
    phi = _qubit_pair(phi_res)
    for _ in range(n_reservoir):
        state = np.kron(state, phi)
    yield 0, PureStateVector(state)
    for l in range(1, n_steps + 1):
        state = kernels.apply_two_qubit(state, np.asarray(u, dtype=complex), 0, l)
        yield l, PureStateVector(state)


def homogenization_pure_state(alpha, beta, eta: float, n: int, n_reservoir: int) -> PureStateVector:
    """Closed-form register state after n partial-swap collisions.

    With the system starting in ``alpha|0> + beta|1>`` and every reservoir
    qubit in |0>, the one-excitation amplitudes are ``beta c^n`` on the system
    and ``i beta s c^(l-1) e^(i eta (n-l))`` on reservoir qubit l <= n, while
    the all-zeros amplitude carries the accumulated phase ``alpha e^(i eta n)``.
    """
    if not 0 <= n <= n_reservoir:
        raise DomainError(f"need 0 <= n <= n_reservoir, got n={n}, N={n_reservoir}")
    c, s = math.cos(eta), math.sin(eta)
    nq = n_reservoir + 1
    amps = np.zeros(2**nq, dtype=complex)
    amps[0] = alpha * cmath.exp(1j * eta * n)
    amps[1 << (nq - 1)] = beta * c**n
    for l in range(1, n + 1):
        amps[1 << (nq - 1 - l)] = 1j * beta * s * c ** (l - 1) * cmath.exp(1j * eta * (n - l))
    return PureStateVector(amps)


def predict_homogenization_tangles(alpha, beta, eta: float, n: int, j: int, k: int):
    """Closed-form tangles for the partial-swap model.

    Returns ``(tau_jk, tau_0k, tau_j, tau_0)`` for reservoir indices
    ``j, k >= 1``; components referencing qubits that have not collided yet
    (index > n) are zero.
    """
    if j < 1 or k < 1 or j == k:
        raise DomainError(f"reservoir indices must be distinct and >= 1, got ({j}, {k})")
    if n < 0:
        raise DomainError(f"step count must be >= 0, got {n}")
    b2 = abs(beta) ** 2
    c2 = math.cos(eta) ** 2
    s2 = math.sin(eta) ** 2
    tau_jk = 4.0 * b2**2 * s2**2 * c2 ** (j + k - 2) if (j <= n and k <= n) else 0.0
    tau_0k = 4.0 * b2**2 * s2 * c2 ** (n + k - 1) if k <= n else 0.0
    weight_j = s2 * c2 ** (j - 1)
    tau_j = 4.0 * b2**2 * weight_j * (1.0 - weight_j) if j <= n else 0.0
    tau_0 = 4.0 * b2**2 * c2**n * (1.0 - c2**n)
    return tau_jk, tau_0k, tau_j, tau_0


def predict_decoherence_tangles(alpha, beta, overlap, n: int, k: int):
    """Closed-form tangles for the controlled-unitary model.

    ``overlap`` is the scalar product of the two post-collision environment
    states.  Returns ``(tau_jk, tau_0k, tau_k, tau_0)``; reservoir pairs are
    never entangled and qubit k carries no tangle before its collision.
    """
    if k < 1:
        raise DomainError(f"reservoir index must be >= 1, got {k}")
    if n < 0:
        raise DomainError(f"step count must be >= 0, got {n}")
    o2 = abs(overlap) ** 2
    if o2 > 1.0 + 1e-12:
        raise DomainError(f"|overlap| = {math.sqrt(o2)} exceeds 1")
    o2 = min(o2, 1.0)
    ab2 = 4.0 * abs(alpha) ** 2 * abs(beta) ** 2
    perp2 = 1.0 - o2
    tau_jk = 0.0
    tau_0k = ab2 * o2 ** (n - 1) * perp2 if n >= k else 0.0
    tau_k = ab2 * perp2 if n >= k else 0.0
    tau_0 = ab2 * (1.0 - o2**n)
    return tau_jk, tau_0k, tau_k, tau_0
