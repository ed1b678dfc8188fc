"""Collision unitaries and trajectory engines.

Two interaction families are implemented:

* partial swaps ``U = cos(eta) I + i sin(eta) S`` driving homogenization,
  where the system state converges to the reservoir state while each
  reservoir particle is disturbed by at most a fixed delta;
* controlled unitaries ``U = sum_j |b_j><b_j| (x) V_j`` driving decoherence
  in the control basis: diagonal entries are preserved and off-diagonal
  entries shrink by ``tr(V_j xi V_k^dag)`` per collision.

The reservoir is fresh-particle-per-step: every collision consumes a new
particle in the state ``xi``.  Pairwise intra-reservoir collisions are a
separate mode (:func:`pairwise_reservoir_collide`), never mixed implicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BoundUndefinedError,
    CapacityError,
    DimensionError,
    DomainError,
    UnitarityError,
)
from .linalg import partial_trace, tensor
from .states import DensityOperator, hs_distance

#: Hard cap on stored trajectory length.
MAX_TRAJECTORY_STEPS = 10**6

_UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class PartialSwapParams:
    """Interaction angle of a partial swap; ``c = cos(eta)``, ``s = sin(eta)``."""

    eta: float
    dim: int = 2
    c: float = field(init=False)
    s: float = field(init=False)

    def __post_init__(self):
        if self.dim < 2:
            raise DimensionError(f"particle dimension must be >= 2, got {self.dim}")
        object.__setattr__(self, "c", math.cos(self.eta))
        object.__setattr__(self, "s", math.sin(self.eta))

    def unitary(self) -> np.ndarray:
        return partial_swap_unitary(self.eta, self.dim)


@dataclass(frozen=True, eq=False)
class ControlledUnitary:
    """Collision ``sum_j |b_j><b_j| (x) V_j`` with the system as control.

    ``control_basis`` holds the orthonormal basis vectors as columns;
    it defaults to the computational basis.
    """

    targets: tuple
    control_basis: np.ndarray | None = None

    def __post_init__(self):
        targets = tuple(np.asarray(v, dtype=complex) for v in self.targets)
        if not targets:
            raise DimensionError("at least one target unitary is required")
        d_env = targets[0].shape[0]
        for v in targets:
            if v.shape != (d_env, d_env):
                raise DimensionError("target unitaries must share a square shape")
            if np.abs(v.conj().T @ v - np.eye(d_env)).max() > _UNITARITY_TOL:
                raise UnitarityError("target operator is not unitary")
        d_sys = len(targets)
        basis = self.control_basis
        basis = np.eye(d_sys, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
        if basis.shape != (d_sys, d_sys):
            raise DimensionError(f"control basis must be {d_sys}x{d_sys}, got {basis.shape}")
        if np.abs(basis.conj().T @ basis - np.eye(d_sys)).max() > _UNITARITY_TOL:
            raise UnitarityError("control basis is not orthonormal")
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "control_basis", basis)

    @property
    def system_dim(self) -> int:
        return len(self.targets)

    @property
    def target_dim(self) -> int:
        return self.targets[0].shape[0]


@dataclass(frozen=True)
class TrajectoryStep:
    n: int
    rho_s: DensityOperator
    xi_prime: DensityOperator
    d_sys: float
    d_res: float


@dataclass(frozen=True)
class Trajectory:
    """Per-collision record of system state, last reservoir particle and distances."""

    steps: tuple

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    @property
    def final(self) -> TrajectoryStep:
        return self.steps[-1]

    def csv_rows(self):
        """Rows for the trajectory CSV interface (floats at 17 significant digits)."""
        import json

        from .states import density_to_json

        header = ["step", "D_sys", "D_res", "rho_S", "xi_prime"]
        rows = []
        for s in self.steps:
            rows.append(
                [
                    str(s.n),
                    f"{s.d_sys:.17g}",
                    f"{s.d_res:.17g}",
                    json.dumps(density_to_json(s.rho_s)),
                    json.dumps(density_to_json(s.xi_prime)),
                ]
            )
        return header, rows


def swap_operator(d: int) -> np.ndarray:
    """Swap on a d x d bipartite space: S |j k> = |k j>."""
    s = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d):
        for k in range(d):
            s[k * d + j, j * d + k] = 1.0
    return s


def partial_swap_unitary(eta: float, d: int = 2) -> np.ndarray:
    """``cos(eta) I + i sin(eta) S`` on two d-dimensional particles."""
    if d < 2:
        raise DimensionError(f"particle dimension must be >= 2, got {d}")
    return math.cos(eta) * np.eye(d * d, dtype=complex) + 1j * math.sin(eta) * swap_operator(d)


def controlled_unitary(cu: ControlledUnitary) -> np.ndarray:
    """Dense matrix of the controlled collision."""
    b = cu.control_basis
    out = np.zeros((cu.system_dim * cu.target_dim,) * 2, dtype=complex)
    for j, v in enumerate(cu.targets):
        proj = np.outer(b[:, j], b[:, j].conj())
        out += tensor(proj, v)
    return out


def collide(rho: DensityOperator, xi: DensityOperator, u) -> tuple[DensityOperator, DensityOperator]:
    """One joint collision: conjugate ``rho (x) xi`` by ``u`` and split it again.

    Returns the post-collision system and particle states (the two partial
    traces).  This is the generic route; model-specific closed forms are
    checked against it.
    """
    u = np.asarray(u, dtype=complex)
    d_total = rho.dim * xi.dim
    if u.shape != (d_total, d_total):
        raise DimensionError(f"unitary shape {u.shape} does not match {d_total}x{d_total}")
    joint = u @ tensor(rho.matrix, xi.matrix) @ u.conj().T
    rho_out = partial_trace(joint, [rho.dim, xi.dim], {1})
    xi_out = partial_trace(joint, [rho.dim, xi.dim], {2})
    return DensityOperator(rho_out), DensityOperator(xi_out)


def partial_swap_step(
    rho: DensityOperator, xi: DensityOperator, p: PartialSwapParams
) -> tuple[DensityOperator, DensityOperator]:
    """Closed-form partial-swap collision.

    rho' = c^2 rho + s^2 xi + i c s [xi, rho]
    xi'  = s^2 rho + c^2 xi + i c s [rho, xi]
    """
    if rho.dim != xi.dim:
        raise DimensionError(f"dimension mismatch {rho.dim} != {xi.dim}")
    a, b = rho.matrix, xi.matrix
    comm = b @ a - a @ b
    c2, s2, cs = p.c**2, p.s**2, p.c * p.s
    rho_out = c2 * a + s2 * b + 1j * cs * comm
    xi_out = s2 * a + c2 * b - 1j * cs * comm
    return DensityOperator(rho_out), DensityOperator(xi_out)


def _check_run_args(n_steps: int, stride: int):
    if n_steps < 0:
        raise DomainError(f"n_steps must be >= 0, got {n_steps}")
    if n_steps > MAX_TRAJECTORY_STEPS:
        raise CapacityError(f"n_steps {n_steps} exceeds cap {MAX_TRAJECTORY_STEPS}")
    if stride < 1:
        raise DomainError(f"stride must be >= 1, got {stride}")


def run_homogenization(
    rho0: DensityOperator,
    xi: DensityOperator,
    eta: float,
    n_steps: int,
    stride: int = 1,
) -> Trajectory:
    """Iterate partial-swap collisions against fresh reservoir particles.

    Records step 0 (with ``xi_prime = xi``) and then every ``stride``-th
    collision plus the final one.  ``D_sys`` is the distance of the system
    to ``xi``, ``D_res`` the disturbance of the particle just used.
    """
    _check_run_args(n_steps, stride)
    p = PartialSwapParams(eta, dim=rho0.dim)
    if rho0.dim != xi.dim:
        raise DimensionError(f"dimension mismatch {rho0.dim} != {xi.dim}")
    steps = [TrajectoryStep(0, rho0, xi, hs_distance(rho0, xi), 0.0)]
    rho = rho0
    for n in range(1, n_steps + 1):
        rho, xi_prime = partial_swap_step(rho, xi, p)
        if n % stride == 0 or n == n_steps:
            steps.append(
                TrajectoryStep(n, rho, xi_prime, hs_distance(rho, xi), hs_distance(xi_prime, xi))
            )
    return Trajectory(tuple(steps))


def homogenization_bounds(eta: float) -> tuple[float, float]:
    """Reservoir-stability bound and matching step count for a swap angle.

    Returns ``(delta, n_delta)`` with ``delta = sqrt(2) (1 + sqrt(2)) |s c|``
    and ``n_delta = ln((1 + sqrt(2))|s c|) / ln|c|``, clamped at zero once
    delta already exceeds the state-space diameter sqrt(2).
    """
    c, s = math.cos(eta), math.sin(eta)
    if abs(c) < 1e-12 or abs(s) < 1e-12:
        raise BoundUndefinedError(f"bounds undefined at eta={eta} (cos or sin vanishes)")
    if abs(c) >= 1.0:
        raise BoundUndefinedError(f"no contraction at eta={eta}")
    root2 = math.sqrt(2.0)
    delta = root2 * (1.0 + root2) * abs(s * c)
    n_delta = max(0.0, math.log((1.0 + root2) * abs(s * c)) / math.log(abs(c)))
    return delta, n_delta


def decoherence_factors(cu: ControlledUnitary, xi: DensityOperator) -> np.ndarray:
    """Per-collision multipliers ``F[j, k] = tr(V_j xi V_k^dag)`` of the matrix
    elements in the control basis; the diagonal is exactly 1."""
    if xi.dim != cu.target_dim:
        raise DimensionError(f"reservoir dim {xi.dim} != target dim {cu.target_dim}")
    d = cu.system_dim
    f = np.empty((d, d), dtype=complex)
    for j in range(d):
        for k in range(d):
            f[j, k] = np.trace(cu.targets[j] @ xi.matrix @ cu.targets[k].conj().T)
    return f


def run_decoherence(
    rho0: DensityOperator,
    xi: DensityOperator,
    cu: ControlledUnitary,
    n_steps: int,
    stride: int = 1,
) -> Trajectory:
    """Iterate controlled-unitary collisions.

    The system evolves element-wise in the control basis; the used particle
    leaves in the state ``sum_j rho_jj V_j xi V_j^dag``, which is the same
    every step because the populations never change.
    """
    _check_run_args(n_steps, stride)
    if rho0.dim != cu.system_dim:
        raise DimensionError(f"system dim {rho0.dim} != control basis dim {cu.system_dim}")
    f = decoherence_factors(cu, xi)
    b = cu.control_basis
    comps = b.conj().T @ rho0.matrix @ b
    pops = comps.diagonal().real
    xi_prime_m = sum(
        p * (v @ xi.matrix @ v.conj().T) for p, v in zip(pops, cu.targets)
    )
    xi_prime = DensityOperator(xi_prime_m)
    d_res = hs_distance(xi_prime, xi)

    steps = [TrajectoryStep(0, rho0, xi, hs_distance(rho0, xi), 0.0)]
    for n in range(1, n_steps + 1):
        comps = f * comps
        if n % stride == 0 or n == n_steps:
            rho = DensityOperator(b @ comps @ b.conj().T)
            steps.append(TrajectoryStep(n, rho, xi_prime, hs_distance(rho, xi), d_res))
    return Trajectory(tuple(steps))


def pairwise_reservoir_collide(
    ensemble: list, j: int, k: int, p: PartialSwapParams
) -> list:
    """Partial-swap collision between two reservoir members; returns a new list.

    rho_j' = c^2 rho_j + s^2 rho_k + i c s [rho_j, rho_k]
    rho_k' = c^2 rho_k + s^2 rho_j - i c s [rho_j, rho_k]

    The sum rho_j + rho_k is conserved, so the ensemble's average state
    (mean Bloch vector, for qubits) is invariant.
    """
    if j == k:
        raise IndexError(f"pair indices must differ, got j = k = {j}")
    n = len(ensemble)
    if not (0 <= j < n and 0 <= k < n):
        raise IndexError(f"pair ({j}, {k}) out of range for ensemble of {n}")
    a, b = ensemble[j].matrix, ensemble[k].matrix
    comm = a @ b - b @ a
    c2, s2, cs = p.c**2, p.s**2, p.c * p.s
    out = list(ensemble)
    out[j] = DensityOperator(c2 * a + s2 * b + 1j * cs * comm)
    out[k] = DensityOperator(c2 * b + s2 * a - 1j * cs * comm)
    return out


def _commuting_observable(u: np.ndarray, side: int) -> np.ndarray | None:
    """Traceless Hermitian H with [u, H (x) I] = 0 (side 0) or [u, I (x) H] = 0
    (side 1); None if only multiples of the identity commute."""
    from .linalg import PAULIS

    eye = np.eye(2, dtype=complex)
    cols = []
    for basis_op in PAULIS:
        op = np.kron(basis_op, eye) if side == 0 else np.kron(eye, basis_op)
        commutator = (u @ op - op @ u).ravel()
        cols.append(np.concatenate([commutator.real, commutator.imag]))
    a = np.column_stack(cols)
    _, svals, vt = np.linalg.svd(a)
    null = [vt[i] for i in range(4) if (svals[i] if i < len(svals) else 0.0) <= 1e-10]
    best = None
    best_norm = 0.0
    for vec in null:
        traceless = vec.copy()
        traceless[0] = 0.0
        norm = np.linalg.norm(traceless)
        if norm > best_norm:
            best, best_norm = traceless, norm
    if best is None or best_norm < 1e-8:
        return None
    best = best / best_norm
    # fix the overall sign for deterministic output
    lead = next(x for x in best if abs(x) > 1e-12)
    if lead < 0:
        best = -best
    return sum(best[i] * PAULIS[i] for i in range(4))


def simultaneous_decoherence_bases(u) -> tuple[np.ndarray, np.ndarray] | None:
    """Product eigenbasis of a two-qubit collision, if one exists.

    Returns ``(system_basis, environment_basis)`` (columns are basis vectors)
    when ``u`` is diagonal in some product basis, i.e. when it decoheres both
    particles simultaneously; returns None otherwise (e.g. partial swaps).
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise DimensionError(f"expected a 4x4 unitary, got {u.shape}")
    if np.abs(u.conj().T @ u - np.eye(4)).max() > 1e-10:
        raise UnitarityError("input is not unitary")
    h_sys = _commuting_observable(u, side=0)
    h_env = _commuting_observable(u, side=1)
    if h_sys is None or h_env is None:
        return None
    _, b_sys = np.linalg.eigh(h_sys)
    _, b_env = np.linalg.eigh(h_env)
    w = np.kron(b_sys, b_env)
    d = w.conj().T @ u @ w
    if np.abs(d - np.diag(d.diagonal())).max() > 1e-8:
        return None
    return b_sys, b_env
