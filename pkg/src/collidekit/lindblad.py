"""Continuous interpolation of repeated-collision dynamics.

The discrete channel powers E, E^2, ... are interpolated by closed-form
one-parameter families E_t; generators G = log E are extracted through the
principal matrix logarithm and split into Hamiltonian and dissipative
coefficients (h, C) over the orthonormal operator basis sigma_j / sqrt(2).
Validity of a generator is the positivity of C, cross-checked by Choi
positivity of exp(G t).

Conventions: hbar = 1, collision period tau = 1 by default, and the forward
map (h, C) -> G is defined by direct trace evaluation of the operator-sum
form; the inverse is the numerical inverse of that 12-dimensional linear map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import PauliTransferMatrix
from .collisions import ControlledUnitary
from .errors import (
    BranchCutError,
    DimensionError,
    DomainError,
    ShapeError,
    SingularChannelError,
)
from .linalg import PAULIS, matrix_exp, matrix_log_principal
from .states import DensityOperator

#: Orthonormal traceless operator basis, tr(L_j L_k) = delta_jk.
_LAMBDA = PAULIS[1:] / math.sqrt(2.0)

_FIRST_ROW_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Generator:
    """Generator of a trace-preserving qubit semigroup, first row zero."""

    g: np.ndarray

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        if g.shape != (4, 4):
            raise ShapeError(f"generator must be 4x4, got {g.shape}")
        if np.abs(g[0]).max() > _FIRST_ROW_TOL:
            raise ShapeError(f"generator first row {g[0]} is not zero")
        g[0] = 0.0
        g.setflags(write=False)
        object.__setattr__(self, "g", g)


@dataclass(frozen=True, eq=False)
class LindbladDecomposition:
    """Hamiltonian coefficients h (H = sum h_j sigma_j) and coefficient matrix C
    over the sigma_j/sqrt(2) basis; the generator is valid iff C >= 0."""

    h: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h)
        if h.shape != (3,):
            raise ShapeError(f"h must have 3 components, got {h.shape}")
        if np.iscomplexobj(h) and np.abs(h.imag).max() > 1e-12:
            raise ShapeError("Hamiltonian coefficients must be real")
        h = np.array(h.real if np.iscomplexobj(h) else h, dtype=float)
        c = np.array(self.c, dtype=complex)
        if c.shape != (3, 3):
            raise ShapeError(f"C must be 3x3, got {c.shape}")
        if np.abs(c - c.conj().T).max() > 1e-10:
            raise ShapeError("C must be Hermitian")
        c = 0.5 * (c + c.conj().T)
        h.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class LindbladVerdict:
    valid: bool
    min_eig_c: float


@dataclass(frozen=True)
class HomogenizationSemigroupParams:
    """Rates of the continuous family interpolating partial-swap collisions.

    Derived from the swap angle eta, the reservoir polarization w along its
    own eigenaxis, and the collision period tau:

        theta  = arctan(w tan(eta))        rotation per collision
        q      = sqrt(c^2 + w^2 s^2)
        omega  = theta / tau
        gamma1 = -(2/tau) ln c             longitudinal relaxation
        gamma2 = -(1/tau) ln(c q)          transverse relaxation

    Requires cos(eta) > 0 so the interpolation through real powers exists.
    """

    eta: float
    w: float
    tau: float = 1.0
    c: float = field(init=False)
    s: float = field(init=False)

    def __post_init__(self):
        if abs(self.w) > 1.0 + 1e-12:
            raise DomainError(f"|w| = {abs(self.w)} exceeds 1")
        if self.tau <= 0.0:
            raise DomainError(f"tau must be positive, got {self.tau}")
        c, s = math.cos(self.eta), math.sin(self.eta)
        if c <= 1e-12:
            raise DomainError(f"interpolation requires cos(eta) > 0, got {c}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "s", s)

    @property
    def theta(self) -> float:
        return math.atan2(self.w * self.s, self.c)

    @property
    def q(self) -> float:
        return math.hypot(self.c, self.w * self.s)

    @property
    def omega(self) -> float:
        return self.theta / self.tau

    @property
    def gamma1(self) -> float:
        return -2.0 * math.log(self.c) / self.tau

    @property
    def gamma2(self) -> float:
        return -math.log(self.c * self.q) / self.tau


def _rot(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, s], [-s, c]])


def homogenization_ptm(eta: float, w: float) -> PauliTransferMatrix:
    """Single partial-swap collision channel, reservoir polarized along z."""
    if abs(w) > 1.0 + 1e-12:
        raise DomainError(f"|w| = {abs(w)} exceeds 1")
    c, s = math.cos(eta), math.sin(eta)
    m = np.zeros((4, 4))
    m[0, 0] = 1.0
    m[1:3, 1:3] = c * c * np.eye(2) + c * s * w * np.array([[0.0, 1.0], [-1.0, 0.0]])
    m[3, 3] = c * c
    m[3, 0] = s * s * w
    return PauliTransferMatrix(m)


def homogenization_ptm_power(eta: float, w: float, n: int) -> PauliTransferMatrix:
    """n-collision channel in closed form: rotation-scaling block (cq)^n rot(n theta),
    z-contraction c^(2n), translation w (1 - c^(2n))."""
    if n < 0:
        raise DomainError(f"power must be >= 0, got {n}")
    if abs(w) > 1.0 + 1e-12:
        raise DomainError(f"|w| = {abs(w)} exceeds 1")
    c, s = math.cos(eta), math.sin(eta)
    theta = math.atan2(w * s, c)
    cq = c * math.hypot(c, w * s)
    c2n = (c * c) ** n
    m = np.zeros((4, 4))
    m[0, 0] = 1.0
    m[1:3, 1:3] = cq**n * _rot(n * theta)
    m[3, 3] = c2n
    m[3, 0] = w * (1.0 - c2n)
    return PauliTransferMatrix(m)


def homogenization_semigroup_map(params: HomogenizationSemigroupParams, t: float) -> PauliTransferMatrix:
    """Continuous-time map E_t; E_(n tau) reproduces the n-collision channel."""
    if t < 0.0:
        raise DomainError(f"time must be >= 0, got {t}")
    e1 = math.exp(-params.gamma1 * t)
    e2 = math.exp(-params.gamma2 * t)
    m = np.zeros((4, 4))
    m[0, 0] = 1.0
    m[1:3, 1:3] = e2 * _rot(params.omega * t)
    m[3, 3] = e1
    m[3, 0] = params.w * (1.0 - e1)
    return PauliTransferMatrix(m)


def decoherence_ptm(lambda_: float, phi: float) -> PauliTransferMatrix:
    """Phase-damping collision channel: off-diagonals scale by lambda and
    rotate by phi per collision; populations are untouched."""
    if not -1e-12 <= lambda_ <= 1.0 + 1e-12:
        raise DomainError(f"lambda must lie in [0, 1], got {lambda_}")
    lam = min(max(lambda_, 0.0), 1.0)
    m = np.zeros((4, 4))
    m[0, 0] = 1.0
    m[3, 3] = 1.0
    m[1:3, 1:3] = lam * _rot(phi)
    return PauliTransferMatrix(m)


def decoherence_params_from_collision(cu: ControlledUnitary, xi: DensityOperator) -> tuple[float, float]:
    """Damping modulus and phase of a qubit controlled collision.

    ``lambda e^(i phi) = tr(V_1^dag V_0 xi)``; phi is reported in (-pi, pi]
    and set to 0 for a fully damping collision (lambda = 0).  The pair refers
    to the control-basis frame, matching :func:`decoherence_ptm`.
    """
    if cu.system_dim != 2 or cu.target_dim != 2:
        raise DimensionError("decoherence parameters are defined for qubit collisions")
    if xi.dim != 2:
        raise DimensionError(f"reservoir state must be a qubit, got dim {xi.dim}")
    z = np.trace(cu.targets[1].conj().T @ cu.targets[0] @ xi.matrix)
    lam = min(abs(z), 1.0)
    phi = math.atan2(z.imag, z.real) if lam > 1e-15 else 0.0
    return float(lam), float(phi)


def generator_from_log(ptm: PauliTransferMatrix) -> Generator:
    """Principal-branch generator G = log E of an invertible channel.

    Raises SingularChannelError when det(E) <= 0 and BranchCutError when an
    eigenvalue sits on the negative real axis (no real principal logarithm).
    """
    det = float(np.linalg.det(ptm.m))
    if det <= 0.0:
        raise SingularChannelError(f"determinant {det} <= 0: no principal-branch generator")
    evals = np.linalg.eigvals(ptm.m)
    scale = max(1.0, np.abs(evals).max())
    for lam in evals:
        if lam.real < 0.0 and abs(lam.imag) <= 1e-10 * scale:
            raise BranchCutError(f"eigenvalue {lam} lies on the branch cut")
    log = matrix_log_principal(ptm.m)
    if np.abs(log.imag).max() > 1e-9:
        raise BranchCutError("principal logarithm is not a real generator")
    return Generator(log.real)


def exp_generator(gen: Generator, t: float) -> PauliTransferMatrix:
    """Map exp(G t) generated by G."""
    return PauliTransferMatrix(matrix_exp(gen.g * t).real)


def _generator_action(h, c, x: np.ndarray) -> np.ndarray:
    """Operator-sum action: -i[H, x] + (1/2) sum c_jk ([L_j x, L_k] + [L_j, x L_k])."""
    ham = np.einsum("j,jab->ab", np.asarray(h, dtype=float), PAULIS[1:])
    c = np.asarray(c, dtype=complex)
    out = -1j * (ham @ x - x @ ham)
    out = out + np.einsum("jk,jab,bc,kcd->ad", c, _LAMBDA, x, _LAMBDA)
    k_op = np.einsum("jk,kab,jbc->ac", c, _LAMBDA, _LAMBDA)
    return out - 0.5 * (k_op @ x + x @ k_op)


def lindblad_compose(h, c) -> Generator:
    """Generator matrix of the operator-sum form, g_ab = tr(sigma_a G[sigma_b]) / 2."""
    decomp = LindbladDecomposition(np.asarray(h), np.asarray(c, dtype=complex))
    g = np.zeros((4, 4))
    for b in range(4):
        image = _generator_action(decomp.h, decomp.c, PAULIS[b])
        for a in range(1, 4):
            entry = 0.5 * np.trace(PAULIS[a] @ image)
            if abs(entry.imag) > 1e-11:
                raise ShapeError(f"generator entry ({a},{b}) is not real: {entry}")
            g[a, b] = entry.real
    return Generator(g)


def _params_to_decomp(p: np.ndarray) -> LindbladDecomposition:
    h = p[:3]
    c = np.array(
        [
            [p[3], p[6] + 1j * p[7], p[8] + 1j * p[9]],
            [p[6] - 1j * p[7], p[4], p[10] + 1j * p[11]],
            [p[8] - 1j * p[9], p[10] - 1j * p[11], p[5]],
        ]
    )
    return LindbladDecomposition(h, c)


def _compose_matrix() -> np.ndarray:
    m = np.empty((12, 12))
    for i in range(12):
        p = np.zeros(12)
        p[i] = 1.0
        d = _params_to_decomp(p)
        m[:, i] = lindblad_compose(d.h, d.c).g[1:].ravel()
    return m


_COMPOSE_MATRIX: np.ndarray | None = None


def lindblad_decompose(gen: Generator) -> LindbladDecomposition:
    """Exact linear inverse of :func:`lindblad_compose`."""
    global _COMPOSE_MATRIX
    if _COMPOSE_MATRIX is None:
        _COMPOSE_MATRIX = _compose_matrix()
    p = np.linalg.solve(_COMPOSE_MATRIX, gen.g[1:].ravel())
    return _params_to_decomp(p)


def is_lindblad(gen: Generator, tol: float = 1e-10) -> LindbladVerdict:
    """Generator validity: the coefficient matrix C must be positive."""
    decomp = lindblad_decompose(gen)
    lo = float(np.linalg.eigvalsh(decomp.c).min())
    return LindbladVerdict(valid=bool(lo >= -tol), min_eig_c=lo)


def master_rhs(decomp: LindbladDecomposition, rho: DensityOperator) -> np.ndarray:
    """Right-hand side of the master equation at a state; traceless Hermitian."""
    if rho.dim != 2:
        raise DimensionError(f"master equation is a qubit equation, got dim {rho.dim}")
    return _generator_action(decomp.h, decomp.c, rho.matrix)


def integrate_master(
    decomp: LindbladDecomposition, rho0: DensityOperator, t_end: float, dt: float
) -> DensityOperator:
    """Classical fourth-order Runge-Kutta integration of the master equation.

    The dissipator tensor is precomputed once, so each step costs a handful of
    2x2 products.  Trace is conserved exactly by the equation; positivity of
    the result is enforced by the DensityOperator clamp window, so ``dt`` must
    resolve the dynamics (the default regime dt ~ 1e-3 is far inside O(dt^4)
    accuracy for collision-scale rates).
    """
    if dt <= 0.0:
        raise DomainError(f"dt must be positive, got {dt}")
    if t_end < 0.0:
        raise DomainError(f"t_end must be >= 0, got {t_end}")
    if rho0.dim != 2:
        raise DimensionError(f"master equation is a qubit equation, got dim {rho0.dim}")

    ham = np.einsum("j,jab->ab", decomp.h, PAULIS[1:])
    diss = np.einsum("jk,jab,kcd->abcd", decomp.c, _LAMBDA, _LAMBDA)
    k_op = np.einsum("jk,kab,jbc->ac", decomp.c, _LAMBDA, _LAMBDA)

    def rhs(x):
        out = -1j * (ham @ x - x @ ham)
        out = out + np.einsum("abcd,bc->ad", diss, x)
        return out - 0.5 * (k_op @ x + x @ k_op)

    def rk4(x, step):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * step * k1)
        k3 = rhs(x + 0.5 * step * k2)
        k4 = rhs(x + step * k3)
        return x + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    x = np.array(rho0.matrix, dtype=complex)
    n_full = int(math.floor(t_end / dt + 1e-12))
    for _ in range(n_full):
        x = rk4(x, dt)
    remainder = t_end - n_full * dt
    if remainder > 1e-13:
        x = rk4(x, remainder)
    return DensityOperator(x)
