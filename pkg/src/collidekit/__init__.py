"""collidekit: single-ancilla collision models for qubit open-system dynamics.

Simulates homogenization (partial-swap) and decoherence (controlled-unitary)
collision trajectories, tracks the multipartite entanglement they create, and
analyzes the induced channels: Choi positivity, determinants, generator
extraction and Lindblad validity, plus master-equation integration.
"""

from .channels import (
    CPVerdict,
    DivisibilityReport,
    PauliTransferMatrix,
    apply,
    channel_from_collision,
    choi,
    compose,
    determinant,
    divisibility_report,
    identity_ptm,
    is_completely_positive,
    ptm_from_kraus,
    transpose_ptm,
    universal_not_ptm,
)
from .collisions import (
    ControlledUnitary,
    PartialSwapParams,
    Trajectory,
    TrajectoryStep,
    collide,
    controlled_unitary,
    homogenization_bounds,
    pairwise_reservoir_collide,
    partial_swap_step,
    partial_swap_unitary,
    run_decoherence,
    run_homogenization,
    simultaneous_decoherence_bases,
    swap_operator,
)
from .entanglement import (
    TangleReport,
    ckw_report,
    concurrence,
    evolve_pure_collisions,
    predict_decoherence_tangles,
    predict_homogenization_tangles,
    tangle_cut,
)
from .errors import (
    BoundUndefinedError,
    BranchCutError,
    CapacityError,
    CollideKitError,
    DimensionError,
    DomainError,
    NormalizationError,
    PositivityError,
    ShapeError,
    SingularChannelError,
    UnitarityError,
)
from .lindblad import (
    Generator,
    HomogenizationSemigroupParams,
    LindbladDecomposition,
    LindbladVerdict,
    decoherence_params_from_collision,
    decoherence_ptm,
    exp_generator,
    generator_from_log,
    homogenization_ptm,
    homogenization_ptm_power,
    homogenization_semigroup_map,
    integrate_master,
    is_lindblad,
    lindblad_compose,
    lindblad_decompose,
    master_rhs,
)
from .linalg import hermitian_eig, matrix_exp, matrix_log_principal, partial_trace, tensor
from .states import (
    DensityOperator,
    PureStateVector,
    bloch_from_density,
    density_from_bloch,
    hs_distance,
    validate_state,
)

__version__ = "0.1.0"
