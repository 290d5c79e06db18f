"""Measurement-space maps of quantum states.

Given a set of generalized measurements, every pure state has an image whose
amplitudes are the square roots of the outcome probabilities, one orthonormal
axis per outcome. The package computes that map, compares entanglement on
both sides of it, audits the local protocol constructions behind it, checks
the concurrence factorization relations for qubit channels, and evaluates
the counting bounds for mode entanglement.
"""

from .entanglement import (
    EntanglementReport,
    binary_entropy,
    concurrence_mixed,
    concurrence_pure,
    entropy_of_entanglement,
    eof_from_concurrence,
    measurement_space_entanglement,
    operational_entanglement,
)
from .linalg import (
    DensityMatrix,
    PureState,
    ValidationError,
    bell_phi_plus,
    eig_hermitian,
    fourier_matrix,
    haar_state,
    haar_unitary,
    is_hermitian,
    is_psd,
    is_unitary,
    partial_trace,
    schmidt,
    tensor,
    tensor_all,
)
from .locc import (
    Channel,
    FourierStep,
    LoccTrace,
    build_dilation,
    conditional_blocks,
    depolarizing_channel,
    fourier_step,
    identity_channel,
    konrad_single_sided_check,
    konrad_two_sided_check,
    random_channel,
    run_locc_construction,
)
from .measurement import (
    LocalMeasurementSet,
    MeasurementSet,
    MeasurementSpaceState,
    map_to_measurement_space,
    noisy_pair,
    outcome_probabilities,
    random_local_set,
    random_measurement_set,
    validate_completeness,
    z_projectors,
)
from .modes import (
    ModeSystem,
    composition_count,
    divisor_infimum,
    is_prime,
    useful_entanglement_bound,
)
from .protocols import (
    OutcomeTable,
    ProtocolSpec,
    outcome_table,
    random_protocol,
    success_probability_mspace,
    success_probability_original,
)

__version__ = "0.1.0"
