"""Gaussian-state models of a jammed bosonic channel and its capacity bounds."""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    bound_report,
    capacity_lb_cr,
    capacity_lb_direct,
    capacity_lb_q,
    delta_certified,
    delta_lower_bound,
    epsilon,
    nu,
    symmetrization_error_bound,
    worst_case_jammer,
)
from .channel import (
    JammerStrategy,
    PowerBudget,
    SenderSymbol,
    bpsk_homodyne_density,
    channel_output,
    self_jamming_attack,
    symmetrized_homodyne_density,
)
from .errors import DegenerateCovariance, InfeasibleAttack, InfeasibleJammer, InvalidParameter
from .gaussian import (
    BivariateGaussian,
    GaussianState,
    UnivariateGaussian,
    apply_beam_splitter,
    homodyne_x_joint,
    make_classically_correlated_thermal,
    make_coherent,
    make_displaced_thermal,
    make_tmsv,
    partial_trace,
    sample_homodyne,
)
from .protocol import (
    BinaryChannel,
    QuadrantDistribution,
    SimplexDecomposition,
    decompose_on_triangle,
    effective_channel,
    lambda_c_worst_case,
    quadrant_distribution,
    scramble_uncorrelated,
    symmetrize_with_cr,
)
from .simulation import (
    SimulationConfig,
    SimulationReport,
    run_attack_sim,
    run_bpsk_sim,
    run_classical_correlation_sim,
    run_tmsv_protocol_sim,
)
from .special import binary_entropy, erf, phi, phi2, verify_lemma_l1_det, verify_lemma_plackett
