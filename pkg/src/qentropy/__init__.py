"""qentropy: entropy-preservation analysis for positive maps and quantum channels."""

from .channels import (
    ChoiMatrix,
    KrausChannel,
    KrausFamily,
    apply,
    channel_from_json,
    channel_to_json,
    choi,
    choi_rank,
    complementary,
    compose,
    family_example1,
    family_from_channel,
    family_from_json,
    make_block_pair,
    make_completely_depolarizing,
    make_example1,
    make_identity,
    make_pinching,
    mix,
    random_channel,
    tensor_channels,
)
from .entropy import binary, eta, relative_entropy, shannon_ext, von_neumann
from .harness import SuiteConfig, SuiteReport, appendix_construction_check, run_suite
from .linalg import (
    SpectralDecomposition,
    jordan_parts,
    matrix_from_json,
    matrix_to_json,
    partial_trace,
    projector,
    purify,
    random_density,
    random_pure,
    spectral_decompose,
    tensor,
    trace_norm,
)
from .pce import (
    AFWDecomposition,
    ClassReport,
    CriterionReport,
    SupPureResult,
    afw_decompose,
    classify,
    continuity_bound,
    criterion_a_sup,
    criterion_a_value,
    criterion_b_report,
    criterion_c_report,
    output_entropy,
    sup_pure_output_entropy,
    sup_pure_output_entropy_family,
    sup_pure_trend,
)
from .roof import (
    Ensemble,
    RoofResult,
    delta_k,
    ensemble_from_isometry,
    ensemblewise_monotonicity_gap,
    eof,
    k_approximator,
    sigma_co_output_entropy,
    spectral_ensemble,
)

__version__ = "0.1.0"
