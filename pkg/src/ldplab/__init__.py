"""Local vs central differential privacy on the sign hypercube.

The package pairs concrete selection mechanisms (binary and coordinate-wise
randomized response, the exponential mechanism, Laplace means) with an exact
enumeration engine that certifies the information-theoretic limits of the
local model on finite channels, plus a deterministic sweep harness that
measures the sample-complexity separation empirically.
"""

from .central import (
    candidate_pairs,
    candidate_vectors,
    em_probabilities,
    em_success_probability_exact,
    exponential_mechanism,
    laplace_mean,
    standard_laplace,
    utilities,
)
from .channels import (
    Channel,
    PrivacyAudit,
    audit_epsilon,
    coordinate_sampling_rr,
    full_rr,
    push_forward,
    random_dp_channel,
    read_channel,
    rr_bit,
    write_channel,
)
from .hard_instances import (
    Dataset,
    HardInstance,
    MixtureIndex,
    enumerate_signs,
    index_to_signs,
    mixture_pmf,
    signs_to_index,
    uniform_pmf,
)
from .harness import (
    ExperimentConfig,
    NStarResult,
    SeparationReport,
    SweepRecord,
    find_n_star,
    run_point,
    run_sweep,
    separation_report,
    wilson_interval,
)
from .info_engine import (
    AverageCorrelationCheck,
    DivergenceReport,
    FanoBound,
    KLDivergence,
    SampleLowerBound,
    SupNormCheck,
    average_chi_square,
    centered_likelihood_ratio,
    chi_square,
    entropy_bits,
    fano_success_bound,
    kl,
    mutual_information_per_sample,
    sample_complexity_lower_bound,
    tensorized_mi_bound,
    verify_average_correlation,
    verify_ratio_sup_norm,
    wht,
    wht_inverse,
)
from .protocols import (
    L1_BALL,
    SIMPLEX,
    CoordinateSamplingProtocol,
    FeasiblePoint,
    IdentificationResult,
    aggregate_debiased_means,
    optimal_vertex,
    optimization_gap,
    run_identification,
    select_coordinate,
    vertex_to_pair,
)

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "PrivacyAudit",
    "Dataset",
    "HardInstance",
    "MixtureIndex",
    "ExperimentConfig",
    "NStarResult",
    "SeparationReport",
    "SweepRecord",
    "AverageCorrelationCheck",
    "DivergenceReport",
    "FanoBound",
    "KLDivergence",
    "SampleLowerBound",
    "SupNormCheck",
    "CoordinateSamplingProtocol",
    "FeasiblePoint",
    "IdentificationResult",
    "L1_BALL",
    "SIMPLEX",
    "aggregate_debiased_means",
    "audit_epsilon",
    "average_chi_square",
    "candidate_pairs",
    "candidate_vectors",
    "centered_likelihood_ratio",
    "chi_square",
    "coordinate_sampling_rr",
    "em_probabilities",
    "em_success_probability_exact",
    "entropy_bits",
    "enumerate_signs",
    "exponential_mechanism",
    "fano_success_bound",
    "find_n_star",
    "full_rr",
    "index_to_signs",
    "kl",
    "laplace_mean",
    "mixture_pmf",
    "mutual_information_per_sample",
    "optimal_vertex",
    "optimization_gap",
    "push_forward",
    "random_dp_channel",
    "read_channel",
    "rr_bit",
    "run_identification",
    "run_point",
    "run_sweep",
    "sample_complexity_lower_bound",
    "select_coordinate",
    "separation_report",
    "signs_to_index",
    "standard_laplace",
    "tensorized_mi_bound",
    "uniform_pmf",
    "utilities",
    "verify_average_correlation",
    "verify_ratio_sup_norm",
    "vertex_to_pair",
    "wht",
    "wht_inverse",
    "wilson_interval",
    "write_channel",
]
