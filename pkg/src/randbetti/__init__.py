"""Pure Betti diagrams, random Boij-Soderberg tables and their asymptotics."""

__version__ = "0.1.0"

from .errors import (
    BettiError,
    CapacityError,
    ConeError,
    HypothesisViolation,
    ModeError,
    NotFiniteLengthError,
    NotInConeError,
    NotInSpanError,
    OutOfRegimeError,
    ParameterError,
)
from .core_tables import (
    BettiTable,
    DegreeSequence,
    IndexSet,
    PureDiagram,
    degree_sequence_of,
    herzog_kuhl_check,
    hilbert_function,
    multiplicity,
    pure_diagram,
    sigma_b,
)
from .sampling import (
    CoefficientVector,
    DeviationEstimate,
    analytic_ratio_std,
    estimate_deviation_probability,
    expected_entry,
    expected_table,
    mu,
    normalized_entry,
    sample_uniform,
    table_of,
)
from .asymptotics import (
    ExperimentReport,
    GaussianSequenceSpec,
    SampledSource,
    binomial_gaussian_ratio,
    gaussian_experiment,
    p_of,
    stirling_normalizer,
)
from .curves import (
    CurveEmbedding,
    curve_k_p1,
    curve_k_p1_upper_bound,
    curve_normalized,
    koszul_oracle_p1,
)
from .weighted import (
    WeightFunction,
    H_integral,
    weighted_expected_k_p1,
    weighted_gaussian_experiment,
    weighted_sample,
)
from .decomposition import Decomposition, decompose, generic_module_table
