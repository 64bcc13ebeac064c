"""Semantic information measures, capacity and rate-distortion solvers, and a semantic codec."""

__version__ = "0.1.0"

from .capacity import (
    CapacityResult,
    SolverConfig,
    blahut_arimoto_capacity,
    capacity_comparison_report,
    grid_oracle_capacity,
    semantic_capacity,
)
from .coding import GenerativeDecoder, arithmetic_decode, arithmetic_encode, generative_decode, semantic_encode
from .distortion import FeatureTable, class_mismatch_distortion, cosine_distortion, load_distortion
from .errors import DecodeError, InstanceTooLarge, ValidationError
from .prior import (
    SampleSet,
    SideInfoModel,
    conditional_entropy_given_prior,
    conditional_rd_curve,
    estimate_conditional_entropy,
    prior_gain,
)
from .probability import (
    Channel,
    Distribution,
    JointDistribution,
    binary_entropy,
    entropy,
    joint_entropy,
    joint_from,
    mutual_information,
)
from .ratedistortion import DistortionMatrix, LambdaSweep, RDCurve, brute_force_rd, rate_at_distortion, rd_curve, semantic_rd_curve
from .semantic import (
    JointSynonymousMapping,
    SynonymousMapping,
    Variant,
    pushforward,
    semantic_entropy,
    semantic_mutual_information,
)
from .simulation import run_channel_sim
