"""Membership inference attacks on released marginals of Bayesian-network populations."""

from .attacks import (
    AttackScore,
    ClipRange,
    bayes_score,
    choose_side,
    decide,
    inner_product_score,
    lrt_clipped_score,
    lrt_score,
)
from .harness import ExperimentConfig, RocResult, roc_and_auc, run_experiment, run_trial
from .inference import (
    ImpossibleEvidenceError,
    PosteriorEngine,
    PosteriorResult,
    brute_force_posterior,
    closed_form_product_ratio,
    posterior_ratio,
    sum_count_prob,
)
from .learning import ProxyDataset, chow_liu_fit, empirical_marginals, mle_fit
from .model import (
    BayesianNetwork,
    Dataset,
    EncodedVector,
    NodeSpec,
    Record,
    ReleasedCounts,
    SupportDistribution,
    attribute_marginals,
    dataset_counts,
    decode,
    encode,
    joint_prob,
    output_marginal_law,
    sample,
    validate,
)
from .populations import (
    load_benchmark,
    make_cancer,
    make_half_repeated,
    make_lr_repeated,
    make_lr_side,
    make_product,
)

__all__ = [
    "AttackScore",
    "BayesianNetwork",
    "ClipRange",
    "Dataset",
    "EncodedVector",
    "ExperimentConfig",
    "ImpossibleEvidenceError",
    "NodeSpec",
    "PosteriorEngine",
    "PosteriorResult",
    "ProxyDataset",
    "Record",
    "ReleasedCounts",
    "RocResult",
    "SupportDistribution",
    "attribute_marginals",
    "bayes_score",
    "brute_force_posterior",
    "choose_side",
    "chow_liu_fit",
    "closed_form_product_ratio",
    "dataset_counts",
    "decide",
    "decode",
    "empirical_marginals",
    "encode",
    "inner_product_score",
    "joint_prob",
    "load_benchmark",
    "lrt_clipped_score",
    "lrt_score",
    "make_cancer",
    "make_half_repeated",
    "make_lr_repeated",
    "make_lr_side",
    "make_product",
    "mle_fit",
    "output_marginal_law",
    "posterior_ratio",
    "roc_and_auc",
    "run_experiment",
    "run_trial",
    "sample",
    "sum_count_prob",
    "validate",
]
