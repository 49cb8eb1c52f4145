"""Quantum similarity embedding networks on a classical statevector simulator.

Two network designs share one layered variational circuit: a baseline
triplet network that embeds anchor, positive and negative samples in three
separate runs, and an interwoven-pair network that entangles two inputs
per run and adds a consistency term to keep the anchor's projection stable
across runs.
"""

from .ansatz import (
    CircuitSpec,
    baseline_spec,
    execution_counter,
    init_parameters,
    measure_projection,
    parameter_count,
    run_circuit,
    woven_spec,
)
from .data import (
    DatasetSplit,
    Sample,
    Triplet,
    color_histogram,
    histogram_distance,
    interweave,
    load_dataset,
    make_triplets_labeled,
    make_triplets_unlabeled,
    pad_pow2,
    prepare_pair_input,
    prepare_single_input,
    split_dataset,
)
from .evaluation import (
    GmmModel,
    RankingResult,
    cluster_accuracy,
    embed_samples,
    gmm_fit,
    gmm_predict,
    model_distance,
    projection_variance_cdf,
    rank_against_ground_truth,
    spearman,
)
from .exceptions import (
    CapacityError,
    DegenerateInputError,
    ResourceError,
    ShapeError,
    ValidationError,
)
from .losses import LossWeights, consistency_loss, total_loss, triplet_loss_l1, triplet_loss_l2
from .statevector import (
    StateVector,
    apply_cx,
    apply_r3,
    expectation_z,
    init_zero,
    load_amplitudes,
)
from .training import (
    TrainConfig,
    TrainedModel,
    baseline_triplet_loss,
    forward_baseline,
    forward_woven,
    gradient,
    load_model,
    save_model,
    train,
    woven_triplet_loss,
)

__all__ = [
    "CircuitSpec",
    "CapacityError",
    "DatasetSplit",
    "DegenerateInputError",
    "GmmModel",
    "LossWeights",
    "RankingResult",
    "ResourceError",
    "Sample",
    "ShapeError",
    "StateVector",
    "TrainConfig",
    "TrainedModel",
    "Triplet",
    "ValidationError",
    "apply_cx",
    "apply_r3",
    "baseline_spec",
    "baseline_triplet_loss",
    "cluster_accuracy",
    "color_histogram",
    "consistency_loss",
    "embed_samples",
    "execution_counter",
    "expectation_z",
    "forward_baseline",
    "forward_woven",
    "gmm_fit",
    "gmm_predict",
    "gradient",
    "histogram_distance",
    "init_parameters",
    "init_zero",
    "interweave",
    "load_amplitudes",
    "load_dataset",
    "load_model",
    "make_triplets_labeled",
    "make_triplets_unlabeled",
    "measure_projection",
    "model_distance",
    "pad_pow2",
    "parameter_count",
    "prepare_pair_input",
    "prepare_single_input",
    "projection_variance_cdf",
    "rank_against_ground_truth",
    "run_circuit",
    "save_model",
    "spearman",
    "split_dataset",
    "total_loss",
    "train",
    "triplet_loss_l1",
    "triplet_loss_l2",
    "woven_spec",
    "woven_triplet_loss",
]
