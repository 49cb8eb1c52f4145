"""Miniature end-to-end run: train on color blobs, rank against histograms.

Scaled down to finish in about a minute; the acceptance suite runs the
full-size version (200 images, 9 qubits, 150 epochs).

Run with: python demos/04_train_and_rank.py
"""
import tempfile
from pathlib import Path

import numpy as np

from qsimnet import (
    TrainConfig,
    load_dataset,
    rank_against_ground_truth,
    train,
    woven_spec,
)
from qsimnet.data import generate_color_blobs

tmp = Path(tempfile.mkdtemp())
# 4x4 images: 48 features, so an interwoven pair needs 96 amplitudes and a
# 7-qubit circuit holds them after padding.
manifest = generate_color_blobs(60, seed=5, out_dir=tmp, size=4)
samples, _ = load_dataset(manifest)

spec = woven_spec(7, 2)
config = TrainConfig(mode="woven", epochs=40, n_triplets=20, batch_size=20, rng_seed=0)

untrained = train(samples, spec, TrainConfig(mode="woven", epochs=0, rng_seed=0))
model = train(samples, spec, config)
print(f"loss: {model.loss_history[0]:+.3f} (epoch 0) -> {model.loss_history[-1]:+.3f} (epoch {config.epochs - 1})")


def median_rho(m, n_anchors=15, n_candidates=25):
    rng = np.random.default_rng(99)
    rhos = []
    for _ in range(n_anchors):
        anchor = samples[int(rng.integers(len(samples)))]
        others = [s for s in samples if s.id != anchor.id]
        chosen = [others[i] for i in rng.choice(len(others), size=n_candidates, replace=False)]
        rhos.append(rank_against_ground_truth(m, anchor, chosen).spearman_rho)
    return float(np.median(rhos))


print(f"median Spearman rho, untrained: {median_rho(untrained):+.3f}")
print(f"median Spearman rho, trained:   {median_rho(model):+.3f}")
