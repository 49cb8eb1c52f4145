"""Classification via embeddings: train on labeled triplets, cluster with a GMM.

Run with: python demos/05_classify_with_gmm.py
"""
import tempfile
from pathlib import Path

import numpy as np

from qsimnet import (
    TrainConfig,
    cluster_accuracy,
    embed_samples,
    gmm_fit,
    gmm_predict,
    load_dataset,
    split_dataset,
    train,
    woven_spec,
)
from qsimnet.data import generate_two_class_gauss

tmp = Path(tempfile.mkdtemp())
manifest = generate_two_class_gauss(100, seed=3, out_dir=tmp)
samples, _ = load_dataset(manifest)
by_id = {s.id: s for s in samples}
split = split_dataset(samples, rng_seed=0)

# 8 features interweave into 16 amplitudes: a 4-qubit circuit.
spec = woven_spec(4, 4)
config = TrainConfig(mode="woven", epochs=60, n_triplets=30, batch_size=30, rng_seed=0)
model = train([by_id[i] for i in split.train], spec, config)
print(f"loss: {model.loss_history[0]:+.3f} -> {model.loss_history[-1]:+.3f}")

# Each test sample is interwoven with itself, giving a 4-coordinate
# embedding without needing labels at embedding time.
test_samples = [by_id[i] for i in split.test]
points = embed_samples(model, test_samples)
labels = np.array([s.label for s in test_samples])

gmm = gmm_fit(points, k=2, rng_seed=0)
assignments = gmm_predict(gmm, points)
print(f"GMM log-likelihood trace length: {len(gmm.log_likelihood_trace)}")
print(f"clustering accuracy (best label permutation): {cluster_accuracy(assignments, labels):.3f}")
