"""Effect of the consistency weight on projection variance.

Trains the interwoven-pair network twice with identical seeds, once with
the consistency term (beta = 1) and once without (beta = 0), then measures
how far the anchor's projection moves when the two inputs of a pair swap
interleave slots.

Run with: python demos/06_projection_variance.py
"""
import tempfile
from pathlib import Path

import numpy as np

from qsimnet import (
    LossWeights,
    TrainConfig,
    load_dataset,
    projection_variance_cdf,
    train,
    woven_spec,
)
from qsimnet.data import generate_color_blobs

tmp = Path(tempfile.mkdtemp())
manifest = generate_color_blobs(40, seed=9, out_dir=tmp, size=4)
samples, _ = load_dataset(manifest)

spec = woven_spec(7, 2)
base = dict(mode="woven", epochs=40, n_triplets=20, batch_size=20, rng_seed=0)
with_consistency = train(samples, spec, TrainConfig(weights=LossWeights(1.0, 1.0), **base))
without = train(samples, spec, TrainConfig(weights=LossWeights(1.0, 0.0), **base))

rng = np.random.default_rng(1)
pairs = []
for _ in range(80):
    i, j = rng.choice(len(samples), size=2, replace=False)
    pairs.append((samples[i], samples[j]))

values_on, mean_on = projection_variance_cdf(with_consistency, pairs)
values_off, mean_off = projection_variance_cdf(without, pairs)

print(f"mean projection variance with consistency:    {mean_on:.4f}")
print(f"mean projection variance without consistency: {mean_off:.4f}")
print(f"decrease: {(1 - mean_on / mean_off) * 100:.1f}%")
print("CDF deciles (with / without):")
for q in range(10, 100, 20):
    print(f"  p{q}: {np.percentile(values_on, q):.4f} / {np.percentile(values_off, q):.4f}")
