"""Feature preparation: histograms, interweaving, triplet construction.

Run with: python demos/03_data_and_triplets.py
"""
import tempfile
from pathlib import Path

import numpy as np

from qsimnet import (
    color_histogram,
    histogram_distance,
    interweave,
    load_dataset,
    make_triplets_unlabeled,
    pad_pow2,
    prepare_pair_input,
    split_dataset,
    woven_spec,
)
from qsimnet.data import generate_color_blobs

# Interweaving alternates two feature vectors so that paired features land
# on neighbouring amplitudes; padding rounds up to the circuit dimension.
a, b = np.array([1.0, 2.0, 3.0]), np.array([40.0, 50.0, 60.0])
print("interweave:", interweave(a, b))
print("pad_pow2 of length 6:", pad_pow2(interweave(a, b)))
print("pair input for a 4-qubit circuit:", prepare_pair_input(a, b, woven_spec(4, 1)))

# Synthetic color blobs: noisy single-color images with a known similarity
# structure given by their 24-bin color histograms.
tmp = Path(tempfile.mkdtemp())
manifest = generate_color_blobs(30, seed=7, out_dir=tmp)
samples, info = load_dataset(manifest)
print(f"\ngenerated {len(samples)} blobs of {info['feature_count']} features at {tmp}")

hist0 = color_histogram(samples[0].features)
print("histogram of blob 0 (red bins):", hist0[:8])
print("distance blob0 -> blob1:", histogram_distance(hist0, color_histogram(samples[1].features)))

# Unlabeled triplets draw three random samples; the histogram-closer one of
# the two companions becomes the positive.
triplets = make_triplets_unlabeled(samples, count=5, rng_seed=0)
for t in triplets:
    print(f"anchor {t.anchor:2d}  positive {t.positive:2d}  negative {t.negative:2d}")

split = split_dataset(samples, rng_seed=0)
print(f"\nsplit: {len(split.train)} train / {len(split.test)} test")
