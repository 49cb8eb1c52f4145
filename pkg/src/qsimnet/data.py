"""Dataset ingestion, feature preparation and triplet construction.

Images are binary PPM (P6) with 8-bit samples; their features are the raw
pixel values flattened pixel-major, so RGB channels are interleaved with
stride 3. Tabular data is headerless CSV, one sample per row, with an
integer label in the final column when the dataset is labeled. A JSON
manifest ties a dataset together (file paths, labeled flag, feature count).
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import CapacityError, ShapeError, ValidationError

HISTOGRAM_BINS_PER_CHANNEL = 8
BIN_WIDTH = 256 // HISTOGRAM_BINS_PER_CHANNEL


@dataclass
class Sample:
    id: int
    features: np.ndarray
    label: int | None = None


@dataclass(frozen=True)
class Triplet:
    """Anchor, positive and negative sample ids."""

    anchor: int
    positive: int
    negative: int

    def __post_init__(self):
        if len({self.anchor, self.positive, self.negative}) != 3:
            raise ValidationError("triplet ids must be distinct")


@dataclass
class DatasetSplit:
    train: list
    test: list


def interweave(a, b) -> np.ndarray:
    """Alternate the entries of two equal-length vectors: a feeds even slots."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ShapeError(f"cannot interweave shapes {a.shape} and {b.shape}")
    out = np.empty(2 * len(a), dtype=np.float64)
    out[0::2] = a
    out[1::2] = b
    return out


def deinterweave(v) -> tuple:
    """Inverse of interweave: (even entries, odd entries)."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or len(v) % 2 != 0:
        raise ShapeError(f"cannot deinterweave shape {v.shape}")
    return v[0::2].copy(), v[1::2].copy()


def pad_pow2(v) -> np.ndarray:
    """Zero-pad on the right up to the nearest power of two."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or len(v) == 0:
        raise ShapeError("cannot pad an empty vector")
    target = 1 << (int(len(v)) - 1).bit_length()
    if target == len(v):
        return v.copy()
    out = np.zeros(target, dtype=np.float64)
    out[: len(v)] = v
    return out


def color_histogram(features) -> np.ndarray:
    """24-bin color histogram: 8 equal-width bins per RGB channel.

    Expects channel-interleaved pixel values in [0, 255]; value v lands in
    bin floor(v / 32), so 255 falls in the top bin. Counts are concatenated
    R, G, B and each channel's bins sum to the pixel count.
    """
    f = np.asarray(features, dtype=np.float64)
    if f.ndim != 1 or len(f) == 0 or len(f) % 3 != 0:
        raise ShapeError(f"RGB feature length must be a positive multiple of 3, got {f.shape}")
    if np.any(f < 0) or np.any(f > 255):
        raise ValidationError("pixel values must lie in [0, 255]")
    bins = np.minimum(f // BIN_WIDTH, HISTOGRAM_BINS_PER_CHANNEL - 1).astype(np.int64)
    hist = np.zeros(3 * HISTOGRAM_BINS_PER_CHANNEL, dtype=np.float64)
    for channel in range(3):
        counts = np.bincount(bins[channel::3], minlength=HISTOGRAM_BINS_PER_CHANNEL)
        hist[channel * HISTOGRAM_BINS_PER_CHANNEL : (channel + 1) * HISTOGRAM_BINS_PER_CHANNEL] = counts
    return hist


def histogram_distance(h1, h2) -> float:
    """L1 distance between two histograms."""
    h1 = np.asarray(h1, dtype=np.float64)
    h2 = np.asarray(h2, dtype=np.float64)
    if h1.shape != h2.shape:
        raise ShapeError(f"histogram shapes differ: {h1.shape} vs {h2.shape}")
    return float(np.sum(np.abs(h1 - h2)))


def make_triplets_unlabeled(dataset, count: int, rng_seed: int) -> list:
    """Random triplets with histogram-derived roles.

    For each triplet three distinct samples are drawn; the first is the
    anchor and of the remaining two the one closer to the anchor in
    histogram L1 distance becomes the positive. Exact distance ties break
    to the lower sample id.
    """
    if len(dataset) < 3:
        raise ValidationError("need at least 3 samples to build triplets")
    if count < 1:
        raise ValidationError("triplet count must be positive")
    rng = np.random.default_rng(rng_seed)
    hists = {s.id: color_histogram(s.features) for s in dataset}
    ids = [s.id for s in dataset]
    triplets = []
    for _ in range(count):
        a, b, c = (ids[i] for i in rng.choice(len(ids), size=3, replace=False))
        d_b = histogram_distance(hists[a], hists[b])
        d_c = histogram_distance(hists[a], hists[c])
        if d_b < d_c or (d_b == d_c and b < c):
            triplets.append(Triplet(a, b, c))
        else:
            triplets.append(Triplet(a, c, b))
    return triplets


def make_triplets_labeled(dataset, count: int, rng_seed: int) -> list:
    """Random triplets drawn by class: anchor and positive share a label."""
    by_label = {}
    for s in dataset:
        if s.label is None:
            raise ValidationError(f"sample {s.id} has no label")
        by_label.setdefault(s.label, []).append(s.id)
    labels = sorted(by_label)
    if len(labels) < 2 or any(len(by_label[l]) < 2 for l in labels):
        raise ValidationError("need >= 2 classes with >= 2 samples each")
    if count < 1:
        raise ValidationError("triplet count must be positive")
    rng = np.random.default_rng(rng_seed)
    triplets = []
    for _ in range(count):
        label = labels[rng.integers(len(labels))]
        same = by_label[label]
        a_i, p_i = rng.choice(len(same), size=2, replace=False)
        other_labels = [l for l in labels if l != label]
        neg_label = other_labels[rng.integers(len(other_labels))]
        negatives = by_label[neg_label]
        n_i = rng.integers(len(negatives))
        triplets.append(Triplet(same[a_i], same[p_i], negatives[n_i]))
    return triplets


def split_dataset(dataset, train_fraction: float = 0.8, rng_seed: int = 0) -> DatasetSplit:
    """Shuffle under the seed and reserve the first round(f*N) ids for training."""
    if len(dataset) < 2:
        raise ValidationError("need at least 2 samples to split")
    if not 0.0 < train_fraction < 1.0:
        raise ValidationError("train_fraction must be in (0, 1)")
    rng = np.random.default_rng(rng_seed)
    ids = [s.id for s in dataset]
    order = rng.permutation(len(ids))
    n_train = round(train_fraction * len(ids))
    shuffled = [ids[i] for i in order]
    return DatasetSplit(train=shuffled[:n_train], test=shuffled[n_train:])


def required_qubits(feature_count: int, paired: bool) -> int:
    """Smallest register that fits one sample (or an interwoven pair)."""
    length = 2 * feature_count if paired else feature_count
    return max(1, (int(length) - 1).bit_length())


def prepare_pair_input(a: np.ndarray, b: np.ndarray, spec) -> np.ndarray:
    """Interweave two feature vectors and zero-pad to the circuit dimension."""
    woven = interweave(a, b)
    if len(woven) > spec.dim:
        raise CapacityError(
            f"pair of {len(a)}-feature samples needs {required_qubits(len(a), paired=True)} "
            f"qubits, circuit has {spec.n_qubits}"
        )
    out = np.zeros(spec.dim, dtype=np.float64)
    out[: len(woven)] = woven
    return out


def prepare_single_input(features, spec) -> np.ndarray:
    """Zero-pad one feature vector to the circuit dimension (baseline path)."""
    f = np.asarray(features, dtype=np.float64)
    if f.ndim != 1 or len(f) == 0:
        raise ShapeError("features must be a non-empty vector")
    if len(f) > spec.dim:
        raise CapacityError(
            f"{len(f)}-feature sample needs {required_qubits(len(f), paired=False)} "
            f"qubits, circuit has {spec.n_qubits}"
        )
    out = np.zeros(spec.dim, dtype=np.float64)
    out[: len(f)] = f
    return out


# ---------------------------------------------------------------------------
# File formats: PPM images, CSV tables, JSON manifests.


def read_ppm(path) -> tuple:
    """Read a binary 8-bit PPM (P6). Returns (width, height, flat RGB array)."""
    raw = Path(path).read_bytes()
    fields = []
    pos = 0
    while len(fields) < 4:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValidationError(f"{path}: truncated PPM header")
        fields.append(raw[start:pos])
    pos += 1  # single whitespace byte after maxval
    magic, width, height, maxval = fields
    if magic != b"P6":
        raise ValidationError(f"{path}: not a binary PPM (magic {magic!r})")
    width, height, maxval = int(width), int(height), int(maxval)
    if maxval != 255:
        raise ValidationError(f"{path}: only maxval 255 is supported, got {maxval}")
    expected = width * height * 3
    payload = raw[pos : pos + expected]
    if len(payload) != expected:
        raise ValidationError(f"{path}: expected {expected} pixel bytes, got {len(payload)}")
    return width, height, np.frombuffer(payload, dtype=np.uint8).astype(np.float64)


def write_ppm(path, width: int, height: int, values) -> None:
    """Write channel-interleaved values in [0, 255] as a binary PPM."""
    v = np.asarray(values)
    if v.size != width * height * 3:
        raise ShapeError(f"need {width * height * 3} values for {width}x{height}x3, got {v.size}")
    header = f"P6\n{width} {height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + np.rint(v).astype(np.uint8).tobytes())


def read_csv_samples(path, labeled: bool) -> list:
    """Headerless CSV rows as samples; final column is the label when labeled."""
    samples = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row:
                continue
            if labeled:
                features = np.array([float(x) for x in row[:-1]])
                samples.append(Sample(id=i, features=features, label=int(row[-1])))
            else:
                samples.append(Sample(id=i, features=np.array([float(x) for x in row])))
    return samples


def write_manifest(path, fmt: str, labeled: bool, feature_count: int, files) -> None:
    manifest = {
        "format": fmt,
        "labeled": labeled,
        "feature_count": feature_count,
        "files": list(files),
    }
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def load_dataset(manifest_path) -> tuple:
    """Load all samples named by a manifest. Returns (samples, manifest dict)."""
    manifest_path = Path(manifest_path)
    manifest = json.loads(manifest_path.read_text())
    for key in ("format", "labeled", "feature_count", "files"):
        if key not in manifest:
            raise ValidationError(f"{manifest_path}: manifest is missing '{key}'")
    base = manifest_path.parent
    samples = []
    if manifest["format"] == "ppm":
        for i, rel in enumerate(manifest["files"]):
            _, _, features = read_ppm(base / rel)
            samples.append(Sample(id=i, features=features))
    elif manifest["format"] == "csv":
        for rel in manifest["files"]:
            part = read_csv_samples(base / rel, labeled=manifest["labeled"])
            offset = len(samples)
            for s in part:
                s.id += offset
            samples.extend(part)
    else:
        raise ValidationError(f"unknown dataset format {manifest['format']!r}")
    for s in samples:
        if len(s.features) != manifest["feature_count"]:
            raise ValidationError(
                f"sample {s.id} has {len(s.features)} features, manifest says "
                f"{manifest['feature_count']}"
            )
    return samples, manifest


# ---------------------------------------------------------------------------
# Synthetic datasets: desk-scale stand-ins with known structure.


def generate_color_blobs(n: int, seed: int, out_dir, size: int = 8) -> Path:
    """n small RGB images, each noise around a dominant color.

    Brightness varies strongly across images and dominates the histogram
    distances, so overall intensity (which per-image normalization cannot
    represent) carries most of the similarity signal; the hue direction
    adds a secondary axis. Writes PPM files plus a manifest and returns
    the manifest path.
    """
    if n < 1:
        raise ValidationError("need n >= 1 images")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    files = []
    for i in range(n):
        brightness = rng.uniform(30.0, 225.0)
        hue = rng.uniform(0.5, 1.0, size=3)
        hue *= np.sqrt(3.0) / np.linalg.norm(hue)
        noise = rng.uniform(-25.0, 25.0, size=(size * size, 3))
        pixels = np.clip(brightness * hue[None, :] + noise, 0.0, 255.0)
        name = f"blob_{i:04d}.ppm"
        write_ppm(out_dir / name, size, size, pixels.reshape(-1))
        files.append(name)
    manifest_path = out_dir / "manifest.json"
    write_manifest(manifest_path, "ppm", False, size * size * 3, files)
    return manifest_path


def generate_two_class_gauss(n: int, seed: int, out_dir, n_features: int = 8) -> Path:
    """Two well-separated Gaussian classes in a labeled CSV.

    The class means point in different directions so the classes stay
    distinguishable after the norm is divided out by amplitude embedding.
    """
    if n < 2:
        raise ValidationError("need n >= 2 samples")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    half = n_features // 2
    mean0 = np.concatenate([np.full(half, 3.0), np.zeros(n_features - half)])
    mean1 = np.concatenate([np.zeros(half), np.full(n_features - half, 3.0)])
    rows = []
    for i in range(n):
        label = i % 2
        mean = mean1 if label else mean0
        rows.append((mean + rng.normal(0.0, 0.5, size=n_features), label))
    csv_path = out_dir / "samples.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for features, label in rows:
            writer.writerow([repr(float(x)) for x in features] + [label])
    manifest_path = out_dir / "manifest.json"
    write_manifest(manifest_path, "csv", True, n_features, ["samples.csv"])
    return manifest_path
