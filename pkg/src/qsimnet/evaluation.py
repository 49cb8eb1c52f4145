"""Ranking, clustering and projection-variance evaluation of trained models.

Ground-truth similarity between images is the L1 distance of their 24-bin
color histograms; the model's distance is measured in projection space.
Rank agreement uses Spearman correlation with fractional average ranks.
Classification fits a Gaussian mixture to the embeddings and scores the
best permutation of clusters onto labels.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .ansatz import measure_batch, run_circuit_batch
from .data import color_histogram, histogram_distance, prepare_pair_input, prepare_single_input
from .exceptions import ResourceError, ValidationError
from .training import TrainedModel

MAX_PERMUTATION_CLUSTERS = 8


# ---------------------------------------------------------------------------
# Spearman rank correlation.


def _fractional_ranks(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x))
    ranks[order] = np.arange(1, len(x) + 1, dtype=np.float64)
    _, inverse, counts = np.unique(x, return_inverse=True, return_counts=True)
    sums = np.bincount(inverse, weights=ranks)
    return sums[inverse] / counts[inverse]


def spearman(xs, ys) -> float:
    """Pearson correlation of fractional ranks; ties get averaged ranks."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1 or len(xs) < 2:
        raise ValidationError("spearman needs two equal-length sequences of length >= 2")
    if np.all(xs == xs[0]) or np.all(ys == ys[0]):
        raise ValidationError("spearman is undefined for a constant sequence")
    rx = _fractional_ranks(xs)
    ry = _fractional_ranks(ys)
    rx -= rx.mean()
    ry -= ry.mean()
    return float(np.dot(rx, ry) / np.sqrt(np.dot(rx, rx) * np.dot(ry, ry)))


# ---------------------------------------------------------------------------
# Model distances and ranking against histogram ground truth.


@dataclass
class RankingResult:
    anchor_id: int
    spearman_rho: float
    candidate_ids: list
    ground_truth_distances: np.ndarray
    model_distances: np.ndarray


def _is_woven(model: TrainedModel) -> bool:
    return len(model.spec.measured_qubits) == 4


def _projection_distance(u: np.ndarray, v: np.ndarray, metric: str) -> np.ndarray:
    if metric == "l2":
        return np.sum((u - v) ** 2, axis=-1)
    return np.sum(np.abs(u - v), axis=-1)


def model_distances(model: TrainedModel, anchor_features, candidates_features, metric: str = "l1") -> np.ndarray:
    """Model-side distance from one anchor to each candidate.

    Woven models run one interwoven pair per candidate and compare the
    anchor-designated coordinates to the partner coordinates; baseline
    models embed each sample separately and compare the projections.
    """
    spec = model.spec
    anchor = np.asarray(anchor_features, dtype=np.float64)
    cands = [np.asarray(c, dtype=np.float64) for c in candidates_features]
    if _is_woven(model):
        inputs = np.stack([prepare_pair_input(anchor, c, spec) for c in cands])
        coords = measure_batch(run_circuit_batch(inputs, spec, model.params), spec)
        return _projection_distance(coords[:, :2], coords[:, 2:], metric)
    inputs = np.stack([prepare_single_input(anchor, spec)] + [prepare_single_input(c, spec) for c in cands])
    coords = measure_batch(run_circuit_batch(inputs, spec, model.params), spec)
    return _projection_distance(coords[0][None, :], coords[1:], metric)


def model_distance(model: TrainedModel, anchor_features, candidate_features, metric: str = "l1") -> float:
    return float(model_distances(model, anchor_features, [candidate_features], metric)[0])


def rank_against_ground_truth(model: TrainedModel, anchor, candidates, metric: str = "l1") -> RankingResult:
    """Spearman agreement between histogram and model distance orderings."""
    if len(candidates) < 2:
        raise ValidationError("need at least 2 candidates to rank")
    anchor_hist = color_histogram(anchor.features)
    ground_truth = np.array(
        [histogram_distance(anchor_hist, color_histogram(c.features)) for c in candidates]
    )
    model_side = model_distances(model, anchor.features, [c.features for c in candidates], metric)
    rho = spearman(ground_truth, model_side)
    return RankingResult(
        anchor_id=anchor.id,
        spearman_rho=rho,
        candidate_ids=[c.id for c in candidates],
        ground_truth_distances=ground_truth,
        model_distances=model_side,
    )


# ---------------------------------------------------------------------------
# Gaussian mixture fit by expectation-maximization.


@dataclass
class GmmModel:
    weights: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    log_likelihood_trace: list


def _log_gaussian(points: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    d = points.shape[1]
    chol = np.linalg.cholesky(cov)
    solved = np.linalg.solve(chol, (points - mean).T)
    log_det = 2.0 * np.sum(np.log(np.diag(chol)))
    return -0.5 * (np.sum(solved**2, axis=0) + log_det + d * np.log(2.0 * np.pi))


def _log_responsibilities(points, weights, means, covs):
    k = len(weights)
    log_prob = np.empty((points.shape[0], k))
    for j in range(k):
        log_prob[:, j] = np.log(weights[j]) + _log_gaussian(points, means[j], covs[j])
    max_per_row = np.max(log_prob, axis=1, keepdims=True)
    log_norm = max_per_row[:, 0] + np.log(np.sum(np.exp(log_prob - max_per_row), axis=1))
    return log_prob - log_norm[:, None], float(np.sum(log_norm))


def _kmeans_pp_centers(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centers = [points[rng.integers(len(points))]]
    for _ in range(1, k):
        d2 = np.min(
            np.stack([np.sum((points - c) ** 2, axis=1) for c in centers]), axis=0
        )
        total = d2.sum()
        if total == 0.0:
            centers.append(points[rng.integers(len(points))])
        else:
            centers.append(points[rng.choice(len(points), p=d2 / total)])
    return np.stack(centers)


def gmm_fit(points, k: int, rng_seed: int, max_iter: int = 100, tol: float = 1e-6, reg: float = 1e-6) -> GmmModel:
    """Full-covariance EM with k-means++ initialization under the seed.

    Stops when the log-likelihood improves by less than tol or after
    max_iter iterations; covariances carry a diagonal floor of reg.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or len(points) < k or k < 1:
        raise ValidationError(f"need at least k={k} points of equal dimension")
    n, d = points.shape
    rng = np.random.default_rng(rng_seed)
    centers = _kmeans_pp_centers(points, k, rng)
    assign = np.argmin(
        np.stack([np.sum((points - c) ** 2, axis=1) for c in centers]), axis=0
    )
    resp = np.full((n, k), 1e-10)
    resp[np.arange(n), assign] = 1.0
    resp /= resp.sum(axis=1, keepdims=True)

    weights = np.empty(k)
    means = np.empty((k, d))
    covs = np.empty((k, d, d))
    trace = []
    log_likelihood = -np.inf
    for _ in range(max_iter):
        # M step
        counts = resp.sum(axis=0)
        weights = counts / n
        means = (resp.T @ points) / counts[:, None]
        for j in range(k):
            diff = points - means[j]
            covs[j] = (resp[:, j][:, None] * diff).T @ diff / counts[j] + reg * np.eye(d)
        # E step
        log_resp, new_ll = _log_responsibilities(points, weights, means, covs)
        resp = np.exp(log_resp)
        trace.append(new_ll)
        if np.isfinite(log_likelihood) and abs(new_ll - log_likelihood) < tol:
            log_likelihood = new_ll
            break
        log_likelihood = new_ll
    return GmmModel(weights=weights, means=means, covariances=covs, log_likelihood_trace=trace)


def gmm_predict(model: GmmModel, points) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    log_resp, _ = _log_responsibilities(points, model.weights, model.means, model.covariances)
    return np.argmax(log_resp, axis=1)


def cluster_accuracy(assignments, labels) -> float:
    """Best accuracy over all assignments of cluster ids to label values."""
    assignments = np.asarray(assignments)
    labels = np.asarray(labels)
    if assignments.shape != labels.shape or assignments.ndim != 1:
        raise ValidationError("assignments and labels must be equal-length vectors")
    _, a_idx = np.unique(assignments, return_inverse=True)
    _, l_idx = np.unique(labels, return_inverse=True)
    k = int(max(a_idx.max(), l_idx.max())) + 1
    if k > MAX_PERMUTATION_CLUSTERS:
        raise ResourceError(f"permutation search supports at most {MAX_PERMUTATION_CLUSTERS} clusters, got {k}")
    best = 0.0
    for perm in itertools.permutations(range(k)):
        mapping = np.array(perm)
        best = max(best, float(np.mean(mapping[a_idx] == l_idx)))
    return best


# ---------------------------------------------------------------------------
# Embeddings and projection variance.


def embed_samples(model: TrainedModel, samples) -> np.ndarray:
    """Projection coordinates per sample, [n, 4] woven or [n, 2] baseline.

    Woven models interweave each sample with itself so no second sample
    (and no label) is needed at embedding time.
    """
    spec = model.spec
    if _is_woven(model):
        inputs = np.stack([prepare_pair_input(s.features, s.features, spec) for s in samples])
    else:
        inputs = np.stack([prepare_single_input(s.features, spec) for s in samples])
    return measure_batch(run_circuit_batch(inputs, spec, model.params), spec)


def projection_variance_cdf(model: TrainedModel, pairs) -> tuple:
    """Anchor-projection discrepancy when the interleave order is swapped.

    For each (a, b) pair, compares the anchor-designated coordinates of the
    (a, b) run against those of the (b, a) run. Returns (sorted values,
    mean) for CDF plotting.
    """
    if len(pairs) == 0:
        raise ValidationError("need at least one pair")
    if not _is_woven(model):
        raise ValidationError("projection variance is defined for woven models")
    spec = model.spec
    rows = []
    for a, b in pairs:
        rows.append(prepare_pair_input(a.features, b.features, spec))
        rows.append(prepare_pair_input(b.features, a.features, spec))
    coords = measure_batch(run_circuit_batch(np.stack(rows), spec, model.params), spec)
    anchor_slots = list(spec.anchor_slots)
    first = coords[0::2][:, anchor_slots]
    swapped = coords[1::2][:, anchor_slots]
    values = np.sum(np.abs(first - swapped), axis=1)
    return np.sort(values), float(np.mean(values))
