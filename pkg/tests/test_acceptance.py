"""Acceptance suite: one test per criterion, each printing a PASS line.

Criteria 6 and 7 share their training runs through a module-scoped
fixture; together they train three models at full desk scale and dominate
the suite's runtime (roughly 15 minutes).
"""

import json
from pathlib import Path

import numpy as np
import pytest

from qsimnet import (
    LossWeights,
    TrainConfig,
    Triplet,
    apply_cx,
    apply_r3,
    baseline_spec,
    baseline_triplet_loss,
    cluster_accuracy,
    consistency_loss,
    embed_samples,
    execution_counter,
    expectation_z,
    gmm_fit,
    gmm_predict,
    gradient,
    init_parameters,
    load_amplitudes,
    load_dataset,
    parameter_count,
    projection_variance_cdf,
    rank_against_ground_truth,
    split_dataset,
    total_loss,
    train,
    triplet_loss_l1,
    triplet_loss_l2,
    woven_spec,
    woven_triplet_loss,
)
from qsimnet.cli import main
from qsimnet.data import generate_color_blobs, generate_two_class_gauss


def _report(criterion: int, text: str):
    print(f"[criterion {criterion}] PASS {text}")


# ---------------------------------------------------------------------------
# Criterion 1: parameter-count identity.


def test_criterion_1_parameter_count_identity():
    assert parameter_count(woven_spec(4, 4)) == 48
    _report(1, "parameter_count(4 qubits, 4 layers) == 48")


# ---------------------------------------------------------------------------
# Criterion 2: simulator correctness suite.


def test_criterion_2_simulator_correctness():
    rng = np.random.default_rng(2024)

    # unitarity over 1000 random circuits on <= 6 qubits
    worst_drift = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        state = load_amplitudes(rng.uniform(0.01, 1.0, 2**n))
        for _ in range(8):
            if rng.random() < 0.5:
                state = apply_r3(state, int(rng.integers(n)), *rng.uniform(0, 2 * np.pi, 3))
            else:
                c, t = rng.choice(n, size=2, replace=False)
                state = apply_cx(state, int(c), int(t))
        worst_drift = max(worst_drift, abs(state.norm() - 1.0))
    assert worst_drift < 1e-9

    # R3(0,0,0) identity
    state = load_amplitudes(rng.uniform(0.01, 1.0, 16))
    assert np.allclose(apply_r3(state, 2, 0, 0, 0).amplitudes, state.amplitudes, atol=1e-12)

    # CX involution
    assert np.allclose(
        apply_cx(apply_cx(state, 0, 3), 0, 3).amplitudes, state.amplitudes, atol=1e-12
    )

    # expectation_z in range and equal to the brute-force marginal sum
    for _ in range(50):
        n = int(rng.integers(1, 6))
        state = load_amplitudes(rng.uniform(0.01, 1.0, 2**n))
        for _ in range(3):
            state = apply_r3(state, int(rng.integers(n)), *rng.uniform(0, 2 * np.pi, 3))
        for q in range(n):
            z = expectation_z(state, q)
            brute = sum(
                (1.0 if ((k >> q) & 1) == 0 else -1.0) * abs(a) ** 2
                for k, a in enumerate(state.amplitudes)
            )
            assert -1.0 <= z <= 1.0
            assert abs(z - brute) < 1e-12
    _report(2, f"unitarity (worst drift {worst_drift:.2e}), gate identities, exact marginals")


# ---------------------------------------------------------------------------
# Criterion 3: gradient oracle, parameter-shift vs central finite differences.
# The woven network needs 4 measured qubits, so its 10 instances run on
# 4 qubits; the 10 baseline instances run on the stated 3 qubits.


def test_criterion_3_gradient_oracle():
    rng = np.random.default_rng(333)
    worst = 0.0
    for instance in range(20):
        mode = "woven" if instance % 2 == 0 else "baseline"
        spec = woven_spec(4, 2) if mode == "woven" else baseline_spec(3, 2)
        features = {i: rng.uniform(1.0, 255.0, 6) for i in range(6)}
        ids = rng.choice(6, size=3, replace=False)
        batch = [Triplet(int(ids[0]), int(ids[1]), int(ids[2]))]
        params = rng.uniform(0, 2 * np.pi, parameter_count(spec))
        g_shift, _ = gradient(
            params, spec, batch, TrainConfig(mode=mode, gradient_mode="parameter_shift", epochs=1), features
        )
        g_fd, _ = gradient(
            params, spec, batch, TrainConfig(mode=mode, gradient_mode="finite_difference", epochs=1), features
        )
        mask = np.abs(g_fd) > 1e-6
        assert mask.any()
        rel = np.abs(g_shift - g_fd)[mask] / np.abs(g_fd)[mask]
        worst = max(worst, float(rel.max()))
        assert np.all(rel < 1e-3)
    _report(3, f"20 instances, worst elementwise relative error {worst:.2e}")


# ---------------------------------------------------------------------------
# Criterion 4: loss algebra on unit examples plus 10,000 random projections.


def test_criterion_4_loss_algebra():
    # unit examples
    assert triplet_loss_l2((0, 0), (0, 0), (1, 0)) == -1.0
    assert triplet_loss_l2((0, 0), (1, 0), (0, 1)) == 0.0
    assert triplet_loss_l1((0, 0), (0, 0), (1, 1)) == -2.0
    assert triplet_loss_l1((0, 0), (0.5, 0), (0, 0.5)) == 0.0
    assert consistency_loss((0.25, -0.5), (0.25, -0.5)) == 0.0
    assert consistency_loss((1, 1), (-1, -1)) == 4.0
    assert total_loss(LossWeights(1, 0), -2.0, 0.5) == -2.0
    assert total_loss(LossWeights(0, 1), -2.0, 0.5) == 0.5
    assert total_loss(LossWeights(1, 1), -2.0, 0.5) == -1.5

    rng = np.random.default_rng(44)
    for _ in range(10_000):
        a, p, n = rng.uniform(-1, 1, (3, 2))
        l2, l2_swapped = triplet_loss_l2(a, p, n), triplet_loss_l2(a, n, p)
        l1, l1_swapped = triplet_loss_l1(a, p, n), triplet_loss_l1(a, n, p)
        assert abs(l2 + l2_swapped) < 1e-12
        assert abs(l1 + l1_swapped) < 1e-12
        assert consistency_loss(a, p) >= 0.0
        assert abs(l1) <= 4.0 + 1e-12 and abs(l2) <= 8.0 + 1e-12
    _report(4, "unit examples exact; antisymmetry and nonnegativity on 10,000 random projections")


# ---------------------------------------------------------------------------
# Criterion 5: resource-efficiency accounting, 2 runs vs 3 runs per triplet.


def test_criterion_5_execution_accounting():
    rng = np.random.default_rng(55)
    feats = rng.uniform(1.0, 255.0, (3, 6))

    spec = woven_spec(4, 2)
    params = init_parameters(spec, rng)
    execution_counter.reset()
    woven_triplet_loss(params, spec, *feats)
    woven_runs = execution_counter.count

    bspec = baseline_spec(3, 2)
    bparams = init_parameters(bspec, rng)
    execution_counter.reset()
    baseline_triplet_loss(bparams, bspec, *feats)
    baseline_runs = execution_counter.count

    assert woven_runs == 2
    assert baseline_runs == 3
    _report(5, "forward executions per triplet: woven == 2, baseline == 3")


# ---------------------------------------------------------------------------
# Criteria 6 and 7: desk-scale end-to-end ranking and consistency-term
# effectiveness, sharing three full training runs.

N_IMAGES = 200
DATASET_SEED = 11
TRAIN_SEED = 0
N_TRIPLETS = 60
EPOCHS = 150
N_ANCHORS = 30
N_CANDIDATES = 50


@pytest.fixture(scope="module")
def desk_scale_runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("blobs")
    manifest = generate_color_blobs(N_IMAGES, seed=DATASET_SEED, out_dir=root)
    samples, _ = load_dataset(manifest)

    wspec = woven_spec(9, 4)
    bspec = baseline_spec(8, 4)
    shared = dict(
        learning_rate=0.01, batch_size=30, epochs=EPOCHS, n_triplets=N_TRIPLETS, rng_seed=TRAIN_SEED
    )
    untrained = train(samples, wspec, TrainConfig(mode="woven", **{**shared, "epochs": 0}))
    woven_on = train(samples, wspec, TrainConfig(mode="woven", weights=LossWeights(1, 1), **shared))
    woven_off = train(samples, wspec, TrainConfig(mode="woven", weights=LossWeights(1, 0), **shared))
    baseline = train(samples, bspec, TrainConfig(mode="baseline", **shared))
    return samples, untrained, woven_on, woven_off, baseline


def _median_rho(model, samples):
    rng = np.random.default_rng(123)
    rhos = []
    for _ in range(N_ANCHORS):
        anchor = samples[int(rng.integers(len(samples)))]
        others = [s for s in samples if s.id != anchor.id]
        chosen = [others[i] for i in rng.choice(len(others), size=N_CANDIDATES, replace=False)]
        rhos.append(rank_against_ground_truth(model, anchor, chosen).spearman_rho)
    return float(np.median(rhos))


def test_criterion_6_desk_scale_ranking(desk_scale_runs):
    samples, untrained, woven_on, _, baseline = desk_scale_runs
    rho_trained = _median_rho(woven_on, samples)
    rho_untrained = _median_rho(untrained, samples)
    rho_baseline = _median_rho(baseline, samples)
    assert rho_trained >= rho_untrained + 0.10, (rho_trained, rho_untrained)
    assert rho_trained >= rho_baseline + 0.10, (rho_trained, rho_baseline)
    _report(
        6,
        f"median rho: trained {rho_trained:+.3f} vs untrained {rho_untrained:+.3f} "
        f"and baseline {rho_baseline:+.3f} (gaps >= 0.10)",
    )


def test_criterion_7_consistency_reduces_projection_variance(desk_scale_runs):
    samples, _, woven_on, woven_off, _ = desk_scale_runs
    rng = np.random.default_rng(77)
    pairs = []
    for _ in range(200):
        i, j = rng.choice(len(samples), size=2, replace=False)
        pairs.append((samples[i], samples[j]))
    _, mean_on = projection_variance_cdf(woven_on, pairs)
    _, mean_off = projection_variance_cdf(woven_off, pairs)
    assert mean_on <= 0.5 * mean_off, (mean_on, mean_off)
    _report(
        7,
        f"mean projection variance {mean_on:.4f} (beta=1) vs {mean_off:.4f} (beta=0): "
        f"{(1 - mean_on / mean_off) * 100:.0f}% decrease (>= 50%)",
    )


# ---------------------------------------------------------------------------
# Criterion 8: classification pipeline on two separable Gaussian classes.


def test_criterion_8_classification_pipeline(tmp_path):
    manifest = generate_two_class_gauss(120, seed=21, out_dir=tmp_path / "gauss")
    samples, _ = load_dataset(manifest)
    by_id = {s.id: s for s in samples}
    split = split_dataset(samples, rng_seed=0)

    spec = woven_spec(4, 4)
    config = TrainConfig(mode="woven", epochs=200, n_triplets=30, batch_size=30, rng_seed=0)
    model = train([by_id[i] for i in split.train], spec, config)

    test_samples = [by_id[i] for i in split.test]
    points = embed_samples(model, test_samples)
    labels = np.array([s.label for s in test_samples])
    gmm = gmm_fit(points, k=2, rng_seed=0)
    accuracy = cluster_accuracy(gmm_predict(gmm, points), labels)
    assert accuracy >= 0.90
    _report(8, f"GMM + permutation accuracy {accuracy:.3f} (>= 0.90)")


# ---------------------------------------------------------------------------
# Criterion 9: byte-identical reruns, independent of the worker flag.


def _tree(root: Path) -> dict:
    # run_config.json echoes absolute paths, which differ between output
    # directories by construction; every data file must match exactly
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file() and p.name != "run_config.json"
    }


def test_criterion_9_command_determinism(tmp_path):
    trees = {}
    for tag, workers in (("a", "1"), ("b", "4")):
        data_dir = tmp_path / tag / "data"
        assert main(["gen-synth", "--kind", "color_blobs", "--n", "24", "--seed", "3",
                     "--image-size", "2", "--out", str(data_dir)]) == 0
        manifest = data_dir / "manifest.json"
        model_dir = tmp_path / tag / "model"
        assert main(["train", "--manifest", str(manifest), "--out", str(model_dir),
                     "--layers", "2", "--epochs", "2", "--triplets", "6", "--batch-size", "3",
                     "--seed", "1", "--workers", workers]) == 0
        rank_dir = tmp_path / tag / "rank"
        assert main(["eval-rank", "--model", str(model_dir / "model.json"), "--manifest", str(manifest),
                     "--out", str(rank_dir), "--anchors", "2", "--candidates", "3", "--seed", "5",
                     "--workers", workers]) == 0
        var_dir = tmp_path / tag / "var"
        assert main(["eval-variance", "--model", str(model_dir / "model.json"), "--manifest", str(manifest),
                     "--out", str(var_dir), "--pairs", "4", "--seed", "6",
                     "--workers", workers]) == 0
        trees[tag] = {
            name: _tree(tmp_path / tag / name) for name in ("data", "model", "rank", "var")
        }
    assert trees["a"] == trees["b"]

    # and the echoed configs agree on everything except paths and workers
    for name in ("model", "rank", "var"):
        cfg_a = json.loads((tmp_path / "a" / name / "run_config.json").read_text())
        cfg_b = json.loads((tmp_path / "b" / name / "run_config.json").read_text())
        for skip in ("out", "manifest", "model", "workers"):
            cfg_a.pop(skip, None)
            cfg_b.pop(skip, None)
        assert cfg_a == cfg_b
    _report(9, "byte-identical outputs across reruns and worker counts")
