"""Command-line orchestration: synthetic data, training, evaluation.

Every command takes long-form flags plus an optional JSON config file
(--config); explicit flags override config-file values, which override
the built-in defaults. The fully resolved configuration is echoed to
<out>/run_config.json so a run can be replayed from its output directory.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 resource or
capacity error.
"""

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import data as data_mod
from .ansatz import baseline_spec, woven_spec
from .data import load_dataset, required_qubits, split_dataset
from .evaluation import (
    cluster_accuracy,
    embed_samples,
    gmm_fit,
    gmm_predict,
    projection_variance_cdf,
    rank_against_ground_truth,
)
from .exceptions import CapacityError, ResourceError, ValidationError
from .losses import LossWeights
from .training import TrainConfig, load_model, save_model, train


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _fmt(x) -> str:
    return repr(float(x))


def _write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _echo_config(out_dir: Path, command: str, resolved: dict) -> None:
    _write_json(out_dir / "run_config.json", {"command": command, **resolved})


def _resolve(args, defaults: dict) -> dict:
    """Merge flag values over config-file values over defaults."""
    file_cfg = {}
    if getattr(args, "config", None):
        file_cfg = json.loads(Path(args.config).read_text())
        unknown = set(file_cfg) - set(defaults)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    resolved = {}
    for key, default in defaults.items():
        value = getattr(args, key)
        if value is None:
            value = file_cfg.get(key, default)
        resolved[key] = value
    return resolved


def _load_split(manifest_path, split_seed: int, train_fraction: float = 0.8):
    samples, manifest = load_dataset(manifest_path)
    split = split_dataset(samples, train_fraction=train_fraction, rng_seed=split_seed)
    by_id = {s.id: s for s in samples}
    return samples, manifest, split, by_id


# ---------------------------------------------------------------------------
# gen-synth


GEN_DEFAULTS = {"kind": None, "n": 100, "seed": 0, "image_size": 8, "n_features": 8}


def cmd_gen_synth(args) -> int:
    resolved = _resolve(args, GEN_DEFAULTS)
    if resolved["kind"] not in ("color_blobs", "two_class_gauss"):
        raise ValidationError("--kind must be color_blobs or two_class_gauss")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if resolved["kind"] == "color_blobs":
        manifest = data_mod.generate_color_blobs(
            resolved["n"], resolved["seed"], out_dir, size=resolved["image_size"]
        )
    else:
        manifest = data_mod.generate_two_class_gauss(
            resolved["n"], resolved["seed"], out_dir, n_features=resolved["n_features"]
        )
    _echo_config(out_dir, "gen-synth", {**resolved, "out": str(out_dir)})
    print(f"wrote {resolved['n']} samples, manifest at {manifest}")
    return 0


# ---------------------------------------------------------------------------
# train


TRAIN_DEFAULTS = {
    "mode": "woven",
    "qubits": None,
    "layers": 4,
    "learning_rate": 0.01,
    "batch_size": 30,
    "epochs": 500,
    "alpha": 1.0,
    "beta": 1.0,
    "objective": None,
    "gradient_mode": "parameter_shift",
    "triplets": 100,
    "seed": 0,
    "split_seed": 0,
    "train_fraction": 0.8,
    "resample_each_epoch": False,
    "margin": None,
    "workers": 1,
}


def cmd_train(args) -> int:
    resolved = _resolve(args, TRAIN_DEFAULTS)
    samples, manifest, split, by_id = _load_split(
        args.manifest, resolved["split_seed"], resolved["train_fraction"]
    )
    paired = resolved["mode"] == "woven"
    needed = required_qubits(manifest["feature_count"], paired=paired)
    n_qubits = resolved["qubits"] if resolved["qubits"] is not None else needed
    if n_qubits < needed:
        raise CapacityError(
            f"{manifest['feature_count']}-feature samples in {resolved['mode']} mode "
            f"need {needed} qubits, got {n_qubits}"
        )
    spec = woven_spec(n_qubits, resolved["layers"]) if paired else baseline_spec(n_qubits, resolved["layers"])
    config = TrainConfig(
        learning_rate=resolved["learning_rate"],
        batch_size=resolved["batch_size"],
        epochs=resolved["epochs"],
        n_layers=resolved["layers"],
        weights=LossWeights(resolved["alpha"], resolved["beta"]),
        gradient_mode=resolved["gradient_mode"],
        rng_seed=resolved["seed"],
        mode=resolved["mode"],
        objective=resolved["objective"],
        n_triplets=resolved["triplets"],
        resample_each_epoch=bool(resolved["resample_each_epoch"]),
        margin=resolved["margin"],
    )
    train_samples = [by_id[i] for i in split.train]
    model = train(train_samples, spec, config)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_model(model, out_dir / "model.json")
    with open(out_dir / "loss_history.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mean_total_loss"])
        for epoch, loss in enumerate(model.loss_history):
            writer.writerow([epoch, _fmt(loss)])
    _echo_config(
        out_dir,
        "train",
        {**resolved, "qubits": n_qubits, "manifest": str(args.manifest), "out": str(out_dir)},
    )
    print(f"trained {resolved['mode']} model ({n_qubits} qubits) -> {out_dir / 'model.json'}")
    return 0


# ---------------------------------------------------------------------------
# eval-rank


RANK_DEFAULTS = {
    "anchors": 30,
    "candidates": 50,
    "seed": 0,
    "split_seed": 0,
    "metric": "l1",
    "workers": 1,
}


def cmd_eval_rank(args) -> int:
    resolved = _resolve(args, RANK_DEFAULTS)
    if resolved["candidates"] < 2:
        raise ValidationError("need at least 2 candidates per anchor")
    if resolved["anchors"] < 1:
        raise ValidationError("need at least one anchor")
    model = load_model(args.model)
    samples, manifest, split, by_id = _load_split(args.manifest, resolved["split_seed"])
    pool = split.test
    if len(pool) < resolved["candidates"] + 1:
        raise ValidationError(
            f"test split has {len(pool)} samples; need {resolved['candidates'] + 1}"
        )
    rng = np.random.default_rng(resolved["seed"])
    anchor_ids = [pool[i] for i in rng.choice(len(pool), size=min(resolved["anchors"], len(pool)), replace=False)]

    out_dir = Path(args.out)
    rank_dir = out_dir / "rankings"
    rank_dir.mkdir(parents=True, exist_ok=True)
    per_anchor = []
    for anchor_id in anchor_ids:
        others = [i for i in pool if i != anchor_id]
        chosen = [others[i] for i in rng.choice(len(others), size=resolved["candidates"], replace=False)]
        result = rank_against_ground_truth(
            model, by_id[anchor_id], [by_id[c] for c in chosen], metric=resolved["metric"]
        )
        with open(rank_dir / f"anchor_{anchor_id:04d}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["candidate_id", "ground_truth_distance", "model_distance"])
            for cid, gt, md in zip(result.candidate_ids, result.ground_truth_distances, result.model_distances):
                writer.writerow([cid, _fmt(gt), _fmt(md)])
        per_anchor.append({"anchor_id": anchor_id, "spearman_rho": result.spearman_rho})

    rhos = np.array([r["spearman_rho"] for r in per_anchor])
    summary = {
        "per_anchor": per_anchor,
        "p25": float(np.percentile(rhos, 25)),
        "p50": float(np.percentile(rhos, 50)),
        "p75": float(np.percentile(rhos, 75)),
        "p100": float(np.percentile(rhos, 100)),
    }
    _write_json(out_dir / "summary.json", summary)
    _echo_config(
        out_dir,
        "eval-rank",
        {**resolved, "model": str(args.model), "manifest": str(args.manifest), "out": str(out_dir)},
    )
    print(f"median spearman over {len(rhos)} anchors: {summary['p50']:.4f}")
    return 0


# ---------------------------------------------------------------------------
# eval-classify


CLASSIFY_DEFAULTS = {"n_fit": 1000, "seed": 0, "split_seed": 0, "workers": 1}


def cmd_eval_classify(args) -> int:
    resolved = _resolve(args, CLASSIFY_DEFAULTS)
    model = load_model(args.model)
    samples, manifest, split, by_id = _load_split(args.manifest, resolved["split_seed"])
    if not manifest["labeled"]:
        raise ValidationError("eval-classify needs a labeled dataset")
    rng = np.random.default_rng(resolved["seed"])
    pool = split.test
    take = min(resolved["n_fit"], len(pool))
    chosen = [pool[i] for i in rng.choice(len(pool), size=take, replace=False)]
    subset = [by_id[i] for i in chosen]
    labels = np.array([s.label for s in subset])
    k = len(set(labels.tolist()))
    points = embed_samples(model, subset)
    gmm = gmm_fit(points, k, rng_seed=resolved["seed"])
    assignments = gmm_predict(gmm, points)
    accuracy = cluster_accuracy(assignments, labels)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(
        out_dir / "summary.json",
        {"accuracy": accuracy, "n_points": int(take), "n_classes": int(k)},
    )
    _echo_config(
        out_dir,
        "eval-classify",
        {**resolved, "model": str(args.model), "manifest": str(args.manifest), "out": str(out_dir)},
    )
    print(f"clustering accuracy on {take} points ({k} classes): {accuracy:.4f}")
    return 0


# ---------------------------------------------------------------------------
# eval-variance


VARIANCE_DEFAULTS = {"pairs": 100, "seed": 0, "split_seed": 0, "workers": 1}


def cmd_eval_variance(args) -> int:
    resolved = _resolve(args, VARIANCE_DEFAULTS)
    if resolved["pairs"] < 1:
        raise ValidationError("need at least one pair")
    model = load_model(args.model)
    samples, manifest, split, by_id = _load_split(args.manifest, resolved["split_seed"])
    pool = split.test
    if len(pool) < 2:
        raise ValidationError("test split too small to form pairs")
    rng = np.random.default_rng(resolved["seed"])
    pairs = []
    for _ in range(resolved["pairs"]):
        a, b = rng.choice(len(pool), size=2, replace=False)
        pairs.append((by_id[pool[a]], by_id[pool[b]]))
    values, mean = projection_variance_cdf(model, pairs)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "variance.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value"])
        for v in values:
            writer.writerow([_fmt(v)])
    _write_json(out_dir / "summary.json", {"mean_projection_variance": mean, "n_pairs": len(values)})
    _echo_config(
        out_dir,
        "eval-variance",
        {**resolved, "model": str(args.model), "manifest": str(args.manifest), "out": str(out_dir)},
    )
    print(f"mean projection variance over {len(values)} pairs: {mean:.6f}")
    return 0


# ---------------------------------------------------------------------------
# Parser wiring.


def build_parser() -> _Parser:
    parser = _Parser(prog="qsimnet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-synth", help="generate a synthetic dataset")
    gen.add_argument("--kind", choices=["color_blobs", "two_class_gauss"])
    gen.add_argument("--n", type=int)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--image-size", type=int, dest="image_size")
    gen.add_argument("--n-features", type=int, dest="n_features")
    gen.add_argument("--out", required=True)
    gen.add_argument("--config")
    gen.set_defaults(func=cmd_gen_synth)

    tr = sub.add_parser("train", help="train a similarity model")
    tr.add_argument("--manifest", required=True)
    tr.add_argument("--out", required=True)
    tr.add_argument("--mode", choices=["woven", "baseline"])
    tr.add_argument("--qubits", type=int)
    tr.add_argument("--layers", type=int)
    tr.add_argument("--learning-rate", type=float, dest="learning_rate")
    tr.add_argument("--batch-size", type=int, dest="batch_size")
    tr.add_argument("--epochs", type=int)
    tr.add_argument("--alpha", type=float)
    tr.add_argument("--beta", type=float)
    tr.add_argument("--objective", choices=["l1", "l2"])
    tr.add_argument("--gradient-mode", choices=["parameter_shift", "finite_difference"], dest="gradient_mode")
    tr.add_argument("--triplets", type=int)
    tr.add_argument("--seed", type=int)
    tr.add_argument("--split-seed", type=int, dest="split_seed")
    tr.add_argument("--train-fraction", type=float, dest="train_fraction")
    tr.add_argument("--resample-each-epoch", action=argparse.BooleanOptionalAction, dest="resample_each_epoch")
    tr.add_argument("--margin", type=float)
    tr.add_argument("--workers", type=int)
    tr.add_argument("--config")
    tr.set_defaults(func=cmd_train)

    rank = sub.add_parser("eval-rank", help="rank candidates against histogram ground truth")
    rank.add_argument("--model", required=True)
    rank.add_argument("--manifest", required=True)
    rank.add_argument("--out", required=True)
    rank.add_argument("--anchors", type=int)
    rank.add_argument("--candidates", type=int)
    rank.add_argument("--seed", type=int)
    rank.add_argument("--split-seed", type=int, dest="split_seed")
    rank.add_argument("--metric", choices=["l1", "l2"])
    rank.add_argument("--workers", type=int)
    rank.add_argument("--config")
    rank.set_defaults(func=cmd_eval_rank)

    cls = sub.add_parser("eval-classify", help="GMM clustering accuracy of embeddings")
    cls.add_argument("--model", required=True)
    cls.add_argument("--manifest", required=True)
    cls.add_argument("--out", required=True)
    cls.add_argument("--n-fit", type=int, dest="n_fit")
    cls.add_argument("--seed", type=int)
    cls.add_argument("--split-seed", type=int, dest="split_seed")
    cls.add_argument("--workers", type=int)
    cls.add_argument("--config")
    cls.set_defaults(func=cmd_eval_classify)

    var = sub.add_parser("eval-variance", help="projection variance under input-order swap")
    var.add_argument("--model", required=True)
    var.add_argument("--manifest", required=True)
    var.add_argument("--out", required=True)
    var.add_argument("--pairs", type=int)
    var.add_argument("--seed", type=int)
    var.add_argument("--split-seed", type=int, dest="split_seed")
    var.add_argument("--workers", type=int)
    var.add_argument("--config")
    var.set_defaults(func=cmd_eval_variance)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
