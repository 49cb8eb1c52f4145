"""Forward protocols and minibatch gradient-descent training.

The interwoven-pair (woven) network evaluates each triplet with two runs:
the (anchor, positive) pair and the (negative, anchor) pair, where the
anchor occupies the second interleave slot in the second run. The anchor
is always read from the same designated measurement positions in both
runs; the consistency loss penalizes its projection drifting between them.
The objective term compares each run's anchor projection with that run's
partner projection. The baseline network embeds the three samples one by
one (three runs) and uses the squared-distance triplet loss.

Gradients: parameter_shift evaluates every measured expectation at angle
shifts of +-pi/2 and chains through the classical loss derivatives;
finite_difference centrally differences the scalar loss with h = 1e-4.
Both are exact/valid because each circuit angle generates a rotation with
half-integer spectrum, making every expectation a sinusoid in the angle.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ansatz import (
    CircuitSpec,
    entangle_batch,
    execution_counter,
    embed_batch,
    init_parameters,
    measure_batch,
    parameter_count,
    rotation_layer_batch,
    run_circuit,
    measure_projection,
    validate_parameters,
)
from .data import make_triplets_labeled, make_triplets_unlabeled, prepare_pair_input, prepare_single_input
from .exceptions import ValidationError
from .losses import LossWeights
from .statevector import apply_matrix_batch, r3_matrix

GRADIENT_MODES = ("parameter_shift", "finite_difference")
MODES = ("woven", "baseline")
FD_STEP = 1e-4


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    batch_size: int = 30
    epochs: int = 500
    n_layers: int = 4
    weights: LossWeights = field(default_factory=LossWeights)
    gradient_mode: str = "parameter_shift"
    rng_seed: int = 0
    mode: str = "woven"
    objective: str | None = None  # None: "l1" for woven, "l2" for baseline
    n_triplets: int = 100
    resample_each_epoch: bool = False
    margin: float | None = None

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 1 or self.epochs < 0:
            raise ValidationError("learning_rate > 0, batch_size >= 1, epochs >= 0 required")
        if self.n_layers < 1 or self.n_triplets < 1:
            raise ValidationError("n_layers and n_triplets must be positive")
        if self.gradient_mode not in GRADIENT_MODES:
            raise ValidationError(f"gradient_mode must be one of {GRADIENT_MODES}")
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")
        if self.objective not in (None, "l1", "l2"):
            raise ValidationError("objective must be 'l1', 'l2' or None")

    @property
    def resolved_objective(self) -> str:
        if self.objective is not None:
            return self.objective
        return "l1" if self.mode == "woven" else "l2"


@dataclass
class TrainedModel:
    spec: CircuitSpec
    params: np.ndarray
    loss_history: list
    config: TrainConfig


# ---------------------------------------------------------------------------
# Forward evaluation.


def _split_coords(coords: np.ndarray, spec: CircuitSpec) -> tuple:
    anchor = coords[list(spec.anchor_slots)]
    partner = coords[list(spec.partner_slots)]
    return anchor, partner


def forward_woven(params, spec: CircuitSpec, anchor_features, partner_features, anchor_slot: str = "first") -> np.ndarray:
    """One interwoven-pair run; returns (anchor_x, anchor_y, partner_x, partner_y).

    anchor_slot picks which interleave slot the anchor's features occupy;
    the measurement designation itself never moves.
    """
    if len(spec.measured_qubits) != 4:
        raise ValidationError("woven forward needs a 4-measurement spec")
    if anchor_slot not in ("first", "second"):
        raise ValidationError("anchor_slot must be 'first' or 'second'")
    if anchor_slot == "first":
        woven = prepare_pair_input(np.asarray(anchor_features), np.asarray(partner_features), spec)
    else:
        woven = prepare_pair_input(np.asarray(partner_features), np.asarray(anchor_features), spec)
    coords = measure_projection(run_circuit(woven, spec, params), spec)
    anchor, partner = _split_coords(coords, spec)
    return np.concatenate([anchor, partner])


def forward_baseline(params, spec: CircuitSpec, features) -> np.ndarray:
    """One single-sample run; returns the 2-coordinate projection."""
    if len(spec.measured_qubits) != 2:
        raise ValidationError("baseline forward needs a 2-measurement spec")
    padded = prepare_single_input(features, spec)
    return measure_projection(run_circuit(padded, spec, params), spec)


def _woven_loss_from_coords(c1: np.ndarray, c2: np.ndarray, weights: LossWeights, objective: str, margin: float | None = None):
    """Loss and its gradient w.r.t. the two runs' coordinates.

    c1 = (A_px, A_py, P_x, P_y) from the (anchor, positive) run and
    c2 = (A_nx, A_ny, N_x, N_y) from the (negative, anchor) run.
    """
    a1, p = c1[:2], c1[2:]
    a2, n = c2[:2], c2[2:]
    if objective == "l1":
        obj = float(np.sum(np.abs(a1 - p)) - np.sum(np.abs(a2 - n)))
        d_a1, d_p = np.sign(a1 - p), -np.sign(a1 - p)
        d_a2, d_n = -np.sign(a2 - n), np.sign(a2 - n)
    else:
        obj = float(np.sum((a1 - p) ** 2) - np.sum((a2 - n) ** 2))
        d_a1, d_p = 2 * (a1 - p), -2 * (a1 - p)
        d_a2, d_n = -2 * (a2 - n), 2 * (a2 - n)
    active = 1.0
    if margin is not None:
        clamped = max(obj + margin, 0.0)
        active = 0.0 if clamped == 0.0 else 1.0
        obj = clamped
    cons = float(np.sum(np.abs(a1 - a2)))
    s = np.sign(a1 - a2)
    loss = weights.alpha * obj + weights.beta * cons
    g1 = np.concatenate([weights.alpha * active * d_a1 + weights.beta * s, weights.alpha * active * d_p])
    g2 = np.concatenate([weights.alpha * active * d_a2 - weights.beta * s, weights.alpha * active * d_n])
    return loss, g1, g2


def _baseline_loss_from_coords(ca, cp, cn, weights: LossWeights, objective: str, margin: float | None = None):
    """Loss and gradient w.r.t. the three runs' 2-coordinate projections."""
    if objective == "l2":
        obj = float(np.sum((ca - cp) ** 2) - np.sum((ca - cn) ** 2))
        d_a = 2 * (ca - cp) - 2 * (ca - cn)
        d_p = -2 * (ca - cp)
        d_n = 2 * (ca - cn)
    else:
        obj = float(np.sum(np.abs(ca - cp)) - np.sum(np.abs(ca - cn)))
        d_a = np.sign(ca - cp) - np.sign(ca - cn)
        d_p = -np.sign(ca - cp)
        d_n = np.sign(ca - cn)
    active = 1.0
    if margin is not None:
        clamped = max(obj + margin, 0.0)
        active = 0.0 if clamped == 0.0 else 1.0
        obj = clamped
    loss = weights.alpha * obj
    scale = weights.alpha * active
    return loss, scale * d_a, scale * d_p, scale * d_n


def woven_triplet_loss(params, spec: CircuitSpec, anchor, positive, negative, weights: LossWeights | None = None, objective: str = "l1", margin: float | None = None) -> float:
    """Total loss of one triplet under the two-run interwoven protocol."""
    weights = weights or LossWeights()
    c1 = forward_woven(params, spec, anchor, positive, anchor_slot="first")
    c2 = forward_woven(params, spec, anchor, negative, anchor_slot="second")
    loss, _, _ = _woven_loss_from_coords(c1, c2, weights, objective, margin)
    return loss


def baseline_triplet_loss(params, spec: CircuitSpec, anchor, positive, negative, weights: LossWeights | None = None, objective: str = "l2", margin: float | None = None) -> float:
    """Triplet loss of the three-run baseline."""
    weights = weights or LossWeights()
    ca = forward_baseline(params, spec, anchor)
    cp = forward_baseline(params, spec, positive)
    cn = forward_baseline(params, spec, negative)
    loss, _, _, _ = _baseline_loss_from_coords(ca, cp, cn, weights, objective, margin)
    return loss


# ---------------------------------------------------------------------------
# Batched evaluation with one-parameter shifts.


def _runs_per_triplet(mode: str) -> int:
    return 2 if mode == "woven" else 3


def _triplet_inputs(features_by_id: dict, triplets, spec: CircuitSpec, mode: str) -> np.ndarray:
    """Raw circuit inputs, grouped per triplet in run order."""
    rows = []
    for t in triplets:
        a = features_by_id[t.anchor]
        p = features_by_id[t.positive]
        n = features_by_id[t.negative]
        if mode == "woven":
            rows.append(prepare_pair_input(a, p, spec))
            rows.append(prepare_pair_input(n, a, spec))
        else:
            rows.append(prepare_single_input(a, spec))
            rows.append(prepare_single_input(p, spec))
            rows.append(prepare_single_input(n, spec))
    return np.stack(rows)


def _forward_coords(embedded: np.ndarray, spec: CircuitSpec, params) -> np.ndarray:
    theta = validate_parameters(spec, params).reshape(spec.n_layers, spec.n_qubits, 3)
    states = embedded
    for layer in range(spec.n_layers):
        states = rotation_layer_batch(states, theta[layer])
        states = entangle_batch(states, spec.n_qubits)
    execution_counter.add(states.shape[0])
    return measure_batch(states, spec)


def _shifted_coords(embedded: np.ndarray, spec: CircuitSpec, params, delta: float):
    """Measured coordinates at params and at every one-angle +-delta shift.

    Returns (base [R, M], plus [P, R, M], minus [P, R, M]). Shift passes
    restart from per-layer checkpoints of the base evolution, so only the
    layers at and after the shifted gate are re-applied.
    """
    n, n_layers = spec.n_qubits, spec.n_layers
    theta = validate_parameters(spec, params).reshape(n_layers, n, 3)
    n_runs = embedded.shape[0]
    n_meas = len(spec.measured_qubits)
    n_params = parameter_count(spec)

    checkpoints = []
    states = embedded
    for layer in range(n_layers):
        checkpoints.append(states)
        states = rotation_layer_batch(states, theta[layer])
        states = entangle_batch(states, n)
    base = measure_batch(states, spec)
    execution_counter.add(n_runs)

    plus = np.empty((n_params, n_runs, n_meas))
    minus = np.empty((n_params, n_runs, n_meas))
    groups = 6 * n  # (qubit, angle, sign) combinations within one layer
    for layer in range(n_layers):
        block = np.tile(checkpoints[layer], (groups, 1))
        base_mats = [r3_matrix(*theta[layer, q]) for q in range(n)]
        for q in range(n):
            block = apply_matrix_batch(block, base_mats[q], q)
        # Undo the base rotation on the shifted gate's qubit and apply the
        # shifted one instead, only on that group's rows. The six groups of
        # one qubit (3 angles x 2 signs) are contiguous, so one einsum
        # applies all six correction matrices.
        for q in range(n):
            inv = base_mats[q].conj().T
            corrections = np.empty((6, 2, 2), dtype=np.complex128)
            for angle in range(3):
                for sign_idx, sign in enumerate((1.0, -1.0)):
                    shifted = theta[layer, q].copy()
                    shifted[angle] += sign * delta
                    corrections[2 * angle + sign_idx] = r3_matrix(*shifted) @ inv
            rows = slice(6 * q * n_runs, 6 * (q + 1) * n_runs)
            sub = block[rows]
            view = sub.reshape(6, -1, 2, 1 << q)
            block[rows] = np.matmul(corrections[:, None], view).reshape(sub.shape)
        block = entangle_batch(block, n)
        for later in range(layer + 1, n_layers):
            block = rotation_layer_batch(block, theta[later])
            block = entangle_batch(block, n)
        coords = measure_batch(block, spec).reshape(n, 3, 2, n_runs, n_meas)
        execution_counter.add(groups * n_runs)
        offset = layer * n * 3
        plus[offset : offset + 3 * n] = coords[:, :, 0].reshape(3 * n, n_runs, n_meas)
        minus[offset : offset + 3 * n] = coords[:, :, 1].reshape(3 * n, n_runs, n_meas)
    return base, plus, minus


def _batch_losses_and_coord_grads(coords: np.ndarray, config: TrainConfig):
    """Per-triplet losses plus the loss gradient w.r.t. every run coordinate."""
    runs = _runs_per_triplet(config.mode)
    n_triplets = coords.shape[0] // runs
    losses = np.empty(n_triplets)
    grads = np.zeros_like(coords)
    objective = config.resolved_objective
    for t in range(n_triplets):
        if config.mode == "woven":
            c1, c2 = coords[2 * t], coords[2 * t + 1]
            losses[t], grads[2 * t], grads[2 * t + 1] = _woven_loss_from_coords(
                c1, c2, config.weights, objective, config.margin
            )
        else:
            ca, cp, cn = coords[3 * t], coords[3 * t + 1], coords[3 * t + 2]
            losses[t], grads[3 * t], grads[3 * t + 1], grads[3 * t + 2] = _baseline_loss_from_coords(
                ca, cp, cn, config.weights, objective, config.margin
            )
    return losses, grads


def _batch_losses_only(coords: np.ndarray, config: TrainConfig) -> np.ndarray:
    losses, _ = _batch_losses_and_coord_grads(coords, config)
    return losses


def gradient(params, spec: CircuitSpec, batch, config: TrainConfig, features_by_id: dict | None = None):
    """Gradient of the mean batch loss w.r.t. every circuit parameter.

    batch is a list of Triplets (with features_by_id mapping ids to feature
    vectors). Returns (gradient [P], mean batch loss).
    """
    if len(batch) == 0:
        raise ValidationError("gradient needs a non-empty batch")
    if features_by_id is None:
        raise ValidationError("features_by_id mapping is required")
    inputs = _triplet_inputs(features_by_id, batch, spec, config.mode)
    embedded = embed_batch(inputs)
    return _gradient_from_embedded(embedded, spec, params, config)


def _gradient_from_embedded(embedded: np.ndarray, spec: CircuitSpec, params, config: TrainConfig):
    n_triplets = embedded.shape[0] // _runs_per_triplet(config.mode)
    if config.gradient_mode == "parameter_shift":
        base, plus, minus = _shifted_coords(embedded, spec, params, np.pi / 2)
        losses, coord_grads = _batch_losses_and_coord_grads(base, config)
        dz = (plus - minus) / 2.0  # [P, R, M]
        grad = np.einsum("rm,prm->p", coord_grads, dz) / n_triplets
        return grad, float(np.mean(losses))
    base, plus, minus = _shifted_coords(embedded, spec, params, FD_STEP)
    losses = _batch_losses_only(base, config)
    n_params = parameter_count(spec)
    grad = np.empty(n_params)
    for j in range(n_params):
        loss_plus = float(np.mean(_batch_losses_only(plus[j], config)))
        loss_minus = float(np.mean(_batch_losses_only(minus[j], config)))
        grad[j] = (loss_plus - loss_minus) / (2.0 * FD_STEP)
    return grad, float(np.mean(losses))


# ---------------------------------------------------------------------------
# Training loop.


def _make_triplets(dataset, config: TrainConfig, seed: int):
    labeled = all(s.label is not None for s in dataset)
    if labeled:
        return make_triplets_labeled(dataset, config.n_triplets, seed)
    return make_triplets_unlabeled(dataset, config.n_triplets, seed)


def train(dataset, spec: CircuitSpec, config: TrainConfig) -> TrainedModel:
    """Plain minibatch gradient descent; deterministic under config.rng_seed."""
    rng = np.random.default_rng(config.rng_seed)
    params = init_parameters(spec, rng)
    triplet_seed = int(rng.integers(0, 2**31 - 1))
    triplets = _make_triplets(dataset, config, triplet_seed)
    features_by_id = {s.id: s.features for s in dataset}

    inputs = _triplet_inputs(features_by_id, triplets, spec, config.mode)
    embedded = embed_batch(inputs)
    runs = _runs_per_triplet(config.mode)

    history = []
    for epoch in range(config.epochs):
        if config.resample_each_epoch and epoch > 0:
            triplets = _make_triplets(dataset, config, triplet_seed + epoch)
            inputs = _triplet_inputs(features_by_id, triplets, spec, config.mode)
            embedded = embed_batch(inputs)
        order = rng.permutation(len(triplets))
        epoch_losses = []
        for start in range(0, len(triplets), config.batch_size):
            chosen = order[start : start + config.batch_size]
            row_idx = np.concatenate([np.arange(t * runs, (t + 1) * runs) for t in chosen])
            grad, mean_loss = _gradient_from_embedded(embedded[row_idx], spec, params, config)
            params = params - config.learning_rate * grad
            epoch_losses.extend([mean_loss] * len(chosen))
        history.append(float(np.mean(epoch_losses)))
    return TrainedModel(spec=spec, params=np.asarray(params, dtype=np.float64), loss_history=history, config=config)


# ---------------------------------------------------------------------------
# Model serialization.


def model_to_dict(model: TrainedModel) -> dict:
    cfg = model.config
    return {
        "mode": cfg.mode,
        "spec": {
            "n_qubits": model.spec.n_qubits,
            "n_layers": model.spec.n_layers,
            "measured_qubits": list(model.spec.measured_qubits),
            "anchor_slots": list(model.spec.anchor_slots),
        },
        "params": [float(x) for x in model.params],
        "loss_history": [float(x) for x in model.loss_history],
        "config": {
            "learning_rate": cfg.learning_rate,
            "batch_size": cfg.batch_size,
            "epochs": cfg.epochs,
            "n_layers": cfg.n_layers,
            "weights": {"alpha": cfg.weights.alpha, "beta": cfg.weights.beta},
            "gradient_mode": cfg.gradient_mode,
            "rng_seed": cfg.rng_seed,
            "mode": cfg.mode,
            "objective": cfg.objective,
            "n_triplets": cfg.n_triplets,
            "resample_each_epoch": cfg.resample_each_epoch,
            "margin": cfg.margin,
        },
    }


def save_model(model: TrainedModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2, sort_keys=True) + "\n")


def model_from_dict(payload: dict) -> TrainedModel:
    spec = CircuitSpec(
        n_qubits=payload["spec"]["n_qubits"],
        n_layers=payload["spec"]["n_layers"],
        measured_qubits=tuple(payload["spec"]["measured_qubits"]),
        anchor_slots=tuple(payload["spec"]["anchor_slots"]),
    )
    cfg_d = dict(payload["config"])
    cfg_d["weights"] = LossWeights(**cfg_d["weights"])
    config = TrainConfig(**cfg_d)
    params = validate_parameters(spec, np.array(payload["params"], dtype=np.float64))
    return TrainedModel(spec=spec, params=params, loss_history=list(payload["loss_history"]), config=config)


def load_model(path) -> TrainedModel:
    return model_from_dict(json.loads(Path(path).read_text()))
