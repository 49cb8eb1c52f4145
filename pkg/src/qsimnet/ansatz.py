"""Layered variational circuit: per-layer R3 rotations plus a CX entangler ring.

A circuit with n qubits and L layers consumes 3*n*L angles. Layer l applies
one R3 per qubit in ascending qubit order (angles params[l, q, :]), followed
by the entangler chain CX(0,1), CX(1,2), ..., CX(n-2, n-1) and the ring
closure CX(n-1, 0) when n >= 3 (skipped at n=2 to avoid a duplicate pair).

Measured qubits are fixed by the CircuitSpec: the anchor is always read
from the same designated positions, independent of how inputs were
interleaved before embedding.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import DegenerateInputError, ShapeError, ValidationError
from .statevector import (
    MAX_QUBITS,
    StateVector,
    _cx_permutation,
    _z_signs,
    apply_matrix_batch,
    r3_matrix,
)


@dataclass(frozen=True)
class CircuitSpec:
    """Circuit topology plus the measurement designation.

    measured_qubits has 4 entries for the interwoven-pair (woven) network
    and 2 for the baseline triplet network. anchor_slots names the
    positions within measured_qubits reserved for the anchor; it is fixed
    to the first two positions and kept consistent through training and
    evaluation.
    """

    n_qubits: int
    n_layers: int
    measured_qubits: tuple
    anchor_slots: tuple = (0, 1)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValidationError(f"n_qubits must be in [1, {MAX_QUBITS}]")
        if self.n_layers < 1:
            raise ValidationError("n_layers must be positive")
        measured = tuple(self.measured_qubits)
        object.__setattr__(self, "measured_qubits", measured)
        object.__setattr__(self, "anchor_slots", tuple(self.anchor_slots))
        if len(set(measured)) != len(measured):
            raise ValidationError("measured_qubits must be distinct")
        if any(not 0 <= q < self.n_qubits for q in measured):
            raise ValidationError("measured_qubits must index existing qubits")
        if len(measured) not in (2, 4):
            raise ValidationError("measured_qubits must have 2 (baseline) or 4 (woven) entries")
        if self.anchor_slots != (0, 1):
            raise ValidationError("anchor_slots is fixed to the first two positions")

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @property
    def partner_slots(self) -> tuple:
        return tuple(i for i in range(len(self.measured_qubits)) if i not in self.anchor_slots)


def woven_spec(n_qubits: int, n_layers: int = 4) -> CircuitSpec:
    """Spec for the interwoven-pair network: four measured qubits."""
    return CircuitSpec(n_qubits, n_layers, (0, 1, 2, 3))


def baseline_spec(n_qubits: int, n_layers: int = 4) -> CircuitSpec:
    """Spec for the one-sample-per-run baseline: two measured qubits."""
    return CircuitSpec(n_qubits, n_layers, (0, 1))


def parameter_count_for(n_qubits: int, n_layers: int) -> int:
    """Number of tunable angles: 3 per qubit per layer."""
    return 3 * n_qubits * n_layers


def parameter_count(spec: CircuitSpec) -> int:
    return parameter_count_for(spec.n_qubits, spec.n_layers)


def entangler_pairs(n_qubits: int) -> tuple:
    """(control, target) pairs of the per-layer CX chain with ring closure."""
    pairs = [(i, i + 1) for i in range(n_qubits - 1)]
    if n_qubits >= 3:
        pairs.append((n_qubits - 1, 0))
    return tuple(pairs)


def init_parameters(spec: CircuitSpec, rng: np.random.Generator) -> np.ndarray:
    """Fresh parameters, uniform in [0, 2*pi)."""
    return rng.uniform(0.0, 2.0 * np.pi, size=parameter_count(spec))


def validate_parameters(spec: CircuitSpec, params) -> np.ndarray:
    p = np.asarray(params, dtype=np.float64)
    if p.shape != (parameter_count(spec),):
        raise ShapeError(
            f"expected {parameter_count(spec)} parameters for {spec.n_qubits} qubits "
            f"x {spec.n_layers} layers, got shape {p.shape}"
        )
    return p


class ExecutionCounter:
    """Counts circuit executions (state preparations run to measurement)."""

    def __init__(self):
        self.count = 0

    def add(self, k: int = 1):
        self.count += k

    def reset(self):
        self.count = 0


execution_counter = ExecutionCounter()


@lru_cache(maxsize=None)
def _entangler_permutation(n_qubits: int) -> np.ndarray:
    """All CX gates of one entangler block composed into a single permutation."""
    perm = np.arange(2**n_qubits)
    for control, target in reversed(entangler_pairs(n_qubits)):
        perm = _cx_permutation(n_qubits, control, target)[perm]
    return perm


@lru_cache(maxsize=None)
def _measurement_signs(n_qubits: int, measured_qubits: tuple) -> np.ndarray:
    """[2**n, m] matrix of +-1 so that coords = probabilities @ signs."""
    return np.stack([_z_signs(n_qubits, q) for q in measured_qubits], axis=1)


def embed_batch(inputs: np.ndarray) -> np.ndarray:
    """Normalize each row of a [batch, 2**n] real array into amplitudes."""
    v = np.asarray(inputs, dtype=np.float64)
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise DegenerateInputError("cannot embed a zero vector")
    return (v / norms).astype(np.complex128)


def rotation_layer_batch(states: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Apply one R3 per qubit (same angles for every batch row).

    Adjacent qubits are fused into one block matrix (kron of their 2x2
    rotations, high qubit first) so the pass costs few large matmuls.
    """
    n = int(states.shape[1]).bit_length() - 1
    q = 0
    while q < n:
        k = min(3, n - q)
        fused = r3_matrix(*angles[q + k - 1])
        for t in range(k - 2, -1, -1):
            fused = np.kron(fused, r3_matrix(*angles[q + t]))
        states = apply_matrix_batch(states, fused, q)
        q += k
    return states


def entangle_batch(states: np.ndarray, n_qubits: int) -> np.ndarray:
    return states[:, _entangler_permutation(n_qubits)]


def run_embedded_batch(states: np.ndarray, spec: CircuitSpec, params) -> np.ndarray:
    """Run the layered circuit on already-embedded amplitude rows."""
    p = validate_parameters(spec, params).reshape(spec.n_layers, spec.n_qubits, 3)
    for layer in range(spec.n_layers):
        states = rotation_layer_batch(states, p[layer])
        states = entangle_batch(states, spec.n_qubits)
    execution_counter.add(states.shape[0])
    return states


def run_circuit_batch(inputs: np.ndarray, spec: CircuitSpec, params) -> np.ndarray:
    """Run the full circuit on every row of [batch, 2**n] inputs."""
    if inputs.shape[1] != spec.dim:
        raise ShapeError(f"input rows have length {inputs.shape[1]}, circuit needs {spec.dim}")
    return run_embedded_batch(embed_batch(inputs), spec, params)


def run_circuit(input_vector, spec: CircuitSpec, params) -> StateVector:
    """Embed one input vector and run the layered circuit."""
    v = np.asarray(input_vector, dtype=np.float64)
    if v.shape != (spec.dim,):
        raise ShapeError(f"input has length {v.shape}, circuit needs {spec.dim}")
    states = run_circuit_batch(v[None, :], spec, params)
    return StateVector(spec.n_qubits, states[0])


def measure_batch(states: np.ndarray, spec: CircuitSpec) -> np.ndarray:
    """Z expectations of the measured qubits for every row, shape [batch, m]."""
    probs = np.abs(states) ** 2
    return probs @ _measurement_signs(spec.n_qubits, spec.measured_qubits)


def measure_projection(state: StateVector, spec: CircuitSpec) -> np.ndarray:
    """Projection coordinates of one state, in measured_qubits order."""
    if state.n_qubits != spec.n_qubits:
        raise ShapeError(f"state has {state.n_qubits} qubits, spec expects {spec.n_qubits}")
    return measure_batch(state.amplitudes[None, :], spec)[0]
