"""Dense statevector simulator for small variational circuits.

Qubit ordering is little-endian everywhere: qubit 0 is the least
significant bit of a basis-state index, so index k encodes the basis
state |q_{n-1} ... q_1 q_0> with q_j = (k >> j) & 1.

Expectation values are exact marginals computed from the amplitudes;
there is no shot sampling.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import DegenerateInputError, ResourceError, ShapeError

MAX_QUBITS = 24


@dataclass
class StateVector:
    """Complex amplitudes of an n-qubit register, flat array of length 2**n."""

    n_qubits: int
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def init_zero(n_qubits: int) -> StateVector:
    """All-zeros basis state |0...0>."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ResourceError(
            f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}"
        )
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def load_amplitudes(values) -> StateVector:
    """Embed a real vector as normalized amplitudes (amplitude embedding).

    The length must be a power of two >= 2 and the vector must not be all
    zeros; the result has amplitudes values / ||values||_2.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or len(v) < 2 or (len(v) & (len(v) - 1)) != 0:
        raise ShapeError(f"amplitude vector length must be a power of two >= 2, got {v.shape}")
    n_qubits = int(len(v)).bit_length() - 1
    if n_qubits > MAX_QUBITS:
        raise ResourceError(f"vector of length {len(v)} needs {n_qubits} qubits > {MAX_QUBITS}")
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise DegenerateInputError("cannot embed the zero vector")
    return StateVector(n_qubits, (v / norm).astype(np.complex128))


def r3_matrix(p1: float, p2: float, p3: float) -> np.ndarray:
    """Three-parameter single-qubit rotation, ZYZ Euler convention.

    U(p1, p2, p3) = Rz(p3) @ Ry(p2) @ Rz(p1) with
      Rz(t) = [[e^{-it/2}, 0], [0, e^{it/2}]]
      Ry(t) = [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]
    """
    rz1 = np.array([[np.exp(-0.5j * p1), 0.0], [0.0, np.exp(0.5j * p1)]])
    ry = np.array(
        [[np.cos(p2 / 2), -np.sin(p2 / 2)], [np.sin(p2 / 2), np.cos(p2 / 2)]],
        dtype=np.complex128,
    )
    rz3 = np.array([[np.exp(-0.5j * p3), 0.0], [0.0, np.exp(0.5j * p3)]])
    return rz3 @ ry @ rz1


def _check_qubit(n_qubits: int, qubit: int) -> None:
    if not 0 <= qubit < n_qubits:
        raise IndexError(f"qubit {qubit} out of range for {n_qubits} qubits")


def apply_matrix_batch(states: np.ndarray, matrix: np.ndarray, qubit: int) -> np.ndarray:
    """Apply a 2**k x 2**k matrix to k adjacent qubits [qubit, qubit+k) of a
    [batch, 2**n] amplitude array."""
    batch, dim = states.shape
    block = matrix.shape[0]
    inner = 1 << qubit
    if inner == 1:
        view = states.reshape(-1, block)
        return (view @ matrix.T).reshape(batch, dim)
    view = states.reshape(-1, block, inner)
    return np.matmul(matrix, view).reshape(batch, dim)


@lru_cache(maxsize=None)
def _cx_permutation(n_qubits: int, control: int, target: int) -> np.ndarray:
    """Basis-index permutation realizing CX (an involution)."""
    k = np.arange(2**n_qubits)
    flip = ((k >> control) & 1).astype(bool)
    perm = np.where(flip, k ^ (1 << target), k)
    return perm


@lru_cache(maxsize=None)
def _z_signs(n_qubits: int, qubit: int) -> np.ndarray:
    """Vector of +-1 over basis indices: +1 where the qubit's bit is 0."""
    k = np.arange(2**n_qubits)
    return (1 - 2 * ((k >> qubit) & 1)).astype(np.float64)


def apply_r3(state: StateVector, qubit: int, p1: float, p2: float, p3: float) -> StateVector:
    """Apply the ZYZ rotation U(p1, p2, p3) to one qubit."""
    _check_qubit(state.n_qubits, qubit)
    amps = apply_matrix_batch(state.amplitudes[None, :], r3_matrix(p1, p2, p3), qubit)
    return StateVector(state.n_qubits, amps[0])


def apply_cx(state: StateVector, control: int, target: int) -> StateVector:
    """Controlled-NOT: flip the target bit where the control bit is 1."""
    _check_qubit(state.n_qubits, control)
    _check_qubit(state.n_qubits, target)
    if control == target:
        raise IndexError("control and target must differ")
    perm = _cx_permutation(state.n_qubits, control, target)
    return StateVector(state.n_qubits, state.amplitudes[perm])


def expectation_z(state: StateVector, qubit: int) -> float:
    """Exact Pauli-Z expectation of one qubit, in [-1, 1]."""
    _check_qubit(state.n_qubits, qubit)
    value = float(np.dot(state.probabilities(), _z_signs(state.n_qubits, qubit)))
    return value
