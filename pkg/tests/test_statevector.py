import numpy as np
import pytest

from qsimnet import (
    DegenerateInputError,
    ResourceError,
    ShapeError,
    StateVector,
    apply_cx,
    apply_r3,
    expectation_z,
    init_zero,
    load_amplitudes,
)
from qsimnet.statevector import r3_matrix


def brute_force_z(state, qubit):
    """Independent oracle: explicit sum over every basis probability."""
    total = 0.0
    for k, amp in enumerate(state.amplitudes):
        sign = 1.0 if ((k >> qubit) & 1) == 0 else -1.0
        total += sign * abs(amp) ** 2
    return total


class TestInitZero:
    def test_one_qubit(self):
        assert np.array_equal(init_zero(1).amplitudes, [1, 0])

    def test_two_qubits(self):
        assert np.array_equal(init_zero(2).amplitudes, [1, 0, 0, 0])

    def test_guard_boundaries(self):
        with pytest.raises(ResourceError):
            init_zero(25)
        with pytest.raises(ResourceError):
            init_zero(0)


class TestLoadAmplitudes:
    def test_already_normalized(self):
        assert np.allclose(load_amplitudes([1, 0, 0, 0]).amplitudes, [1, 0, 0, 0])

    def test_three_four_five(self):
        assert np.allclose(load_amplitudes([3, 4, 0, 0]).amplitudes, [0.6, 0.8, 0, 0])

    def test_zero_vector_rejected(self):
        with pytest.raises(DegenerateInputError):
            load_amplitudes([0, 0])

    def test_non_power_of_two_rejected(self):
        with pytest.raises(ShapeError):
            load_amplitudes([1, 2, 3])

    def test_norm_exact(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            v = rng.normal(size=2 ** int(rng.integers(1, 6)))
            if np.linalg.norm(v) == 0:
                continue
            assert abs(load_amplitudes(v).norm() - 1.0) < 1e-12


class TestR3:
    def test_identity_angles(self):
        state = load_amplitudes(np.random.default_rng(0).uniform(0.1, 1, 8))
        out = apply_r3(state, 1, 0.0, 0.0, 0.0)
        assert np.allclose(out.amplitudes, state.amplitudes, atol=1e-12)

    def test_y_pi_flips_zero_to_one(self):
        # Ry(pi) on (1, 0)^T gives (0, 1)^T by direct matrix multiplication.
        out = apply_r3(init_zero(1), 0, 0.0, np.pi, 0.0)
        assert abs(abs(out.amplitudes[1]) - 1.0) < 1e-12

    def test_inverse_angles_roundtrip(self):
        rng = np.random.default_rng(3)
        state = load_amplitudes(rng.uniform(0.1, 1, 16))
        a, b, c = rng.uniform(0, 2 * np.pi, 3)
        out = apply_r3(apply_r3(state, 2, a, b, c), 2, -c, -b, -a)
        assert np.allclose(out.amplitudes, state.amplitudes, atol=1e-10)

    def test_matrix_is_unitary(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            u = r3_matrix(*rng.uniform(-10, 10, 3))
            assert np.allclose(u @ u.conj().T, np.eye(2), atol=1e-12)

    def test_qubit_out_of_range(self):
        with pytest.raises(IndexError):
            apply_r3(init_zero(2), 2, 0.1, 0.2, 0.3)


class TestCX:
    def test_truth_table(self):
        # |10> in little-endian order is index 1 (qubit 0 set).
        state = StateVector(2, np.array([0, 1, 0, 0], dtype=np.complex128))
        out = apply_cx(state, 0, 1)
        assert np.allclose(out.amplitudes, [0, 0, 0, 1])

    def test_zero_state_fixed(self):
        out = apply_cx(init_zero(2), 0, 1)
        assert np.allclose(out.amplitudes, [1, 0, 0, 0])

    def test_involution(self):
        rng = np.random.default_rng(11)
        state = load_amplitudes(rng.uniform(0.1, 1, 8))
        out = apply_cx(apply_cx(state, 2, 0), 2, 0)
        assert np.allclose(out.amplitudes, state.amplitudes, atol=1e-12)

    def test_index_errors(self):
        state = init_zero(2)
        with pytest.raises(IndexError):
            apply_cx(state, 0, 0)
        with pytest.raises(IndexError):
            apply_cx(state, 0, 2)


class TestExpectationZ:
    def test_basis_states(self):
        assert expectation_z(init_zero(1), 0) == 1.0
        one = StateVector(1, np.array([0, 1], dtype=np.complex128))
        assert expectation_z(one, 0) == -1.0

    def test_equal_superposition(self):
        plus = load_amplitudes([1, 1])
        assert abs(expectation_z(plus, 0)) < 1e-12

    def test_matches_brute_force(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            n = int(rng.integers(1, 6))
            state = load_amplitudes(rng.uniform(0.01, 1, 2**n))
            for _ in range(4):
                state = apply_r3(state, int(rng.integers(n)), *rng.uniform(0, 2 * np.pi, 3))
            for q in range(n):
                z = expectation_z(state, q)
                assert -1.0 <= z <= 1.0
                assert abs(z - brute_force_z(state, q)) < 1e-12


class TestInvariants:
    def test_unitarity_random_circuits(self):
        rng = np.random.default_rng(17)
        for _ in range(1000):
            n = int(rng.integers(2, 7))
            state = load_amplitudes(rng.uniform(0.01, 1, 2**n))
            for _ in range(6):
                if rng.random() < 0.5:
                    state = apply_r3(state, int(rng.integers(n)), *rng.uniform(0, 2 * np.pi, 3))
                else:
                    c, t = rng.choice(n, size=2, replace=False)
                    state = apply_cx(state, int(c), int(t))
            assert abs(state.norm() - 1.0) < 1e-9

    def test_linearity(self):
        rng = np.random.default_rng(19)
        for _ in range(50):
            n = int(rng.integers(1, 5))
            psi1 = load_amplitudes(rng.uniform(0.01, 1, 2**n)).amplitudes
            psi2 = load_amplitudes(rng.uniform(0.01, 1, 2**n)).amplitudes
            a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
            mixed = StateVector(n, a * psi1 + b * psi2)
            q = int(rng.integers(n))
            angles = rng.uniform(0, 2 * np.pi, 3)
            evolved_mix = apply_r3(mixed, q, *angles).amplitudes
            separately = a * apply_r3(StateVector(n, psi1), q, *angles).amplitudes + b * apply_r3(
                StateVector(n, psi2), q, *angles
            ).amplitudes
            assert np.allclose(evolved_mix, separately, atol=1e-10)

    def test_cx_commutes_with_untouched_z(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            n = int(rng.integers(3, 6))
            state = load_amplitudes(rng.uniform(0.01, 1, 2**n))
            c, t = rng.choice(n, size=2, replace=False)
            spectators = [q for q in range(n) if q not in (c, t)]
            before = [expectation_z(state, q) for q in spectators]
            after_state = apply_cx(state, int(c), int(t))
            after = [expectation_z(after_state, q) for q in spectators]
            assert np.allclose(before, after, atol=1e-12)
