"""Tour of the statevector simulator: states, gates, exact measurements.

Run with: python demos/01_simulator_basics.py
"""
import numpy as np

from qsimnet import apply_cx, apply_r3, expectation_z, init_zero, load_amplitudes

# Qubit 0 is the least significant bit of a basis index, so for two qubits
# the amplitude order is |00>, |01>, |10>, |11> reading q1 q0.
state = init_zero(2)
print("|00> amplitudes:", state.amplitudes)

# An R3 gate is the ZYZ Euler rotation Rz(p3) Ry(p2) Rz(p1). With p2 = pi
# and the other angles zero it acts like a bit flip on the target qubit.
flipped = apply_r3(state, 0, 0.0, np.pi, 0.0)
print("after Ry(pi) on qubit 0:", np.round(flipped.amplitudes, 6))
print("Z expectation of qubit 0:", expectation_z(flipped, 0))

# CX flips the target wherever the control bit is set, entangling nothing
# here because the state is still a basis state.
entangler = apply_cx(flipped, 0, 1)
print("after CX(0 -> 1):", np.round(entangler.amplitudes, 6))

# A half-angle rotation prepares a superposition; now the CX creates a Bell
# pair and both marginals sit at zero while the state stays normalized.
plus = apply_r3(init_zero(2), 0, 0.0, np.pi / 2, 0.0)
bell = apply_cx(plus, 0, 1)
print("Bell amplitudes:", np.round(bell.amplitudes, 6))
print("marginals:", expectation_z(bell, 0), expectation_z(bell, 1))
print("norm:", bell.norm())

# Amplitude embedding loads a classical vector as a normalized state. A
# 3-4-5 triangle makes the normalization visible.
embedded = load_amplitudes([3.0, 4.0, 0.0, 0.0])
print("embedded [3,4,0,0]:", embedded.amplitudes)
