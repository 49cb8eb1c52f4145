"""The layered ansatz: rotations plus a CX ring, measured as projections.

Run with: python demos/02_variational_circuit.py
"""
import numpy as np

from qsimnet import (
    baseline_spec,
    init_parameters,
    measure_projection,
    parameter_count,
    run_circuit,
    woven_spec,
)

# A woven spec measures four designated qubits (two for the anchor, two for
# its partner); the baseline spec measures two. Parameters: 3 per qubit per
# layer, so the 4-qubit 4-layer circuit has 48 tunable angles.
spec = woven_spec(4, 4)
print("parameters for 4 qubits x 4 layers:", parameter_count(spec))
print("measured qubits:", spec.measured_qubits, "anchor slots:", spec.anchor_slots)

# With all angles at zero each layer reduces to the CX ring, which fixes
# |0...0>: every projection coordinate stays at +1.
basis_input = np.eye(spec.dim)[0]
state = run_circuit(basis_input, spec, np.zeros(parameter_count(spec)))
print("zero-angle projection of e0:", measure_projection(state, spec))

# Random angles scatter the projection inside [-1, 1]^4 and keep the state
# normalized.
rng = np.random.default_rng(0)
params = init_parameters(spec, rng)
state = run_circuit(rng.uniform(0.1, 1.0, spec.dim), spec, params)
print("random-angle projection:", np.round(measure_projection(state, spec), 4))
print("norm:", state.norm())

# The baseline network uses one less qubit for the same features because it
# embeds a single sample instead of an interwoven pair.
bspec = baseline_spec(3, 4)
print("baseline measured qubits:", bspec.measured_qubits)
print("baseline parameters:", parameter_count(bspec))
