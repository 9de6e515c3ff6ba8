"""What stray ZZ coupling does to tomography pre-rotations.

Builds the 9 pre-rotation unitaries for a coupled two-qubit pair, derives
the native measurement kets, and compares them with the ideal cardinal
points the conventional analysis assumes.
"""

import numpy as np

from cctomo import SystemSpec, build_prerotation_set, modified_projectors
from cctomo.io import MHZ

np.set_printoptions(precision=3, suppress=True)

# a pair with an always-on -4.37 MHz cross-Kerr shift, driven by 50 ns
# rectangular pi/2 pulses
coupled = SystemSpec(n_qubits=2, coupling={(1, 2): -4.37 * MHZ})
ideal = SystemSpec(n_qubits=2)
template = {
    "shape": "rectangular",
    "angles": (np.pi / 2, np.pi / 2),
    "durations": (50e-9, 50e-9),
}

prerot_coupled = build_prerotation_set(coupled, template)
prerot_ideal = build_prerotation_set(ideal, template)
native = modified_projectors(prerot_coupled)
cardinal = modified_projectors(prerot_ideal)

print("setting   max |native ket - cardinal ket|   (0 would mean no error)")
for label, nat, card in zip(prerot_coupled.labels, native.kets, cardinal.kets):
    # compare kets up to a global phase per ket
    drift = 0.0
    for a, b in zip(nat, card):
        overlap = np.vdot(b, a)
        drift = max(drift, np.max(np.abs(a - overlap / abs(overlap) * b)))
    print(f"  {'.'.join(label):6s}  {drift:.4f}")

print()
print("The identity setting is exact; every driven setting picks up a")
print("coupling-dependent tilt.  The kets remain orthonormal, so they are")
print("a perfectly good measurement basis -- just not the one the")
print("conventional analysis assumes.  The tilt lives on the components")
print("where the driven qubit's partner is excited -- setting A2.I,")
print("ket for outcome 01 (partner excited):")
j = prerot_coupled.labels.index(("A2", "I"))
print("  native  :", np.round(native.kets[j, 1], 3))
print("  cardinal:", np.round(cardinal.kets[j, 1], 3))

resolution = np.einsum("ka,kb->ab", native.kets[j], native.kets[j].conj())
print("  sum_k |xi_k><xi_k| == identity:",
      np.max(np.abs(resolution - np.eye(4))) < 1e-10)
