"""Reconstruction fidelity versus coupling strength, both estimators.

For each coupling value, noise-free counts are generated from the true
coupled dynamics and reconstructed twice: once pretending the pulses were
ideal (standard pipeline) and once against the native projectors
(coupling-compensated).  The compensated column stays at 1 while the
standard one degrades.
"""

from cctomo.drivers import run_coupling_sweep
from cctomo.io import parse_config

config = parse_config({
    "system": {"n_qubits": 2, "coupling_mhz": {"1-2": -4.37}},
    "pulses": {"shape": "rectangular", "pi2_durations_ns": [20.0, 20.0],
               "angles_pi": [0.5, 0.5]},
    "states": ["plus_plus", "bell", "mixed"],
    "shots": "exact",
    "sweep": {"parameter": "coupling_mhz",
              "grid": [0.0, -2.0, -4.0, -6.0, -8.0, -10.0]},
})

rows = run_coupling_sweep(config)

print("J/2pi (MHz)   state        standard   compensated")
for j_mhz in config.sweep_grid:
    for state in config.states:
        std = next(r["fidelity"] for r in rows
                   if r["coupling_mhz"] == j_mhz and r["state"] == state
                   and r["method"] == "mle-standard")
        cct = next(r["fidelity"] for r in rows
                   if r["coupling_mhz"] == j_mhz and r["state"] == state
                   and r["method"] == "mle-cct")
        print(f"  {j_mhz:8.1f}   {state:10s}   {std:.4f}     {cct:.6f}")

print()
print("Same data, two analyses: the compensation happens entirely in")
print("software, using knowledge of the system Hamiltonian.")
