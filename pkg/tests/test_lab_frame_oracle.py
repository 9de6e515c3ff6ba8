"""Validation against an untruncated lab-frame simulation.

The package propagates states in a rotating frame with the fast qubit
frequencies removed analytically.  This module rebuilds the physics with
nothing removed: the full lab-frame Schrodinger equation with
GHz-oscillating drive terms, integrated numerically and transformed into
the rotating frame afterwards.  Agreement is limited only by the
counter-rotating terms the rotating-frame model drops, which scale as
(drive rate) / (2 x qubit frequency).
"""

import numpy as np
from scipy.integrate import solve_ivp

from cctomo.evolve import sequence_propagator
from cctomo.io import MHZ
from cctomo.model import PulseSpec, SystemSpec

GHZ_ = 2 * np.pi * 1e9


def lab_frame_propagator(spec, omegas, pulses, t_end, rtol=1e-10):
    """Interaction-frame propagator from the raw lab-frame dynamics.

    Rectangular pulses only.  The drive on qubit q is the full
    ``A sin(omega_q t - phi) sigma_x`` term, counter-rotating part
    included; the frame transform exp(+i H0 t) is applied at the end.
    """
    dim, n = spec.dim, spec.n_qubits
    diag = np.zeros(dim)
    for s in range(dim):
        for q in range(1, n + 1):
            if s & spec.qubit_bit(q):
                diag[s] += omegas[q - 1]
        for (i, j), val in spec.coupling.items():
            mask = spec.qubit_bit(i) | spec.qubit_bit(j)
            if s & mask == mask:
                diag[s] += val
    h0 = np.diag(diag).astype(complex)

    flips = []
    for q in range(1, n + 1):
        m = np.zeros((dim, dim))
        bit = spec.qubit_bit(q)
        for s in range(dim):
            if not s & bit:
                m[s, s | bit] = m[s | bit, s] = 1.0
        flips.append(m)

    def rhs(t, y):
        h = h0.copy()
        for p in pulses:
            if p.t0 <= t <= p.t_end:
                drive = p.amplitude * np.sin(omegas[p.qubit - 1] * t - p.phase)
                h = h + drive * flips[p.qubit - 1]
        return (-1j * h @ y.reshape(dim, dim)).ravel()

    sol = solve_ivp(rhs, (0.0, t_end), np.eye(dim, dtype=complex).ravel(),
                    method="DOP853", rtol=rtol, atol=rtol * 1e-2,
                    max_step=2 * np.pi / max(omegas) / 20)
    assert sol.success
    u_lab = sol.y[:, -1].reshape(dim, dim)
    return np.diag(np.exp(1j * diag * t_end)) @ u_lab


def test_two_qubit_sequence_matches_lab_frame():
    spec = SystemSpec(n_qubits=2, coupling={(1, 2): -4.37 * MHZ})
    omegas = [3.49428 * GHZ_, 4.232 * GHZ_]
    t = 20e-9
    amp = np.pi / (2 * t)
    pulses = [
        PulseSpec(qubit=1, amplitude=amp, duration=t, phase=0.0),
        PulseSpec(qubit=2, amplitude=amp, duration=t, phase=-np.pi / 2, t0=t),
    ]
    oracle = lab_frame_propagator(spec, omegas, pulses, 2 * t)
    package = sequence_propagator(spec, pulses, frame="interaction")
    rwa_scale = amp / (2 * min(omegas))
    # the package stores amplitudes in the conjugate phase convention
    assert np.max(np.abs(np.conj(oracle) - package)) < 3 * rwa_scale
    # the un-conjugated comparison must fail by a large margin: this pins
    # the package's phase convention against the raw dynamics
    assert np.max(np.abs(oracle - package)) > 0.05


def test_three_qubit_single_flip_rule_matches_lab_frame():
    # pairwise coupling, sequential pulses on all three qubits: checks the
    # generalized partner-conditioned phases with no rotating-frame input
    j = -6.0 * MHZ
    spec = SystemSpec(n_qubits=3,
                      coupling={(1, 2): j, (2, 3): j, (1, 3): 0.4 * j})
    omegas = [3.0 * GHZ_, 3.7 * GHZ_, 4.4 * GHZ_]
    t = 15e-9
    amp = np.pi / (2 * t)
    pulses = [
        PulseSpec(qubit=1, amplitude=amp, duration=t, phase=0.0),
        PulseSpec(qubit=2, amplitude=amp, duration=t, phase=-np.pi / 2, t0=t),
        PulseSpec(qubit=3, amplitude=amp, duration=t, phase=0.7, t0=2 * t),
    ]
    oracle = lab_frame_propagator(spec, omegas, pulses, 3 * t, rtol=1e-9)
    package = sequence_propagator(spec, pulses, frame="interaction")
    rwa_scale = amp / (2 * min(omegas))
    assert np.max(np.abs(np.conj(oracle) - package)) < 4 * rwa_scale
