"""State preparation under the coupled Hamiltonian, plus named targets.

Preparation sequences are lists of gate tokens applied from |g...g>:
``pi_y(q)``, ``pi2_y(q)``, ``pi2_x(q)``, ``wait(duration)``, and
``wait_zz_pi`` (a free-evolution period of pi/|J| that flips the sign of
the doubly-excited amplitude, i.e. a controlled-phase).  All pulses
evolve under the full coupled generator, so "product" preparations come
out entangled whenever the coupling is nonzero — exactly what the
tomography drivers need as ground truth.

States are returned in the static frame at the end of the sequence,
which is where the tomography clock starts.
"""

import math
from dataclasses import dataclass

import numpy as np

from .evolve import sequence_propagator
from .model import AXIS_X_PHASE, AXIS_Y_PHASE, PulseSpec, amplitude_for_angle

__all__ = [
    "PrepStep",
    "prepare_state",
    "named_target",
    "NAMED_STATES",
]


@dataclass(frozen=True)
class PrepStep:
    """One preparation token: a pulse, or a wait."""

    kind: str  # pi_y | pi2_y | pi2_x | wait | wait_zz_pi
    qubit: int = 0
    duration: float = 0.0

    def __post_init__(self):
        if self.kind not in ("pi_y", "pi2_y", "pi2_x", "wait", "wait_zz_pi"):
            raise ValueError(f"unknown preparation token {self.kind!r}")
        if self.kind.startswith("pi") and self.qubit < 1:
            raise ValueError(f"{self.kind} needs a qubit index")
        if self.kind == "wait" and self.duration <= 0:
            raise ValueError("wait needs a positive duration")


def _total_coupling(system):
    return sum(abs(v) for v in system.coupling.values())


def prepare_state(steps, system, pulse_template):
    """Apply a token sequence from |g...g> under the coupled dynamics.

    ``pulse_template`` fixes the shape and per-qubit pi/2 durations of
    the preparation pulses; pi pulses run twice as long at the same
    amplitude.  Returns the normalized state vector (static frame).
    """
    shape = pulse_template.get("shape", "rectangular")
    durations = tuple(pulse_template["durations"])
    psi = np.zeros(system.dim, dtype=complex)
    psi[0] = 1.0
    for step in steps:
        if step.kind in ("pi_y", "pi2_y", "pi2_x"):
            dur = durations[step.qubit - 1]
            angle = math.pi / 2
            if step.kind == "pi_y":
                dur, angle = 2 * dur, math.pi
            phase = AXIS_X_PHASE if step.kind == "pi2_x" else AXIS_Y_PHASE
            amp = amplitude_for_angle(shape, angle, dur)
            pulse = PulseSpec(qubit=step.qubit, amplitude=amp, duration=dur,
                              phase=phase, shape=shape, t0=0.0)
            psi = sequence_propagator(system, [pulse], frame="static") @ psi
        elif step.kind == "wait":
            psi = _idle(system, step.duration) @ psi
        elif step.kind == "wait_zz_pi":
            if system.n_qubits != 2:
                raise ValueError("wait_zz_pi is defined for two qubits")
            j = system.j_value(1, 2)
            if j == 0.0:
                raise ValueError("wait_zz_pi is undefined without coupling")
            psi = _idle(system, math.pi / abs(j)) @ psi
    norm = np.linalg.norm(psi)
    return psi / norm


def _idle(system, duration):
    return sequence_propagator(system, [], t_start=0.0, t_end=duration,
                               frame="static")


def _ket(amplitudes):
    v = np.asarray(amplitudes, dtype=complex)
    return v / np.linalg.norm(v)


def _plus_n(n):
    v = np.ones(2**n, dtype=complex)
    return v / np.linalg.norm(v)


def _ghz(n):
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 1 / math.sqrt(2)
    return v


def _mixed_from(kets, weights):
    dim = kets[0].shape[0]
    rho = np.zeros((dim, dim), dtype=complex)
    for w, k in zip(weights, kets):
        rho += w * np.outer(k, k.conj())
    return rho


def _mixed3_parts():
    a = _ket([1, -1, 1j, 1, 1, 0, 0, 0])
    b = _ket([0, 0, 0, 0, 1, 1j, -1, 1])
    return a, b


#: Named target states understood by configs and the CLI.  Values are
#: (n_qubits, needs_coupled_prep, description).
NAMED_STATES = {
    "plus_plus": (2, False, "ideal product (|g>+|e>)(|g>+|e>)/2"),
    "bell": (2, False, "ideal Bell state (|gg>+|ee>)/sqrt(2)"),
    "mixed": (2, False, "0.8 plus_plus + 0.2 bell mixture"),
    "g_plus": (2, False, "qubit 1 in |g>, qubit 2 in |+>"),
    "coupled_plus_plus": (2, True,
                          "pi/2-y on each qubit under the coupling"),
    "coupled_plus_plus_cphase": (2, True,
                                 "coupled_plus_plus then a zz-pi wait"),
    "plus3": (3, False, "ideal product (|g>+|e>)^3 / (2 sqrt 2)"),
    "ghz3": (3, False, "(|ggg>+|eee>)/sqrt(2)"),
    "mixed3": (3, False, "0.8/0.2 mixture of two fixed 3-qubit kets"),
}


def named_target(name, system=None, pulse_template=None):
    """Resolve a state name to ``(rho, ket_or_None)``.

    Pure targets return their ket alongside the density matrix so
    downstream fidelity evaluation can use the cheap pure-state overlap;
    mixed targets return ``None`` and require the general fidelity.
    Coupled preparations need ``system`` and ``pulse_template``.
    """
    if name not in NAMED_STATES:
        raise ValueError(f"unknown state {name!r}; options: {sorted(NAMED_STATES)}")
    if name == "plus_plus":
        ket = _plus_n(2)
    elif name == "bell":
        ket = _ghz(2)
    elif name == "g_plus":
        ket = _ket([1, 1, 0, 0])
    elif name == "mixed":
        rho = _mixed_from([_plus_n(2), _ghz(2)], [0.8, 0.2])
        return rho, None
    elif name == "plus3":
        ket = _plus_n(3)
    elif name == "ghz3":
        ket = _ghz(3)
    elif name == "mixed3":
        a, b = _mixed3_parts()
        return _mixed_from([a, b], [0.8, 0.2]), None
    elif name in ("coupled_plus_plus", "coupled_plus_plus_cphase"):
        if system is None or pulse_template is None:
            raise ValueError(f"state {name!r} needs a system and pulse template")
        steps = [PrepStep("pi2_y", qubit=1), PrepStep("pi2_y", qubit=2)]
        if name.endswith("cphase"):
            steps.append(PrepStep("wait_zz_pi"))
        ket = prepare_state(steps, system, pulse_template)
    else:  # pragma: no cover
        raise AssertionError(name)
    return np.outer(ket, ket.conj()), ket
