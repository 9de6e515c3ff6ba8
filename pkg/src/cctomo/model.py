"""System and drive model for ZZ-coupled qubits in the rotating frame.

``SystemSpec`` holds qubit count, bare frequencies, and the symmetric
pairwise ZZ coupling map.  ``PulseSpec`` describes one resonant drive
segment (rectangular or Gaussian envelope).  The functions below build
the rotating-frame generators that every propagator in this package
integrates.

Conventions
-----------
All internal frequencies and couplings are angular (rad/s); file formats
quote J/2pi in MHz and durations in ns, converted once at the I/O
boundary.  States are expressed in a frame co-rotating with each qubit's
partner-ground transition.  Two equivalent pictures of the residual
dynamics are provided:

* ``static`` frame: the generator carries the coupling on its diagonal
  and static drive phases.  Idle evolution multiplies the amplitude of a
  configuration with qubits i and j both excited by exp(+i J_ij t).
* ``interaction`` frame: the generator has zero diagonal and the
  coupling appears as explicit time-dependent phases exp(+i J t) on
  partner-excited transitions.  Idle evolution is the identity.

The two are related by the diagonal gauge :func:`coupling_gauge`.  A
pulse of integrated angle theta and phase phi on one qubit (partners in
the ground state) enacts the rotation

    R(theta, phi) = [[cos(theta/2), -exp(+i phi) sin(theta/2)],
                     [exp(-i phi) sin(theta/2), cos(theta/2)]]

so phi = 0 drives a +y rotation and phi = -pi/2 is used as the x-type
tomography axis.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

__all__ = [
    "SystemSpec",
    "PulseSpec",
    "AXIS_X_PHASE",
    "AXIS_Y_PHASE",
    "envelope",
    "amplitude_for_angle",
    "coupling_hamiltonian",
    "rwa_drive_hamiltonian",
    "static_generator",
    "coupling_gauge",
    "single_qubit_rotation",
]

#: Drive phases selecting the standard tomography axes.
AXIS_X_PHASE = -math.pi / 2
AXIS_Y_PHASE = 0.0

GAUSSIAN_CUTOFF_SIGMAS = 2.0  # envelope support is +-2 sigma around the peak


@dataclass(frozen=True)
class SystemSpec:
    """N qubits with pairwise ZZ coupling.

    Parameters
    ----------
    n_qubits : int
    coupling : dict
        Angular coupling strengths keyed by 1-based qubit pairs
        ``(i, j)`` with i < j.  Missing pairs are zero.
    omega : tuple of float, optional
        Bare angular frequencies; absorbed by the rotating frame and kept
        only for bookkeeping.
    """

    n_qubits: int
    coupling: dict = field(default_factory=dict)
    omega: tuple = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        norm = {}
        for (i, j), val in dict(self.coupling).items():
            if i == j:
                raise ValueError(f"self-coupling ({i},{j}) is not allowed")
            if not (1 <= i <= self.n_qubits and 1 <= j <= self.n_qubits):
                raise ValueError(f"coupling pair ({i},{j}) out of range")
            key = (min(i, j), max(i, j))
            if key in norm and norm[key] != val:
                raise ValueError(f"conflicting values for pair {key}")
            norm[key] = float(val)
        object.__setattr__(self, "coupling", norm)
        if self.omega and len(self.omega) != self.n_qubits:
            raise ValueError("omega must have one entry per qubit")

    @property
    def dim(self):
        return 2**self.n_qubits

    def j_value(self, i, j):
        return self.coupling.get((min(i, j), max(i, j)), 0.0)

    def qubit_bit(self, qubit):
        """Bit mask of a 1-based qubit index (qubit 1 = most significant)."""
        if not 1 <= qubit <= self.n_qubits:
            raise ValueError(f"qubit index {qubit} out of range")
        return 1 << (self.n_qubits - qubit)


@dataclass(frozen=True)
class PulseSpec:
    """One resonant drive segment on a single qubit.

    ``amplitude`` is the peak angular Rabi rate (rad/s); the integrated
    rotation angle when partners sit in |g> is ``amplitude * duration``
    for rectangular pulses and follows the calibrated area for Gaussian
    ones.  ``t0`` is the segment start on the shared time axis.
    """

    qubit: int
    amplitude: float
    duration: float
    phase: float = 0.0
    shape: str = "rectangular"
    t0: float = 0.0

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("pulse duration must be positive")
        if self.shape not in ("rectangular", "gaussian"):
            raise ValueError(f"unknown pulse shape {self.shape!r}")
        object.__setattr__(self, "phase", float(self.phase) % (2 * math.pi))

    @property
    def sigma(self):
        """Gaussian width; duration is fixed at 4 sigma (cutoff +-2 sigma)."""
        if self.shape != "gaussian":
            raise ValueError("sigma is defined for gaussian pulses only")
        return self.duration / (2 * GAUSSIAN_CUTOFF_SIGMAS)

    @property
    def t_end(self):
        return self.t0 + self.duration

    def angle(self):
        """Integrated rotation angle over the full window."""
        if self.shape == "rectangular":
            return self.amplitude * self.duration
        sig = self.sigma
        return self.amplitude * sig * math.sqrt(2 * math.pi) * erf(
            GAUSSIAN_CUTOFF_SIGMAS / math.sqrt(2)
        )


def envelope(shape, amplitude, duration, t_rel):
    """Instantaneous drive rate at time ``t_rel`` into the pulse window.

    Rectangular pulses are constant; Gaussian pulses are
    ``A exp(-(t - 2 sigma)^2 / (2 sigma^2))`` on [0, 4 sigma].
    """
    if t_rel < 0 or t_rel > duration:
        raise ValueError(
            f"t_rel={t_rel!r} outside the pulse window [0, {duration!r}]"
        )
    if shape == "rectangular":
        return float(amplitude)
    if shape == "gaussian":
        sigma = duration / (2 * GAUSSIAN_CUTOFF_SIGMAS)
        arg = (t_rel - 2 * sigma) / sigma
        return float(amplitude * math.exp(-0.5 * arg * arg))
    raise ValueError(f"unknown pulse shape {shape!r}")


def amplitude_for_angle(shape, angle, duration):
    """Peak amplitude so the integrated envelope equals ``angle``.

    The Gaussian calibration uses the exact error-function integral of
    the truncated envelope rather than a quadrature, so it carries no
    step-size dependence.
    """
    if duration <= 0:
        raise ValueError("duration must be positive")
    if shape == "rectangular":
        return float(angle / duration)
    if shape == "gaussian":
        sigma = duration / (2 * GAUSSIAN_CUTOFF_SIGMAS)
        area = sigma * math.sqrt(2 * math.pi) * erf(
            GAUSSIAN_CUTOFF_SIGMAS / math.sqrt(2)
        )
        return float(angle / area)
    raise ValueError(f"unknown pulse shape {shape!r}")


def coupling_hamiltonian(spec):
    """Diagonal ZZ term: sum over pairs of J_ij on both-excited states."""
    dim = spec.dim
    diag = np.zeros(dim)
    for (i, j), val in spec.coupling.items():
        mask = spec.qubit_bit(i) | spec.qubit_bit(j)
        for s in range(dim):
            if s & mask == mask:
                diag[s] += val
    h = np.zeros((dim, dim), dtype=complex)
    np.fill_diagonal(h, diag)
    return h


def _pair_phase(spec, qubit, state):
    """Total coupling rate seen by ``qubit`` given its partners' occupation."""
    total = 0.0
    for other in range(1, spec.n_qubits + 1):
        if other != qubit and state & spec.qubit_bit(other):
            total += spec.j_value(qubit, other)
    return total


def _check_distinct_targets(pulses):
    seen = set()
    for p in pulses:
        if p.qubit in seen:
            raise ValueError(
                f"overlapping drive: two active pulses target qubit {p.qubit}"
            )
        seen.add(p.qubit)


def _active(pulses, t):
    # tolerate float roundoff at window edges (integrators and chained
    # segment arithmetic both land exactly on them)
    act = []
    for p in pulses:
        slack = 1e-9 * p.duration
        if p.t0 - slack <= t <= p.t_end + slack:
            act.append(p)
    _check_distinct_targets(act)
    return act


def _clamped_rate(pulse, t):
    t_rel = min(max(t - pulse.t0, 0.0), pulse.duration)
    return envelope(pulse.shape, pulse.amplitude, pulse.duration, t_rel)


def rwa_drive_hamiltonian(spec, active_pulses, t):
    """Interaction-frame generator at absolute time ``t``.

    Zero diagonal; each active pulse on qubit q contributes
    ``-i a(t)/2 exp(+i (phi + J_eff t))`` on the q-flip transitions,
    where J_eff sums the couplings to excited partners.  With no active
    pulse the generator vanishes (idle evolution is the identity in this
    frame).
    """
    dim = spec.dim
    h = np.zeros((dim, dim), dtype=complex)
    for pulse in _active(active_pulses, t):
        rate = _clamped_rate(pulse, t)
        bit = spec.qubit_bit(pulse.qubit)
        for s in range(dim):
            if s & bit:
                continue
            phase = pulse.phase + _pair_phase(spec, pulse.qubit, s) * t
            h[s, s | bit] += -0.5j * rate * np.exp(1j * phase)
    return h + h.conj().T - np.diag(np.diag(h))


def static_generator(spec, active_pulses, t):
    """Static-frame generator at absolute time ``t``.

    Carries ``-J`` on the both-excited diagonal entries (so that idle
    evolution advances those amplitudes as exp(+iJt)) and static drive
    phases on the flip transitions.
    """
    dim = spec.dim
    h = np.zeros((dim, dim), dtype=complex)
    for pulse in _active(active_pulses, t):
        rate = _clamped_rate(pulse, t)
        bit = spec.qubit_bit(pulse.qubit)
        for s in range(dim):
            if s & bit:
                continue
            h[s, s | bit] += -0.5j * rate * np.exp(1j * pulse.phase)
    h = h + h.conj().T
    h -= coupling_hamiltonian(spec)
    return h


def coupling_gauge(spec, t):
    """Diagonal gauge linking the two frames.

    ``U_interaction(t0, t1) = G(t1) @ U_static(t1 - t0) @ G(t0)^dag`` for
    rectangular segments, with G(t) carrying exp(-i J_ij t) per excited
    pair.
    """
    dim = spec.dim
    diag = np.zeros(dim)
    for (i, j), val in spec.coupling.items():
        mask = spec.qubit_bit(i) | spec.qubit_bit(j)
        for s in range(dim):
            if s & mask == mask:
                diag[s] += val
    return np.diag(np.exp(-1j * diag * t))


def single_qubit_rotation(theta, phi):
    """The 2x2 rotation enacted by an ideal pulse (partners in |g>)."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[c, -np.exp(1j * phi) * s], [np.exp(-1j * phi) * s, c]],
        dtype=complex,
    )
