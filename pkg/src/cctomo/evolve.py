"""Evolution operators for tomography pre-rotation sequences.

Three propagation routes are provided and cross-checked in the test
suite:

* :func:`analytic_propagator` — closed form for a rectangular pulse on
  one qubit of a two-qubit system, in the interaction frame;
* :func:`sequence_propagator` — exact matrix exponentials per segment in
  the static frame (rectangular pulses, any qubit count), with the
  frame gauge applied on request;
* :func:`numeric_propagator` — time-ordered integration of the
  interaction- or static-frame generator, used for shaped pulses and as
  the independent oracle.

:func:`build_prerotation_set` enumerates the 3**N per-qubit choices of
{identity, axis-1 rotation, axis-2 rotation}, applies the pulses
sequentially (qubit 1 first), and returns the resulting unitaries;
:func:`modified_projectors` turns them into the native measurement kets
U_j^dag |basis_k>.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .model import (
    AXIS_X_PHASE,
    AXIS_Y_PHASE,
    PulseSpec,
    amplitude_for_angle,
    coupling_gauge,
    rwa_drive_hamiltonian,
    static_generator,
)

__all__ = [
    "TOKENS",
    "PreRotationSet",
    "ProjectorSet",
    "analytic_propagator",
    "numeric_propagator",
    "sequence_propagator",
    "build_prerotation_set",
    "modified_projectors",
    "standard_axes",
]

#: Per-qubit setting tokens: no pulse, axis-1 rotation, axis-2 rotation.
TOKENS = ("I", "A1", "A2")

UNITARITY_TOL = 1e-10


def standard_axes(n_qubits):
    """The conventional (x, y) tomography axis phases for every qubit."""
    return tuple((AXIS_X_PHASE, AXIS_Y_PHASE) for _ in range(n_qubits))


@dataclass(frozen=True)
class PreRotationSet:
    """The 3**N pre-rotation sequences and their evolution operators.

    ``labels[j]`` is the per-qubit token tuple of setting j, ``sequences[j]``
    the pulse list realizing it, and ``operators[j]`` the unitary acting on
    states at the start of the tomography pulses (t = 0).
    """

    n_qubits: int
    labels: tuple
    sequences: tuple
    operators: np.ndarray

    @property
    def n_settings(self):
        return len(self.labels)

    def identity_index(self):
        return self.labels.index(("I",) * self.n_qubits)


@dataclass(frozen=True)
class ProjectorSet:
    """Measurement kets |xi_{j,k}>, shape (3**N, 2**N, 2**N)."""

    kets: np.ndarray

    @property
    def n_settings(self):
        return self.kets.shape[0]

    @property
    def dim(self):
        return self.kets.shape[1]

    def flat(self):
        """Kets flattened to shape (3**N * 2**N, 2**N), setting-major."""
        return self.kets.reshape(-1, self.dim)


def analytic_propagator(qubit, t, t0, phi, amplitude, jzz):
    """Closed-form interaction-frame propagator, one driven qubit of two.

    Rectangular envelope of rate ``amplitude`` on ``qubit`` (1 or 2),
    running from ``t0`` to ``t0 + t``, with ZZ coupling ``jzz`` (rad/s).
    The partner-ground block is a plain rotation; the partner-excited
    block precesses at Omega = sqrt(amplitude**2 + jzz**2) and carries
    the accumulated coupling phase.
    """
    if qubit not in (1, 2):
        raise ValueError("closed form covers qubits 1 and 2 of a pair only")
    a, j = float(amplitude), float(jzz)
    omega = math.hypot(a, j)
    half = a * t / 2
    c, s = math.cos(half), math.sin(half)
    if omega > 0:
        ch, sh = math.cos(omega * t / 2), math.sin(omega * t / 2)
        diag_hi = np.exp(0.5j * j * t) * (ch - 1j * (j / omega) * sh)
        diag_lo = np.exp(-0.5j * j * t) * (ch + 1j * (j / omega) * sh)
        off = (a / omega) * sh * np.exp(1j * (j * (t + 2 * t0) / 2 + phi))
    else:
        diag_hi = diag_lo = 1.0
        off = 0.0
    f = np.zeros((4, 4), dtype=complex)
    ground, excited = ((0, 2), (1, 3)) if qubit == 1 else ((0, 1), (2, 3))
    g0, g1 = ground
    e0, e1 = excited
    f[g0, g0] = c
    f[g0, g1] = -np.exp(1j * phi) * s
    f[g1, g0] = np.exp(-1j * phi) * s
    f[g1, g1] = c
    f[e0, e0] = diag_hi
    f[e0, e1] = -off
    f[e1, e0] = np.conj(off)
    f[e1, e1] = diag_lo
    return f


def _unitarize(u, tol=UNITARITY_TOL):
    """Polar projection onto the unitary group when drift exceeds ``tol``."""
    drift = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if drift <= tol:
        return u
    w, _, vh = np.linalg.svd(u)
    return w @ vh


def _segment_edges(pulses, t_start, t_end):
    """Breakpoints at every pulse boundary inside the integration window."""
    edges = {float(t_start), float(t_end)}
    for p in pulses:
        for edge in (p.t0, p.t_end):
            if t_start < edge < t_end:
                edges.add(float(edge))
    return sorted(edges)


def numeric_propagator(spec, pulses, t_start, t_end, tolerance=1e-10,
                       frame="interaction", fixed_step=None):
    """Time-ordered propagator by direct integration of the matrix ODE.

    Solves dU/dt = -i H(t) U from ``t_start`` to ``t_end`` with an
    adaptive Runge-Kutta scheme (segmented at envelope discontinuities),
    or with fixed-step RK4 when ``fixed_step`` is given.  The result is
    polar-projected back onto the unitary group if the accumulated drift
    exceeds 1e-10.
    """
    if t_end <= t_start:
        raise ValueError("t_end must exceed t_start")
    if frame == "interaction":
        gen = lambda t: rwa_drive_hamiltonian(spec, pulses, t)
    elif frame == "static":
        gen = lambda t: static_generator(spec, pulses, t)
    else:
        raise ValueError(f"unknown frame {frame!r}")

    dim = spec.dim
    u = np.eye(dim, dtype=complex)

    if fixed_step is not None:
        u = _rk4_fixed(gen, u, t_start, t_end, fixed_step)
        return _unitarize(u)

    def rhs(t, y):
        return (-1j * gen(t) @ y.reshape(dim, dim)).ravel()

    edges = _segment_edges(pulses, t_start, t_end)
    for a, b in zip(edges[:-1], edges[1:]):
        sol = solve_ivp(rhs, (a, b), u.ravel(), method="DOP853",
                        rtol=tolerance, atol=tolerance * 1e-2)
        if not sol.success:
            raise RuntimeError(f"integration failure on [{a}, {b}]: {sol.message}")
        u = sol.y[:, -1].reshape(dim, dim)
    return _unitarize(u)


def _rk4_fixed(gen, u, t_start, t_end, step):
    n_steps = max(1, int(math.ceil((t_end - t_start) / step)))
    h = (t_end - t_start) / n_steps
    t = t_start
    for _ in range(n_steps):
        k1 = -1j * gen(t) @ u
        k2 = -1j * gen(t + h / 2) @ (u + h / 2 * k1)
        k3 = -1j * gen(t + h / 2) @ (u + h / 2 * k2)
        k4 = -1j * gen(t + h) @ (u + h * k3)
        u = u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return u


def _static_pulse_propagator(spec, pulse, tolerance):
    """Static-frame propagator of one pulse over its own window."""
    local = PulseSpec(qubit=pulse.qubit, amplitude=pulse.amplitude,
                      duration=pulse.duration, phase=pulse.phase,
                      shape=pulse.shape, t0=0.0)
    if pulse.shape == "rectangular":
        gen = static_generator(spec, [local], local.duration / 2)
        return scipy.linalg.expm(-1j * gen * local.duration)
    return numeric_propagator(spec, [local], 0.0, local.duration,
                              tolerance=tolerance, frame="static")


def _static_idle(spec, duration):
    # diagonal of static_generator with no drive is -J per excited pair
    gen = static_generator(spec, [], 0.0)
    return np.diag(np.exp(-1j * np.diag(gen).real * duration))


def sequence_propagator(spec, pulses, t_start=0.0, t_end=None,
                        frame="interaction", tolerance=1e-10):
    """Propagator of an ordered, non-overlapping pulse sequence.

    Each rectangular segment is an exact matrix exponential in the
    static frame (the generator is constant there); Gaussian segments
    fall back to time-ordered integration.  Idle gaps contribute the
    static coupling phase.  The interaction-frame result is obtained by
    the diagonal gauge, so both frames agree wherever they are compared.
    """
    pulses = sorted(pulses, key=lambda p: p.t0)
    for prev, nxt in zip(pulses[:-1], pulses[1:]):
        if nxt.t0 < prev.t_end - 1e-15 and nxt.qubit == prev.qubit:
            raise ValueError("pulses on one qubit overlap in time")
    if t_end is None:
        t_end = pulses[-1].t_end if pulses else t_start
    u = np.eye(spec.dim, dtype=complex)
    cursor = t_start
    for pulse in pulses:
        if pulse.t0 < cursor - 1e-15:
            raise ValueError("simultaneous pulses need the numeric propagator")
        if pulse.t0 > cursor:
            u = _static_idle(spec, pulse.t0 - cursor) @ u
        u = _static_pulse_propagator(spec, pulse, tolerance) @ u
        cursor = pulse.t_end
    if t_end > cursor:
        u = _static_idle(spec, t_end - cursor) @ u
    if frame == "static":
        return u
    if frame == "interaction":
        return coupling_gauge(spec, t_end) @ u @ coupling_gauge(spec, t_start).conj().T
    raise ValueError(f"unknown frame {frame!r}")


def _axis_pair(axes, qubit):
    phi_a, phi_b = axes[qubit - 1]
    if abs((phi_a - phi_b) % math.pi) < 1e-9 or \
            abs(((phi_a - phi_b) % math.pi) - math.pi) < 1e-9:
        raise ValueError(
            f"degenerate axes on qubit {qubit}: phases {phi_a!r}, {phi_b!r} "
            "are collinear (equal modulo pi)"
        )
    return phi_a, phi_b


def build_prerotation_set(spec, pulse_template, axes=None, tolerance=1e-10):
    """Enumerate all 3**N pre-rotation settings and their unitaries.

    Parameters
    ----------
    spec : SystemSpec
    pulse_template : dict
        ``shape`` ('rectangular' or 'gaussian'), plus per-qubit sequences
        ``angles`` (rad, each in (0, pi)) and ``durations`` (s).
    axes : sequence of (phi_a, phi_b), optional
        Axis phases per qubit; defaults to the standard x/y pair.
        The two phases must differ modulo pi.

    Pulses of one setting run sequentially, qubit 1 first, each segment
    starting where the previous ended (idle qubits contribute no time).
    The tomography clock starts at t = 0, taken at the end of state
    preparation.
    """
    n = spec.n_qubits
    shape = pulse_template.get("shape", "rectangular")
    angles = tuple(pulse_template["angles"])
    durations = tuple(pulse_template["durations"])
    if len(angles) != n or len(durations) != n:
        raise ValueError("need one angle and one duration per qubit")
    for theta in angles:
        if not 0 < theta < math.pi:
            raise ValueError(f"rotation angle {theta!r} outside (0, pi)")
    if axes is None:
        axes = standard_axes(n)
    for q in range(1, n + 1):
        _axis_pair(axes, q)

    labels, sequences, operators = [], [], []
    for combo in itertools.product(TOKENS, repeat=n):
        pulses = []
        t_cursor = 0.0
        for q in range(1, n + 1):
            token = combo[q - 1]
            if token == "I":
                continue
            phi_a, phi_b = axes[q - 1]
            phase = phi_a if token == "A1" else phi_b
            amp = amplitude_for_angle(shape, angles[q - 1], durations[q - 1])
            pulses.append(PulseSpec(qubit=q, amplitude=amp,
                                    duration=durations[q - 1], phase=phase,
                                    shape=shape, t0=t_cursor))
            t_cursor += durations[q - 1]
        if pulses:
            op = sequence_propagator(spec, pulses, t_start=0.0,
                                     frame="interaction", tolerance=tolerance)
        else:
            op = np.eye(spec.dim, dtype=complex)
        labels.append(combo)
        sequences.append(tuple(pulses))
        operators.append(op)

    ops = np.stack(operators)
    eye = np.eye(spec.dim)
    for j, op in enumerate(ops):
        drift = np.max(np.abs(op.conj().T @ op - eye))
        if drift > 1e-8:
            raise RuntimeError(f"setting {labels[j]} lost unitarity: {drift:.2e}")
    return PreRotationSet(n_qubits=n, labels=tuple(labels),
                          sequences=tuple(sequences), operators=ops)


def modified_projectors(prerot):
    """Native measurement kets |xi_{j,k}> = U_j^dag |basis_k>.

    Row k of U_j, conjugated, is exactly U_j^dag applied to the k-th
    computational basis ket, so each setting's 2**N kets stay
    orthonormal by construction.
    """
    kets = np.conj(prerot.operators)  # kets[j, k, :] = conj(U_j[k, :])
    return ProjectorSet(kets=np.ascontiguousarray(kets))
