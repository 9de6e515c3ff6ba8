"""Configuration files, CSV schemas, manifests, and operator caching.

Boundary units are experiment-friendly: coupling as J/2pi in MHz, pulse
durations in ns, axis phases in degrees.  Everything is converted to
angular rad/s, seconds, and radians exactly once, on load.

Counts CSV schema: header ``setting,outcome,count``; settings are
per-qubit token tuples joined with '.', e.g. ``A1.I``; outcomes are
bitstrings with qubit 1 as the leftmost bit.

Confusion CSV schema: square matrix with a header row naming the
prepared-state bitstrings and one row per observed bitstring.
"""

import csv
import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .evolve import TOKENS, PreRotationSet, ProjectorSet
from .model import SystemSpec

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "default_config",
    "config_hash",
    "write_counts_csv",
    "read_counts_csv",
    "write_confusion_csv",
    "read_confusion_csv",
    "write_rows_csv",
    "write_manifest",
    "result_to_json",
    "save_prerotations",
    "load_prerotations",
]

MHZ = 2 * math.pi * 1e6  # J/2pi in MHz -> rad/s
NS = 1e-9


class ConfigError(ValueError):
    """Raised for malformed or inconsistent configuration input."""


@dataclass
class ExperimentConfig:
    """Parsed configuration with internal units."""

    system: SystemSpec
    template: dict              # shape / angles (rad) / durations (s)
    axes: tuple                 # per-qubit (phi_a, phi_b) in rad
    states: tuple
    shots: int | None           # None means exact (noise-free) counts
    seed: int
    repetitions: int
    sweep_parameter: str | None
    sweep_grid: tuple
    mitigation: str | None
    output: str
    restarts: int = 0
    threads: int = 1
    raw: dict = field(default_factory=dict, repr=False)


def _coupling_from_mhz(mapping):
    coupling = {}
    for key, val in (mapping or {}).items():
        try:
            i, j = (int(x) for x in str(key).split("-"))
        except Exception as exc:
            raise ConfigError(
                f"bad coupling key {key!r}; use '1-2' style pairs"
            ) from exc
        coupling[(i, j)] = float(val) * MHZ
    return coupling


def _parse_shots(value):
    if value in ("exact", None):
        return None
    shots = int(value)
    if shots <= 0:
        raise ConfigError("shots must be positive or 'exact'")
    return shots


def parse_config(doc):
    """Build an :class:`ExperimentConfig` from a raw JSON document."""
    try:
        sys_doc = doc.get("system", {})
        n = int(sys_doc.get("n_qubits", 2))
        system = SystemSpec(
            n_qubits=n,
            coupling=_coupling_from_mhz(sys_doc.get("coupling_mhz")),
        )

        pulse_doc = doc.get("pulses", {})
        shape = pulse_doc.get("shape", "rectangular")
        if shape == "gaussian" and "sigmas_ns" in pulse_doc:
            durations = tuple(4 * float(s) * NS for s in pulse_doc["sigmas_ns"])
        else:
            durations = tuple(
                float(d) * NS
                for d in pulse_doc.get("pi2_durations_ns", [50.0] * n)
            )
        angles = tuple(
            float(a) * math.pi for a in pulse_doc.get("angles_pi", [0.5] * n)
        )
        if len(durations) != n or len(angles) != n:
            raise ConfigError("pulse angles/durations must list one entry per qubit")
        template = {"shape": shape, "angles": angles, "durations": durations}

        axes_deg = doc.get("axes_deg")
        if axes_deg is None:
            axes_deg = [[-90.0, 0.0]] * n
        if len(axes_deg) != n:
            raise ConfigError("axes_deg must list one (a, b) pair per qubit")
        axes = tuple(
            (math.radians(float(a)), math.radians(float(b)))
            for a, b in axes_deg
        )

        sweep = doc.get("sweep") or {}
        grid = tuple(float(x) for x in sweep.get("grid", ()))
        if "grid" in sweep and not grid:
            raise ConfigError("sweep grid must not be empty")

        from .states import NAMED_STATES
        for name in doc.get("states", ()):
            if name not in NAMED_STATES:
                raise ConfigError(
                    f"unknown state {name!r}; options: {sorted(NAMED_STATES)}")

        return ExperimentConfig(
            system=system,
            template=template,
            axes=axes,
            states=tuple(doc.get("states", ())),
            shots=_parse_shots(doc.get("shots", "exact")),
            seed=int(doc.get("seed", 0)),
            repetitions=int(doc.get("repetitions", 1)),
            sweep_parameter=sweep.get("parameter"),
            sweep_grid=grid,
            mitigation=doc.get("mitigation"),
            output=str(doc.get("output", "out")),
            raw=doc,
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path):
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(doc)


def default_config(driver):
    """Built-in configuration used when no config file is given."""
    base = {
        "system": {"n_qubits": 2, "coupling_mhz": {"1-2": -4.37}},
        "pulses": {"shape": "rectangular", "pi2_durations_ns": [50.0, 50.0],
                   "angles_pi": [0.5, 0.5]},
        "shots": "exact",
        "seed": 7,
        "repetitions": 1,
        "output": "out",
    }
    if driver == "fig1b":
        # 20 ns pi/2 pulses keep the uncompensated degradation monotone
        # over the full 0..10 MHz grid (the conditional phase would wrap
        # 2 pi within the grid for 50 ns pulses, producing a revival)
        base["pulses"]["pi2_durations_ns"] = [20.0, 20.0]
        base["states"] = ["plus_plus", "bell", "mixed"]
        base["sweep"] = {"parameter": "coupling_mhz",
                         "grid": [-float(k) for k in range(0, 11)]}
    elif driver == "angles":
        base["states"] = ["g_plus", "coupled_plus_plus",
                          "coupled_plus_plus_cphase"]
        base["pulses"]["angles_pi"] = [0.35, 0.5]
        base["sweep"] = {"parameter": "angle_pi",
                         "grid": [round(0.05 + 0.1 * k, 3) for k in range(10)]}
    elif driver == "axes":
        base["system"]["coupling_mhz"] = {"1-2": 0.0}
        base["states"] = ["plus_plus", "bell", "mixed"]
        base["sweep"] = {"parameter": "axis2_deg",
                         "grid": [90.0 + 15.0 * k for k in range(13)
                                  if 90.0 + 15.0 * k != 180.0]}
    elif driver == "threeq":
        base["system"] = {"n_qubits": 3,
                          "coupling_mhz": {"1-2": -4.37, "2-3": -4.37,
                                           "1-3": -4.37}}
        base["pulses"] = {"shape": "rectangular",
                          "pi2_durations_ns": [20.0, 20.0, 20.0],
                          "angles_pi": [0.5, 0.5, 0.5]}
        base["states"] = ["plus3", "ghz3", "mixed3"]
        base["sweep"] = {"parameter": "coupling_mhz",
                         "grid": [0.0, -2.5, -5.0, -7.5, -10.0]}
    elif driver in ("reconstruct", "prepare", "validate"):
        base["states"] = ["coupled_plus_plus"]
    else:
        raise ConfigError(f"unknown driver {driver!r}")
    return parse_config(base)


def config_hash(doc):
    """Stable hash of a raw config document (sorted-key JSON, sha256)."""
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------------------
# counts and confusion CSV

def setting_label(tokens):
    return ".".join(tokens)


def outcome_label(index, n_qubits):
    return format(index, f"0{n_qubits}b")


def write_counts_csv(path, counts, n_qubits):
    counts = np.asarray(counts, dtype=float)
    labels = list(itertools.product(TOKENS, repeat=n_qubits))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["setting", "outcome", "count"])
        for j, tokens in enumerate(labels):
            for k in range(2**n_qubits):
                writer.writerow([setting_label(tokens),
                                 outcome_label(k, n_qubits),
                                 repr(float(counts[j, k]))])


def read_counts_csv(path):
    """Read a counts CSV back into a (3**N, 2**N) tensor."""
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["setting", "outcome", "count"]:
            raise ConfigError(
                f"bad counts header {reader.fieldnames}; "
                "expected setting,outcome,count"
            )
        for rec in reader:
            rows[(rec["setting"], rec["outcome"])] = float(rec["count"])
    if not rows:
        raise ConfigError("counts file is empty")
    n_qubits = len(next(iter(rows))[1])
    labels = list(itertools.product(TOKENS, repeat=n_qubits))
    counts = np.zeros((len(labels), 2**n_qubits))
    for j, tokens in enumerate(labels):
        for k in range(2**n_qubits):
            key = (setting_label(tokens), outcome_label(k, n_qubits))
            if key not in rows:
                raise ConfigError(f"counts file is missing entry {key}")
            counts[j, k] = rows[key]
    return counts, n_qubits


def write_confusion_csv(path, M):
    M = np.asarray(M, dtype=float)
    n_qubits = int(round(math.log2(M.shape[0])))
    names = [outcome_label(k, n_qubits) for k in range(M.shape[0])]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["observed"] + names)
        for i, row in enumerate(M):
            writer.writerow([names[i]] + [repr(float(x)) for x in row])


def read_confusion_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        names = header[1:]
        data = {row[0]: [float(x) for x in row[1:]] for row in reader}
    if sorted(names) != sorted(data):
        raise ConfigError("confusion matrix rows and columns disagree")
    order = sorted(names, key=lambda s: int(s, 2))
    M = np.array([[data[obs][names.index(prep)] for prep in order]
                  for obs in order])
    return M


# ---------------------------------------------------------------------------
# result tables, manifests, reconstruction output

def write_rows_csv(path, rows, columns):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in columns})


def read_rows_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_manifest(path, doc, timings, extra=None):
    import scipy

    manifest = {
        "config_hash": config_hash(doc),
        "config": doc,
        "versions": {
            "cctomo": "0.1.0",
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "timings_s": {k: round(v, 4) for k, v in timings.items()},
    }
    if extra:
        manifest.update(extra)
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True))


def _matrix_doc(m):
    return {"real": np.real(m).tolist(), "imag": np.imag(m).tolist()}


def result_to_json(result, extra=None):
    doc = {
        "method": result.method,
        "likelihood_value": result.likelihood_value,
        "iterations": result.iterations,
        "converged": result.converged,
        "rho": _matrix_doc(result.rho),
    }
    if extra:
        doc.update(extra)
    return doc


def matrix_from_doc(doc):
    return np.array(doc["real"]) + 1j * np.array(doc["imag"])


# ---------------------------------------------------------------------------
# pre-rotation cache

def prerotation_key(system, template, axes):
    doc = {
        "n_qubits": system.n_qubits,
        "coupling": {f"{i}-{j}": v for (i, j), v in sorted(system.coupling.items())},
        "shape": template["shape"],
        "angles": list(template["angles"]),
        "durations": list(template["durations"]),
        "axes": [list(pair) for pair in axes],
    }
    return config_hash(doc)


def save_prerotations(path, prerot, key):
    doc = {
        "key": key,
        "n_qubits": prerot.n_qubits,
        "labels": ["".join(f"{t}." for t in lab)[:-1] for lab in prerot.labels],
        "operators": _matrix_doc(prerot.operators),
    }
    Path(path).write_text(json.dumps(doc))


def load_prerotations(path, expected_key=None):
    doc = json.loads(Path(path).read_text())
    if expected_key is not None and doc["key"] != expected_key:
        raise ConfigError("cached pre-rotations do not match this configuration")
    ops = matrix_from_doc(doc["operators"])
    labels = tuple(tuple(lab.split(".")) for lab in doc["labels"])
    prerot = PreRotationSet(n_qubits=doc["n_qubits"], labels=labels,
                            sequences=tuple(() for _ in labels),
                            operators=ops)
    kets = np.conj(ops)
    return prerot, ProjectorSet(kets=np.ascontiguousarray(kets))
