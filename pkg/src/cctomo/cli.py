"""Batch command-line interface.

One binary with subcommands::

    cctomo fig1b       coupling-strength sweep (three canonical states)
    cctomo angles      rotation-angle sweep at fixed coupling
    cctomo axes        second-axis angle sweep, uncoupled
    cctomo threeq      three-qubit pairwise-coupling sweep
    cctomo reconstruct fit externally supplied counts (CSV)
    cctomo prepare     report a prepared state's amplitudes
    cctomo validate    check a configuration without running sweeps

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 optimizer non-convergence (partial output is still written).
"""

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import drivers, io
from .evolve import build_prerotation_set, modified_projectors
from .io import ConfigError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_NONCONVERGED = 4

SWEEPS = {
    "fig1b": (drivers.run_coupling_sweep, "coupling_mhz"),
    "angles": (drivers.run_angle_sweep, "angle_pi"),
    "axes": (drivers.run_axes_sweep, "axis2_deg"),
    "threeq": (drivers.run_three_qubit_sweep, "coupling_mhz"),
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cctomo",
        description="coupling-compensated quantum state tomography",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in [*SWEEPS, "reconstruct", "prepare", "validate"]:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None,
                       help="JSON configuration (built-in defaults if omitted)")
        p.add_argument("--out", type=Path, default=None,
                       help="output directory (default: config 'output')")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--shots", default=None,
                       help="shot count per setting, or 'exact'")
        p.add_argument("--restarts", type=int, default=None,
                       help="extra random optimizer starts")
        p.add_argument("--threads", type=int, default=None,
                       help="parallel jobs across sweep points")
        p.add_argument("--mitigation", type=Path, default=None,
                       help="confusion-matrix CSV applied before fitting")
        if name == "reconstruct":
            p.add_argument("--counts", type=Path, required=True)
        if name == "prepare":
            p.add_argument("--state", default=None,
                           help="a named target state")
            p.add_argument("--tokens", default=None,
                           help="preparation sequence, e.g. "
                                "'pi2_y:1,pi2_y:2,wait_zz_pi' "
                                "(wait takes a duration in ns: 'wait:100')")
    return parser


def _load(args, driver):
    if args.config is not None:
        config = io.load_config(args.config)
    else:
        config = io.default_config(driver)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.shots is not None:
        overrides["shots"] = None if args.shots == "exact" else int(args.shots)
    if args.restarts is not None:
        overrides["restarts"] = args.restarts
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.mitigation is not None:
        overrides["mitigation"] = str(args.mitigation)
    if args.out is not None:
        overrides["output"] = str(args.out)
    return replace(config, **overrides) if overrides else config


def _out_dir(config):
    out = Path(config.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_sweep(args, name):
    config = _load(args, name)
    runner, grid_column = SWEEPS[name]
    out = _out_dir(config)
    started = time.perf_counter()
    rows = runner(config)
    elapsed = time.perf_counter() - started
    columns = [grid_column, "state", "method", "fidelity", "fidelity_std",
               "repetitions", "converged"]
    io.write_rows_csv(out / f"{name}.csv", rows, columns)
    io.write_manifest(out / "manifest.json", config.raw or {},
                      {"total": elapsed}, extra={"command": name})
    print(f"{name}: {len(rows)} rows -> {out / (name + '.csv')}")
    worst = min(row["fidelity"] for row in rows if row["method"] == "mle-cct")
    print(f"  compensated-estimator worst fidelity: {worst:.6f}")
    if not all(row["converged"] for row in rows):
        print("warning: some fits did not converge; output is partial",
              file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def _run_reconstruct(args):
    config = _load(args, "reconstruct")
    counts, n_qubits = io.read_counts_csv(args.counts)
    mitigation = None
    if config.mitigation:
        mitigation = io.read_confusion_csv(config.mitigation)
    out = _out_dir(config)
    rec_std, rec_cct = drivers.reconstruct_counts(
        config, counts, n_qubits, mitigation=mitigation, shots=config.shots)
    doc = {
        "standard": io.result_to_json(rec_std),
        "compensated": io.result_to_json(rec_cct),
    }
    (out / "reconstruction.json").write_text(json.dumps(doc, indent=2))
    io.write_manifest(out / "manifest.json", config.raw or {}, {},
                      extra={"command": "reconstruct"})
    print(f"reconstruct: wrote {out / 'reconstruction.json'}")
    if not (rec_std.converged and rec_cct.converged):
        print("warning: optimizer did not fully converge", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def _parse_tokens(spec):
    from .states import PrepStep

    steps = []
    for item in spec.split(","):
        parts = item.strip().split(":")
        kind = parts[0]
        if kind in ("pi_y", "pi2_y", "pi2_x"):
            steps.append(PrepStep(kind, qubit=int(parts[1])))
        elif kind == "wait":
            steps.append(PrepStep(kind, duration=float(parts[1]) * 1e-9))
        elif kind == "wait_zz_pi":
            steps.append(PrepStep(kind))
        else:
            raise ConfigError(f"unknown preparation token {kind!r}")
    return steps


def _run_prepare(args):
    config = _load(args, "prepare")
    out = _out_dir(config)
    if args.tokens is not None:
        doc = drivers.state_report(config, steps=_parse_tokens(args.tokens))
        stem = "state_sequence"
    else:
        name = args.state or "coupled_plus_plus"
        doc = drivers.state_report(config, name=name)
        stem = f"state_{name}"
    (out / f"{stem}.json").write_text(json.dumps(doc, indent=2))
    if "concurrence" in doc:
        print(f"{doc['state']}: concurrence {doc['concurrence']:.4f}")
    print(f"prepare: wrote {out / (stem + '.json')}")
    return EXIT_OK


def _run_validate(args):
    config = _load(args, "validate")
    prerot = build_prerotation_set(config.system, config.template, config.axes)
    projectors = modified_projectors(prerot)
    unitarity = max(
        float(np.max(np.abs(op.conj().T @ op - np.eye(config.system.dim))))
        for op in prerot.operators
    )
    gram_err = 0.0
    for j in range(projectors.n_settings):
        kets = projectors.kets[j]
        gram = kets @ kets.conj().T
        gram_err = max(gram_err, float(np.max(np.abs(gram - np.eye(projectors.dim)))))
    if config.mitigation:
        from .measure import validate_confusion
        validate_confusion(io.read_confusion_csv(config.mitigation))
    print(f"validate: {prerot.n_settings} settings, "
          f"unitarity drift {unitarity:.2e}, projector gram error {gram_err:.2e}")
    if unitarity > 1e-8 or gram_err > 1e-8:
        print("validate: tolerance exceeded", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command in SWEEPS:
            return _run_sweep(args, args.command)
        if args.command == "reconstruct":
            return _run_reconstruct(args)
        if args.command == "prepare":
            return _run_prepare(args)
        return _run_validate(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
