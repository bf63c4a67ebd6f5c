"""Command-line driver: ``eltqc <subcommand> [options]``.

Exit codes: 0 on success, 2 for configuration errors, 3 for numeric or
validation errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .channels import PHYSICAL_GAMMA, amplitude_damping_kraus
from .dilation import dilate
from .elt import (
    Backend,
    Mode,
    PopulationSeries,
    Source,
    TrajectoryFamily,
    WeightSchedule,
    combine,
    default_grid,
    default_kappas,
    evaluate_family,
)
from .exceptions import BadConfig, ELTQCError
from .jcref import REGIMES, JCParams, exact_populations, markovian_populations
from .linalg import matrix_from_literal
from .stateprep import decompose_density, markovian_ensemble
from .synthesis import synthesize_2q
from .weights import DEFAULT_REG, fit_report, fit_weights

log = logging.getLogger("eltqc")

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

DEFAULTS = {
    "grid": {"t_max": 10.0, "n": 101},
    "family": {"mode": "RateScaled", "n": 25, "low": 1e-2, "high": 1e1},
    "backend": {"shots": 8192, "threads": 1},
    "regime": {"name": "strong", "rho11_0": 1.0},
    "seed": 0,
    "reg": DEFAULT_REG,
    "physical_gamma": PHYSICAL_GAMMA,
    "output_dir": None,
}


class InputError(ELTQCError):
    """Unreadable or malformed input document."""


def _merge(base, override):
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _read_json(path, error=InputError):
    try:
        text = sys.stdin.read() if str(path) == "-" else Path(path).read_text()
    except OSError as exc:
        raise error(f"{path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise error(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_config(args) -> dict:
    cfg = DEFAULTS
    if getattr(args, "config", None):
        doc = _read_json(args.config, BadConfig)
        if not isinstance(doc, dict):
            raise BadConfig(f"{args.config}: top level must be a JSON object")
        unknown = set(doc) - set(DEFAULTS)
        if unknown:
            raise BadConfig(f"{args.config}: unknown sections {sorted(unknown)}")
        cfg = _merge(DEFAULTS, doc)
    cfg = json.loads(json.dumps(cfg))
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    if getattr(args, "shots", None) is not None:
        cfg["backend"]["shots"] = args.shots
    if getattr(args, "threads", None) is not None:
        cfg["backend"]["threads"] = args.threads
    if getattr(args, "regime", None) is not None:
        cfg["regime"]["name"] = args.regime
    for key in ("lam", "delta"):
        if getattr(args, key, None) is not None:
            cfg["regime"]["lambda" if key == "lam" else "delta"] = getattr(args, key)
    out = getattr(args, "out", None) or cfg.get("output_dir") or os.environ.get("ELTQC_OUT") or "."
    cfg["output_dir"] = out
    _validate(cfg)
    return cfg


def _validate(cfg):
    try:
        g = cfg["grid"]
        if not (float(g["t_max"]) > 0 and int(g["n"]) >= 2):
            raise BadConfig("grid needs t_max > 0 and n >= 2")
        if int(cfg["backend"]["shots"]) < 0:
            raise BadConfig("shots must be >= 0")
        if int(cfg["backend"]["threads"]) < 1:
            raise BadConfig("threads must be >= 1")
        int(cfg["seed"])
        if float(cfg["reg"]) < 0:
            raise BadConfig("reg must be >= 0")
        Mode(cfg["family"]["mode"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, BadConfig):
            raise
        raise BadConfig(f"invalid configuration: {exc}") from exc


def _grid(cfg):
    return default_grid(float(cfg["grid"]["t_max"]), int(cfg["grid"]["n"]))


def _family(cfg):
    f = cfg["family"]
    if Mode(f["mode"]) is Mode.LAG_SHIFTED:
        lags = f.get("lags")
        if not lags:
            raise BadConfig("LagShifted family needs a 'lags' list")
        return TrajectoryFamily.lag_shifted(lags)
    kappas = f.get("kappas")
    if kappas is None:
        kappas = default_kappas(int(f["n"]), float(f["low"]), float(f["high"]))
    return TrajectoryFamily.rate_scaled(kappas)


def _jc_params(cfg):
    r = cfg["regime"]
    name = r["name"]
    if name in REGIMES:
        return name, REGIMES[name]()
    if name != "custom":
        raise BadConfig(f"unknown regime {name!r}; expected strong, detuned or custom")
    if "lambda" not in r:
        raise BadConfig("custom regime needs 'lambda' (in units of gamma)")
    try:
        return name, JCParams(lam=float(r["lambda"]), delta=float(r.get("delta", 0.0)))
    except ValueError as exc:
        raise BadConfig(str(exc)) from exc


def _outdir(cfg) -> Path:
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_csv(path, series: PopulationSeries):
    with open(path, "w", newline="") as fh:
        series.to_csv(fh)


def cmd_markovian(cfg) -> list:
    out = _outdir(cfg)
    grid = _grid(cfg)
    ensemble = markovian_ensemble()
    rho11_0 = ensemble.density_matrix()[1, 1].real
    family = TrajectoryFamily.rate_scaled([1.0])
    schedule = WeightSchedule.constant(grid, [1.0])
    threads = int(cfg["backend"]["threads"])
    files = []

    exact = markovian_populations(grid, rho11_0)
    _write_csv(out / "markovian_exact.csv", exact)
    files.append("markovian_exact.csv")

    P = evaluate_family(family, grid, ensemble, threads=threads)
    sv = combine(P, schedule, source=Source.statevector())
    _write_csv(out / "markovian_statevector.csv", sv)
    files.append("markovian_statevector.csv")

    shots = int(cfg["backend"]["shots"])
    if shots > 0:
        backend = Backend("shots", shots, int(cfg["seed"]))
        Ps = evaluate_family(family, grid, ensemble, backend, threads)
        _write_csv(out / "markovian_shots.csv", combine(Ps, schedule, source=backend.source))
        files.append("markovian_shots.csv")

    gamma = float(cfg["physical_gamma"])
    _write_json(out / "markovian_meta.json", {
        "gamma_per_second": gamma,
        "time_seconds": [float(t / gamma) for t in grid],
        "rho11_0": float(rho11_0),
    })
    files.append("markovian_meta.json")
    return files


def cmd_jc(cfg) -> list:
    out = _outdir(cfg)
    name, params = _jc_params(cfg)
    grid = _grid(cfg)
    family = _family(cfg)
    family.validate(grid[-1])
    rho11_0 = float(cfg["regime"].get("rho11_0", 1.0))
    D0 = np.diag([1.0 - rho11_0, rho11_0]).astype(np.complex128)
    ensemble = decompose_density(D0)
    threads = int(cfg["backend"]["threads"])
    files = []

    exact = exact_populations(params, grid, rho11_0)
    _write_csv(out / f"jc_{name}_exact.csv", exact)
    files.append(f"jc_{name}_exact.csv")

    P = evaluate_family(family, grid, ensemble, threads=threads)
    schedule = fit_weights(P[:, :, 1], exact, reg=float(cfg["reg"]))
    report = fit_report(schedule, P[:, :, 1], exact)
    sv = combine(P, schedule, source=Source.statevector())
    _write_csv(out / f"jc_{name}_elt_statevector.csv", sv)
    files.append(f"jc_{name}_elt_statevector.csv")

    shots = int(cfg["backend"]["shots"])
    if shots > 0:
        backend = Backend("shots", shots, int(cfg["seed"]))
        Ps = evaluate_family(family, grid, ensemble, backend, threads)
        _write_csv(out / f"jc_{name}_elt_shots.csv", combine(Ps, schedule, source=backend.source))
        files.append(f"jc_{name}_elt_shots.csv")

    doc = schedule.to_json()
    doc["family"] = family.to_json()
    doc["regime"] = {"name": name, "lambda": params.lam, "delta": params.delta, "rho11_0": rho11_0}
    _write_json(out / "weights.json", doc)
    _write_json(out / "fit_report.json", report.to_json())
    files += ["weights.json", "fit_report.json"]
    log.info("regime %s: max |ELT - exact| = %.3e", name, float(np.max(np.abs(sv.excited - exact.excited))))
    return files


def cmd_oracle(cfg) -> list:
    out = _outdir(cfg)
    name, params = _jc_params(cfg)
    series = exact_populations(params, _grid(cfg), float(cfg["regime"].get("rho11_0", 1.0)))
    _write_csv(out / f"jc_{name}_exact.csv", series)
    return [f"jc_{name}_exact.csv"]


def cmd_fit_weights(cfg, reference_path) -> list:
    out = _outdir(cfg)
    try:
        reference = PopulationSeries.from_csv(Path(reference_path).read_text())
    except OSError as exc:
        raise InputError(f"{reference_path}: {exc.strerror or exc}") from exc
    except (KeyError, ValueError) as exc:
        raise InputError(f"{reference_path}: malformed population CSV ({exc})") from exc
    family = _family(cfg)
    family.validate(reference.times.max())
    rho11_0 = float(cfg["regime"].get("rho11_0", 1.0))
    ensemble = decompose_density(np.diag([1.0 - rho11_0, rho11_0]).astype(np.complex128))
    P = evaluate_family(family, reference.times, ensemble, threads=int(cfg["backend"]["threads"]))[:, :, 1]
    schedule = fit_weights(P, reference, reg=float(cfg["reg"]))
    doc = schedule.to_json()
    doc["family"] = family.to_json()
    _write_json(out / "weights.json", doc)
    _write_json(out / "fit_report.json", fit_report(schedule, P, reference).to_json())
    return ["weights.json", "fit_report.json"]


def _input_matrix(args):
    if args.input is None and getattr(args, "gamma_t", None) is not None:
        return amplitude_damping_kraus(args.gamma_t).operators[args.index]
    if args.input is None:
        raise InputError("an input matrix JSON file is required")
    doc = _read_json(args.input)
    try:
        return matrix_from_literal(doc)
    except (ELTQCError, ValueError) as exc:
        raise InputError(f"{args.input}: {exc}") from exc


def cmd_dilate(cfg, args) -> list:
    out = _outdir(cfg)
    M = _input_matrix(args)
    du = dilate(M, source_index=args.index, gamma_t=getattr(args, "gamma_t", None))
    _write_json(out / "dilated.json", du.to_json())
    return ["dilated.json"]


def cmd_synthesize(cfg, args) -> list:
    out = _outdir(cfg)
    U = _input_matrix(args)
    if getattr(args, "gamma_t", None) is not None and args.input is None:
        U = dilate(U).matrix
    report = synthesize_2q(U)
    _write_json(out / "synthesis.json", report.to_json())
    return ["synthesis.json"]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON experiment manifest")
    common.add_argument("--seed", type=int, help="base RNG seed")
    common.add_argument("--shots", type=int, help="shots per circuit (0 disables sampling)")
    common.add_argument("--threads", type=int, help="worker threads")
    common.add_argument("--out", metavar="DIR", help="output directory (fallback: $ELTQC_OUT)")
    common.add_argument("--regime", help="strong, detuned or custom")
    common.add_argument("--lambda", dest="lam", type=float, help="custom regime lambda / gamma")
    common.add_argument("--delta", type=float, help="custom regime detuning / gamma")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="eltqc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("markovian", parents=[common], help="single amplitude-damping trajectory")
    sub.add_parser("jc", parents=[common], help="Jaynes-Cummings ensemble benchmark")
    sub.add_parser("oracle", parents=[common], help="exact Jaynes-Cummings populations")
    fw = sub.add_parser("fit-weights", parents=[common], help="fit trajectory weights to a reference CSV")
    fw.add_argument("reference", help="population CSV (gamma_t,rho_00,rho_11,source)")
    for name, helptext in (("dilate", "Sz.-Nagy dilation of a contraction"),
                           ("synthesize", "two-qubit circuit synthesis")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("input", nargs="?", help="matrix literal JSON file ('-' for stdin)")
        sp.add_argument("--gamma-t", type=float, help="use the amplitude-damping Kraus operator at this time")
        sp.add_argument("--index", type=int, default=0, choices=(0, 1), help="Kraus operator index")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args)
        if args.command == "markovian":
            files = cmd_markovian(cfg)
        elif args.command == "jc":
            files = cmd_jc(cfg)
        elif args.command == "oracle":
            files = cmd_oracle(cfg)
        elif args.command == "fit-weights":
            files = cmd_fit_weights(cfg, args.reference)
        elif args.command == "dilate":
            files = cmd_dilate(cfg, args)
        else:
            files = cmd_synthesize(cfg, args)
    except BadConfig as exc:
        print(f"eltqc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"eltqc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"eltqc: I/O error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for f in files:
        print(Path(cfg["output_dir"]) / f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
