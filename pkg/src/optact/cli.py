"""Command-line entry point: ``optact {optimize,sample,verify,cost,spectrum}``.

Exit codes: 0 success, 1 configuration error, 2 non-controllable system,
3 failed verification. Errors are written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import published
from .brunovsky import BrunovskyMap
from .bruteforce import circle_points, sphere_grid
from .cost_oracle import blowup_exponent, factorization_report
from .errors import (
    DegenerateGridError,
    FactorizationViolation,
    NonControllableError,
    OptactError,
)
from .matrix_core import as_vector
from .optimizer import HEAT2_SYMMETRIES, DEConfig, optimize, parallel_evaluate
from .spectral import ObjectiveEvaluator, jacobi_spectrum
from .systems import KINDS, SCALINGS, SystemSpec
from .verification import random_unit, run_suites

EXIT_CONFIG = 1
EXIT_NONCONTROLLABLE = 2
EXIT_VERIFY = 3
SAMPLE_CHUNK = 50_000


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--system", choices=KINDS, default="heat")
    common.add_argument("--matrix", help="CSV file with a custom square A (implies --system custom)")
    common.add_argument("--n", type=int, default=2, help="grid points")
    common.add_argument("--scale", choices=SCALINGS, default="none")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--workers", type=int, default=1, help="threads for batched evaluation")

    parser = _Parser(prog="optact", description="Actuator design via the Brunovsky form.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("optimize", parents=[common], help="maximize lambda_1 over unit actuators")
    p.add_argument("--pop", type=int, help="population size (default 15 n)")
    p.add_argument("--gens", type=int, help="generation limit (default 300 n)")
    p.add_argument("--starts", type=int, help="independent runs (default 1 for n=2, else 4)")
    p.add_argument("--format", choices=["json"], default="json")

    p = sub.add_parser("sample", parents=[common], help="tabulate lambda_1 on the sphere")
    p.add_argument("--resolution", type=int, default=360)
    p.add_argument("--samples", type=int, help="random mode: this many seeded unit vectors")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("verify", parents=[common], help="run the property suites")
    p.add_argument("--format", choices=["json"], default="json")

    p = sub.add_parser("cost", parents=[common], help="exact cost against the factorized bound")
    p.add_argument("--T", type=_float_list, default=[1.0], help="comma-separated horizons")
    p.add_argument("--b", type=_float_list, help="actuator (comma-separated); default random")
    p.add_argument("--samples", type=int, default=10, help="random actuators when --b is absent")
    p.add_argument("--format", choices=["json"], default="json")

    p = sub.add_parser("spectrum", parents=[common], help="Jacobi spectrum of A or of M(b)")
    p.add_argument("--b", type=_float_list, help="actuator; omit for the system matrix")
    p.add_argument("--format", choices=["json"], default="json")
    return parser


def _system(args) -> SystemSpec:
    if args.matrix is not None:
        if not Path(args.matrix).is_file():
            raise ConfigError(f"matrix file not found: {args.matrix}")
        return SystemSpec("custom", scaling=args.scale, matrix_path=args.matrix)
    if args.system == "custom":
        raise ConfigError("--system custom needs --matrix")
    return SystemSpec(args.system, args.n, args.scale)


def _base_config(args, spec: SystemSpec) -> dict:
    return {
        "system": spec.kind,
        "n": spec.n if spec.kind != "custom" else spec.actuator_dim,
        "scale": spec.scaling,
        "matrix": spec.matrix_path,
        "seed": args.seed,
    }


def _unit(values, dim: int) -> np.ndarray:
    b = as_vector(values, dim, "b")
    nrm = np.linalg.norm(b)
    if nrm == 0.0:
        raise ConfigError("--b must be nonzero")
    return b / nrm


def _floats(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def cmd_optimize(args, spec: SystemSpec):
    A = spec.dynamics()
    E = spec.embedding()
    cfg = DEConfig(population_size=args.pop, max_generations=args.gens, seed=args.seed)
    sym = HEAT2_SYMMETRIES if spec.kind == "heat" and spec.n == 2 else None
    res = optimize(A, cfg, starts=args.starts, embedding=E, workers=args.workers, symmetries=sym)
    config = _base_config(args, spec)
    config.update(pop=args.pop, gens=args.gens, starts=res.starts, F=cfg.F, CR=cfg.CR,
                  stall_tolerance=cfg.stall_tolerance)
    result = {
        "best_b": _floats(res.best_b),
        "best_value": res.best_value,
        "orbit": [_floats(o) for o in res.orbit],
        "history": res.history,
        "generations": res.generations,
        "evaluations": res.evaluations,
        "seed": res.seed,
    }
    ref = None if spec.kind == "custom" else published.compare(spec.kind, spec.n, A, res.best_value, E)
    return config, result, ref


def _sample_points(args, spec: SystemSpec, dim: int):
    if args.samples is not None:
        if args.samples < 1:
            raise ConfigError("--samples must be positive")
        B = random_unit(np.random.default_rng(args.seed), args.samples, dim)
        return ["index"], np.arange(args.samples, dtype=float)[:, None], B
    if args.resolution < 8:
        raise ConfigError("--resolution must be at least 8")
    if dim == 2:
        theta, B = circle_points(args.resolution)
        return ["theta"], theta[:, None], B
    if dim == 3:
        angles, B = sphere_grid(args.resolution)
        return ["polar", "azimuth"], angles, B
    raise ConfigError(f"grid sampling supports actuator dimension 2 or 3, got {dim}; "
                      "use --samples for random sampling")


def cmd_sample(args, spec: SystemSpec):
    A = spec.dynamics()
    E = spec.embedding()
    ev = ObjectiveEvaluator(BrunovskyMap(A), embedding=E)
    names, params, B = _sample_points(args, spec, ev.dim)
    lam, _ = parallel_evaluate(ev, B, args.workers, chunk=SAMPLE_CHUNK)
    header = names + [f"b{i + 1}" for i in range(ev.dim)] + ["lambda1"]
    table = np.column_stack([params, B, lam])
    config = _base_config(args, spec)
    config.update(resolution=None if args.samples is not None else args.resolution,
                  samples=args.samples)
    return config, header, table


def cmd_verify(args, spec: SystemSpec):
    suites = run_suites(seed=args.seed)
    result = {"passed": all(s.passed for s in suites), "suites": [s.as_dict() for s in suites]}
    return {"seed": args.seed}, result, None


def cmd_cost(args, spec: SystemSpec):
    A = spec.dynamics()
    E = spec.embedding()
    dim = spec.actuator_dim
    if args.b is not None:
        actuators = _unit(args.b, dim)[None]
    else:
        if args.samples < 1:
            raise ConfigError("--samples must be positive")
        actuators = random_unit(np.random.default_rng(args.seed), args.samples, dim)
    rows = []
    caught = []
    with warnings.catch_warnings(record=True) as log:
        warnings.simplefilter("always", RuntimeWarning)
        for b in actuators:
            state_b = b if E is None else E @ b
            for T in args.T:
                rep = factorization_report(A, state_b, T)
                rows.append({"b": _floats(b), "T": T, **rep.as_dict()})
        caught = sorted({str(w.message) for w in log})
    ratios = np.array([r["ratio"] for r in rows])
    try:
        slope = blowup_exponent(A, args.T)
    except DegenerateGridError:
        slope = None
    config = _base_config(args, spec)
    config.update(T=args.T, b=args.b, samples=None if args.b is not None else args.samples)
    result = {
        "reports": rows,
        "max_ratio": float(ratios.max()),
        "ratio_spread": float(ratios.max() / ratios.min()),
        "blowup_exponent": slope,
        "warnings": caught,
    }
    return config, result, None


def cmd_spectrum(args, spec: SystemSpec):
    A = spec.dynamics()
    config = _base_config(args, spec)
    config["b"] = args.b
    if args.b is None:
        if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(A).max())):
            raise ConfigError("system matrix is not symmetric; pass --b for the Gram spectrum")
        return config, {"target": "system", "eigenvalues": _floats(jacobi_spectrum(A))}, None
    E = spec.embedding()
    b = _unit(args.b, spec.actuator_dim)
    M = BrunovskyMap(A).gram(b if E is None else E @ b)
    return config, {"target": "gram", "b": _floats(b), "eigenvalues": _floats(jacobi_spectrum(M))}, None


COMMANDS = {
    "optimize": cmd_optimize,
    "sample": cmd_sample,
    "verify": cmd_verify,
    "cost": cmd_cost,
    "spectrum": cmd_spectrum,
}


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, newline="")


def _csv_text(header, table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in table:
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def _fail(code: int, kind: str, message: str, **extra) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code, **extra}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        spec = _system(args)
        start = time.perf_counter()
        if args.command == "sample":
            config, header, table = cmd_sample(args, spec)
            wall = time.perf_counter() - start
            if args.format == "csv":
                _emit(_csv_text(header, table), args.out)
                return 0
            result = {"columns": header, "rows": table.tolist()}
            ref = None
        else:
            config, result, ref = COMMANDS[args.command](args, spec)
            wall = time.perf_counter() - start
        report = {
            "command": args.command,
            "config": config,
            "result": result,
            "paper_reference": ref,
            "timing": {"wall_seconds": wall, "workers": args.workers},
        }
        _emit(json.dumps(report, indent=2) + "\n", args.out)
        if args.command == "verify" and not result["passed"]:
            failed = [s["name"] for s in result["suites"] if not s["passed"]]
            return _fail(EXIT_VERIFY, "verification-failed", "suites failed: " + ", ".join(failed),
                         failed=failed)
        return 0
    except NonControllableError as exc:
        return _fail(EXIT_NONCONTROLLABLE, "non-controllable", str(exc))
    except FactorizationViolation as exc:
        return _fail(EXIT_VERIFY, "factorization-violation", str(exc))
    except (ConfigError, OptactError, ValueError, OSError) as exc:
        return _fail(EXIT_CONFIG, "config", str(exc))


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
