"""Command-line front end: solve, qbp, verify, scan, seed-special.

Problem and result files are JSON with a fixed key set (unknown keys are
rejected so typos fail loudly) and complex numbers serialized as [re, im]
pairs; the exact schemas are documented in the README.  Exit codes:

    0  converged / verification passed
    1  malformed input or invalid instance
    2  infeasible / verification failed
    3  iteration budget exhausted before the tolerances were met
    4  problem file hash does not match the result file

The EOI_LOG environment variable (error|warn|info|debug) controls diagnostics
on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from .brachistochrone import qbp_trajectory, solve_qbp
from .linalg import phase_invariant_fidelity
from .problem import (
    REGIME_OVER,
    ProblemSpec,
    constraint_residuals,
    counting_report,
)
from .reconstruct import RESIDUAL_PRECONDITION, reconstruct_hamiltonian, verify
from .solver import (
    STATUS_CONVERGED,
    STATUS_INFEASIBLE,
    STATUS_MAX_ITERS,
    SolverConfig,
    solve,
    solve_least_squares,
)
from .uniform import (
    interpolation_residuals,
    is_eoi_stationary,
    regauged_objective,
    uniform_seed,
)

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_MAX_ITERS = 3
EXIT_HASH_MISMATCH = 4

SCHEMA_VERSION = "1"

_STATUS_EXIT = {
    STATUS_CONVERGED: EXIT_OK,
    STATUS_INFEASIBLE: EXIT_INFEASIBLE,
    STATUS_MAX_ITERS: EXIT_MAX_ITERS,
}

_PROBLEM_KEYS = {"schema_version", "dimension", "states", "times", "tolerances", "seed"}
_RESULT_KEYS = {
    "schema_version",
    "problem_sha256",
    "status",
    "mode",
    "objective",
    "spectrum",
    "weights",
    "phases",
    "hamiltonian",
    "verification",
    "multistart",
    "timing",
    "trajectory",
}
_CONFIG_FIELDS = {f.name for f in dataclasses.fields(SolverConfig)}

_log = logging.getLogger(__name__)


class InputError(Exception):
    """Malformed file or command-line input; maps to exit code 1."""


def _configure_logging() -> None:
    name = os.environ.get("EOI_LOG", "warn").strip().lower()
    levels = {
        "error": logging.ERROR,
        "warn": logging.WARNING,
        "warning": logging.WARNING,
        "info": logging.INFO,
        "debug": logging.DEBUG,
    }
    level = levels.get(name, logging.WARNING)
    root = logging.getLogger("eoi")
    root.setLevel(level)
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)
    if name not in levels and name:
        root.warning("unknown EOI_LOG level %r, using warn", name)


# ---------------------------------------------------------------------------
# JSON helpers


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    return x


def _pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _matrix_pairs(mat: np.ndarray) -> list:
    return [[_pair(z) for z in row] for row in np.asarray(mat)]


def _complex_vector(raw, where: str) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise InputError(f"{where}: expected a nonempty list of [re, im] pairs")
    out = np.empty(len(raw), dtype=np.complex128)
    for k, item in enumerate(raw):
        if (
            not isinstance(item, list)
            or len(item) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in item)
        ):
            raise InputError(f"{where}[{k}]: expected an [re, im] pair of numbers")
        out[k] = complex(item[0], item[1])
    return out


def _load_json(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be a JSON object")
    return data


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# problem / result files


def load_problem(path: Path):
    """Parse and validate a problem file; returns (spec, overrides, seed)."""
    data = _load_json(path)
    unknown = sorted(set(data) - _PROBLEM_KEYS)
    if unknown:
        raise InputError(f"{path}: unknown key(s) {unknown}")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise InputError(
            f"{path}: schema_version must be {SCHEMA_VERSION!r}, got {data.get('schema_version')!r}"
        )
    for key in ("dimension", "states", "times"):
        if key not in data:
            raise InputError(f"{path}: missing required key {key!r}")
    dim = data["dimension"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InputError(f"{path}: dimension must be a positive integer")
    raw_states = data["states"]
    raw_times = data["times"]
    if not isinstance(raw_states, list) or len(raw_states) < 2:
        raise InputError(f"{path}: states must list at least two states")
    if not isinstance(raw_times, list) or len(raw_times) != len(raw_states):
        raise InputError(
            f"{path}: times must list exactly one timestamp per state "
            f"({len(raw_states)} states)"
        )
    states = []
    for i, raw in enumerate(raw_states):
        vec = _complex_vector(raw, f"states[{i}]")
        if vec.size != dim:
            raise InputError(
                f"{path}: states[{i}] has {vec.size} amplitudes, dimension is {dim}"
            )
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > 1e-6:
            raise InputError(
                f"{path}: states[{i}] is not normalized (|psi| = {norm!r}); "
                f"deviations above 1e-6 are rejected"
            )
        if abs(norm - 1.0) > 1e-10:
            _log.warning(
                "states[%d] renormalized (|psi| deviated by %.3e)", i, abs(norm - 1.0)
            )
        states.append(vec / norm)
    times = []
    for i, t in enumerate(raw_times):
        if not isinstance(t, (int, float)) or isinstance(t, bool):
            raise InputError(f"{path}: times[{i}] must be a number")
        times.append(float(t))
    overrides = {}
    if "tolerances" in data:
        tol = data["tolerances"]
        if not isinstance(tol, dict):
            raise InputError(f"{path}: tolerances must be an object")
        bad = sorted(set(tol) - _CONFIG_FIELDS)
        if bad:
            raise InputError(
                f"{path}: unknown tolerance key(s) {bad}; known: {sorted(_CONFIG_FIELDS)}"
            )
        overrides.update(tol)
    seed = data.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise InputError(f"{path}: seed must be an integer")
    try:
        spec = ProblemSpec(states=np.array(states), times=np.array(times))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return spec, overrides, seed


def write_result(path: Path, payload: dict) -> None:
    payload = _jsonable(payload)
    unknown = sorted(set(payload) - _RESULT_KEYS)
    if unknown:
        raise ValueError(f"internal error: unknown result keys {unknown}")
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_result(path: Path) -> dict:
    data = _load_json(path)
    unknown = sorted(set(data) - _RESULT_KEYS)
    if unknown:
        raise InputError(f"{path}: unknown key(s) {unknown}")
    for key in ("schema_version", "problem_sha256", "status", "hamiltonian"):
        if key not in data:
            raise InputError(f"{path}: missing required key {key!r}")
    if data["schema_version"] != SCHEMA_VERSION:
        raise InputError(f"{path}: unsupported schema_version {data['schema_version']!r}")
    return data


def _solver_config(overrides: dict, file_seed, args) -> SolverConfig:
    merged = dict(overrides)
    if file_seed is not None:
        merged.setdefault("rng_seed", file_seed)
    flag_map = {
        "constraint_tol": args.tol_constraint,
        "stationarity_tol": args.tol_stationarity,
        "num_starts": args.starts,
        "rng_seed": args.seed,
        "rank_hint": args.rank_hint,
        "threads": args.threads,
    }
    for key, value in flag_map.items():
        if value is not None:
            merged[key] = value
    merged.setdefault("threads", os.cpu_count() or 1)
    try:
        return SolverConfig(**merged)
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid solver configuration: {exc}") from exc


def _multistart_payload(result) -> list[dict]:
    return [
        {
            "start": s.index,
            "kind": s.kind,
            "status": s.status,
            "objective": s.objective,
            "constraint_residual_norm": s.constraint_residual_norm,
            "residual_history": list(s.residual_history),
        }
        for s in result.starts_summary
    ]


def _verification_payload(report) -> dict:
    return {
        "fidelities": list(report.fidelities),
        "recovered_phases": list(report.recovered_phases),
        "objective_tr_h2": report.objective,
        "trace": report.trace,
        "hermiticity_residual": report.hermiticity_residual,
        "passed": report.passed,
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(args) -> int:
    path = Path(args.problem)
    spec, overrides, file_seed = load_problem(path)
    config = _solver_config(overrides, file_seed, args)
    regime = counting_report(spec).regime
    if regime == REGIME_OVER and not args.least_squares:
        raise InputError(
            f"{path}: instance is overdetermined ({regime}); rerun with --least-squares"
        )
    t0 = time.perf_counter()
    if args.least_squares:
        result = solve_least_squares(spec, config)
    else:
        result = solve(spec, config)
    elapsed = time.perf_counter() - t0
    hamiltonian = None
    verification = None
    if result.constraint_residual_norm <= RESIDUAL_PRECONDITION:
        ham = reconstruct_hamiltonian(spec, result.candidate)
        report = verify(spec, ham)
        hamiltonian = _matrix_pairs(ham.matrix)
        verification = _verification_payload(report)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "problem_sha256": _sha256(path),
        "status": result.status,
        "mode": "least-squares" if args.least_squares else "energy-optimal",
        "objective": result.objective_value,
        "spectrum": list(result.candidate.eigenvalues),
        "weights": list(result.candidate.weights),
        "phases": list(result.candidate.phases),
        "hamiltonian": hamiltonian,
        "verification": verification,
        "multistart": _multistart_payload(result),
        "timing": {"seconds": elapsed},
    }
    out = Path(args.out) if args.out else path.parent / (path.stem + ".result.json")
    write_result(out, payload)
    print(
        f"status={result.status} objective={result.objective_value:.12g} "
        f"residual={result.constraint_residual_norm:.3e}",
        file=sys.stderr,
    )
    if verification is not None:
        fids = " ".join(f"{f:.12f}" for f in verification["fidelities"])
        print(f"fidelities: {fids}", file=sys.stderr)
    return _STATUS_EXIT[result.status]


def cmd_qbp(args) -> int:
    if args.problem:
        spec, _, _ = load_problem(Path(args.problem))
        if spec.num_states != 2:
            raise InputError("qbp expects a two-state problem file")
        psi1, psi2 = spec.states[0], spec.states[1]
        t = float(spec.times[1])
        problem_sha = _sha256(Path(args.problem))
    else:
        if args.psi1 is None or args.psi2 is None or args.t is None:
            raise InputError("qbp needs --psi1, --psi2 and --t (or --problem)")
        try:
            psi1 = _complex_vector(json.loads(args.psi1), "--psi1")
            psi2 = _complex_vector(json.loads(args.psi2), "--psi2")
        except json.JSONDecodeError as exc:
            raise InputError(f"inline state is not valid JSON: {exc}") from exc
        for name, vec in (("--psi1", psi1), ("--psi2", psi2)):
            norm = float(np.linalg.norm(vec))
            if abs(norm - 1.0) > 1e-6:
                raise InputError(f"{name} is not normalized (|psi| = {norm!r})")
        psi1 = psi1 / np.linalg.norm(psi1)
        psi2 = psi2 / np.linalg.norm(psi2)
        t = float(args.t)
        problem_sha = ""
    try:
        sol = solve_qbp(psi1, psi2, t)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    spec = ProblemSpec(states=np.array([psi1, psi2]), times=np.array([0.0, t]))
    report = verify(spec, sol.hamiltonian)
    trajectory = None
    if args.samples and args.samples > 0:
        taus = np.linspace(0.0, t, args.samples)
        trajectory = []
        for tau in taus:
            state = qbp_trajectory(sol, float(tau))
            trajectory.append(
                {
                    "tau": float(tau),
                    "fidelity_to_target": phase_invariant_fidelity(state, psi2),
                    "state": [_pair(z) for z in state],
                }
            )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "problem_sha256": problem_sha,
        "status": STATUS_CONVERGED,
        "mode": "qbp-analytic",
        "objective": sol.objective,
        "spectrum": list(sol.candidate.eigenvalues),
        "weights": list(sol.candidate.weights),
        "phases": list(sol.candidate.phases),
        "hamiltonian": _matrix_pairs(sol.hamiltonian.matrix),
        "verification": _verification_payload(report),
        "multistart": [],
        "timing": {"seconds": 0.0},
    }
    if trajectory is not None:
        payload["trajectory"] = trajectory
    print(
        f"epsilon={sol.epsilon:.12g} objective={sol.objective:.12g} "
        f"overlap_mag={abs(sol.overlap):.12g}",
        file=sys.stderr,
    )
    if args.out:
        write_result(Path(args.out), payload)
    else:
        print(json.dumps(_jsonable(payload), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_verify(args) -> int:
    problem_path = Path(args.problem)
    result_path = Path(args.result)
    spec, _, _ = load_problem(problem_path)
    data = load_result(result_path)
    stored = data["problem_sha256"]
    if stored and stored != _sha256(problem_path):
        print("problem file does not match the hash in the result file", file=sys.stderr)
        return EXIT_HASH_MISMATCH
    if data["hamiltonian"] is None:
        print("result file carries no Hamiltonian (non-converged run)", file=sys.stderr)
        return EXIT_INFEASIBLE
    rows = data["hamiltonian"]
    try:
        h = np.array(
            [[complex(entry[0], entry[1]) for entry in row] for row in rows],
            dtype=np.complex128,
        )
    except (TypeError, IndexError) as exc:
        raise InputError(f"{result_path}: malformed hamiltonian entries: {exc}") from exc
    if h.shape != (spec.dimension, spec.dimension):
        raise InputError(
            f"{result_path}: hamiltonian shape {h.shape} does not match dimension "
            f"{spec.dimension}"
        )
    report = verify(spec, h)
    for i in range(spec.num_states):
        print(f"t={spec.times[i]:.6g} fidelity={report.fidelities[i]:.12f}")
    print(f"pass={report.passed}")
    return EXIT_OK if report.passed else EXIT_INFEASIBLE


def _parse_range(raw: str) -> np.ndarray:
    parts = raw.split(":")
    if len(parts) != 3:
        raise InputError("--range expects lo:hi:count")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise InputError(f"invalid --range {raw!r}: {exc}") from exc
    if count < 1:
        raise InputError("--range count must be at least 1")
    if hi < lo:
        raise InputError("--range needs hi >= lo")
    return np.linspace(lo, hi, count)


def _emit_table(out_path, header: list[str], rows: list[list]) -> None:
    lines = [" ".join(header)]
    for row in rows:
        lines.append(" ".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row))
    text = "\n".join(lines) + "\n"
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_scan(args) -> int:
    if args.mode == "qbp-overlap":
        if args.range is None or args.t is None:
            raise InputError("qbp-overlap scan needs --range (overlaps) and --t")
        grid = _parse_range(args.range)
        if np.any(grid < 0) or np.any(grid > 1):
            raise InputError("overlap magnitudes must lie in [0, 1]")
        rows = []
        for d in grid:
            psi1 = np.array([1.0, 0.0], dtype=np.complex128)
            psi2 = np.array([d, np.sqrt(max(0.0, 1.0 - d * d))], dtype=np.complex128)
            sol = solve_qbp(psi1, psi2, float(args.t))
            rows.append([float(d), sol.epsilon, sol.objective])
        _emit_table(args.out, ["overlap", "epsilon", "objective"], rows)
        return EXIT_OK
    if args.mode == "theta0":
        if args.range is None or args.n is None or args.m is None or args.t is None:
            raise InputError("theta0 scan needs --range, --n, --m and --t")
        rows = []
        for th in _parse_range(args.range):
            seed = uniform_seed(args.n, args.m, float(args.t), float(th))
            raw = float(np.sum(seed.candidate.eigenvalues**2))
            rows.append([float(th), raw, regauged_objective(seed)])
        _emit_table(args.out, ["theta0", "raw_objective", "regauged_objective"], rows)
        return EXIT_OK
    if args.mode == "multistart":
        if not args.problem or not args.values:
            raise InputError("multistart scan needs --problem and --values")
        try:
            counts = [int(v) for v in args.values.split(",") if v]
        except ValueError as exc:
            raise InputError(f"invalid --values: {exc}") from exc
        if not counts or any(c < 1 for c in counts):
            raise InputError("--values must be positive integers")
        spec, overrides, file_seed = load_problem(Path(args.problem))
        rows = []
        for count in counts:
            cfg_args = dict(overrides)
            if file_seed is not None:
                cfg_args.setdefault("rng_seed", file_seed)
            if args.seed is not None:
                cfg_args["rng_seed"] = args.seed
            cfg_args["num_starts"] = count
            result = solve(spec, SolverConfig(**cfg_args))
            rows.append([count, result.objective_value, result.status])
        _emit_table(args.out, ["starts", "best_objective", "status"], rows)
        return EXIT_OK
    raise InputError(f"unknown scan mode {args.mode!r}")


def cmd_seed_special(args) -> int:
    try:
        seed = uniform_seed(
            args.n, args.m, args.t, args.theta0 if args.theta0 is not None else None
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    cfg = SolverConfig(
        num_starts=args.starts if args.starts else 8,
        rng_seed=args.seed if args.seed is not None else 0,
    )
    report = is_eoi_stationary(seed, config=cfg, compare_solver=not args.no_solve)
    payload = {
        "n": seed.n,
        "m": seed.m,
        "t": seed.t,
        "theta0": seed.theta0,
        "spectrum": list(seed.candidate.eigenvalues),
        "weights": list(seed.candidate.weights),
        "lag_residual_magnitudes": [float(abs(z)) for z in interpolation_residuals(seed)],
        "regauged_objective": report.seed_objective,
        "stationarity": {
            "residual_norm": report.residual_norm,
            "verdict": report.verdict,
        },
        "solver": None
        if report.solver_objective is None
        else {
            "objective": report.solver_objective,
            "status": report.solver_status,
            "found_lower": report.solver_found_lower,
        },
    }
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-constraint", type=float, default=None, dest="tol_constraint")
    p.add_argument("--tol-stationarity", type=float, default=None, dest="tol_stationarity")
    p.add_argument("--starts", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--rank-hint", type=int, default=None, dest="rank_hint")
    p.add_argument("--threads", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eoi",
        description="Synthesize and verify energy-optimal interpolating Hamiltonians.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem file")
    p_solve.add_argument("problem", help="problem JSON file")
    p_solve.add_argument("--out", default=None, help="result file path")
    p_solve.add_argument(
        "--least-squares",
        action="store_true",
        dest="least_squares",
        help="best-effort mode for overdetermined instances",
    )
    _add_solver_flags(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_qbp = sub.add_parser("qbp", help="closed-form two-state solution")
    p_qbp.add_argument("--psi1", default=None, help="JSON list of [re, im] pairs")
    p_qbp.add_argument("--psi2", default=None, help="JSON list of [re, im] pairs")
    p_qbp.add_argument("--t", type=float, default=None, help="evolution time")
    p_qbp.add_argument("--problem", default=None, help="two-state problem file")
    p_qbp.add_argument("--samples", type=int, default=0, help="trajectory sample count")
    p_qbp.add_argument("--out", default=None)
    p_qbp.set_defaults(func=cmd_qbp)

    p_verify = sub.add_parser("verify", help="re-verify a result file by evolution")
    p_verify.add_argument("problem")
    p_verify.add_argument("result")
    p_verify.set_defaults(func=cmd_verify)

    p_scan = sub.add_parser("scan", help="emit columnar data over a parameter grid")
    p_scan.add_argument("--mode", required=True, choices=["qbp-overlap", "theta0", "multistart"])
    p_scan.add_argument("--range", default=None, help="lo:hi:count")
    p_scan.add_argument("--values", default=None, help="comma-separated integers")
    p_scan.add_argument("--n", type=int, default=None)
    p_scan.add_argument("--m", type=int, default=None)
    p_scan.add_argument("--t", type=float, default=None)
    p_scan.add_argument("--problem", default=None)
    p_scan.add_argument("--starts", type=int, default=None)
    p_scan.add_argument("--seed", type=int, default=None)
    p_scan.add_argument("--out", default=None)
    p_scan.set_defaults(func=cmd_scan)

    p_seed = sub.add_parser("seed-special", help="uniform-spectrum seed report")
    p_seed.add_argument("--n", type=int, required=True)
    p_seed.add_argument("--m", type=int, required=True)
    p_seed.add_argument("--t", type=float, required=True)
    p_seed.add_argument("--theta0", type=float, default=None)
    p_seed.add_argument("--no-solve", action="store_true", dest="no_solve")
    p_seed.add_argument("--starts", type=int, default=None)
    p_seed.add_argument("--seed", type=int, default=None)
    p_seed.add_argument("--out", default=None)
    p_seed.set_defaults(func=cmd_seed_special)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
