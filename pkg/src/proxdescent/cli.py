"""Command-line harness: ``proxdescent run|verify|bench CONFIG.json``.

Exit codes: 0 success, 1 usage or config error, 2 max iterations reached,
3 a certificate failed, 4 line-search stall.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import jsonschema

from . import backend
from .core import ProxDescentError, Status
from .descent import SolverConfig, descent_bound_report, run_nsdm, run_sdm
from .problems import (
    ProblemSpec,
    corpus_by_id,
    default_corpus,
    make_abs,
    make_l1_composite,
    make_l2_quadratic,
    make_max_affine,
    make_seeded_l2_quadratic,
    make_smooth_nonconvex,
    make_strictly_convex_quadratic,
)
from .traceio import write_json, write_svg_plot, write_trace_csv
from .verify import (
    SamplingPlan,
    check_hessian_bounds,
    check_prox_regularity,
    check_prox_subgradient,
    check_subdiff_lipschitz,
    finite_difference_gradient_check,
    level_set_samples,
)

EXIT_OK, EXIT_CONFIG, EXIT_MAXITER, EXIT_CERT_FAILED, EXIT_STALL = 0, 1, 2, 3, 4

_RUN_EXIT = {
    Status.TERMINATED_TOLERANCE: EXIT_OK,
    Status.TERMINATED_ZERO_SUBGRADIENT: EXIT_OK,
    Status.MAX_ITERATIONS: EXIT_MAXITER,
    Status.LINE_SEARCH_STALL: EXIT_STALL,
}


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# schema

_NUM = {"type": "number"}
_VEC = {"type": "array", "items": _NUM, "minItems": 1}
_MAT = {"type": "array", "items": _VEC, "minItems": 1}
_PLAN = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "num_points": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "center": _VEC,
    },
}

_FAMILIES = {
    "l2_quadratic": {"dim": {"type": "integer", "minimum": 1}, "seed": {"type": "integer"}, "y": _VEC},
    "quadratic": {"A": _MAT, "b": _VEC, "c": _NUM},
    "max_affine": {
        "pieces": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["a"],
                "properties": {"a": _VEC, "b": _NUM},
            },
        },
        "quadratic_weight": {"type": "number", "minimum": 0},
    },
    "l1_composite": {"lambda": {"type": "number", "exclusiveMinimum": 0}, "A": _MAT, "b": _VEC},
    "rosenbrock": {},
    "abs": {},
}
_REQUIRED = {"quadratic": ["A", "b"], "max_affine": ["pieces"], "l1_composite": ["lambda", "A", "b"]}


def _problem_schema(family: str | None) -> dict:
    props = {"id": {"type": "string"}, "name": {"type": "string"}, "x0": _VEC}
    props.update(_FAMILIES.get(family, {}))
    return {
        "type": "object",
        "additionalProperties": False,
        "required": ["id"] + _REQUIRED.get(family, []),
        "properties": props,
    }


_CERTS = {
    "ProxSubgradientMembership": {"x": _VEC, "zeta": _VEC, "r": {"type": "number", "minimum": 0}},
    "ProxRegularity": {"L": {"type": "number", "exclusiveMinimum": 0}, "delta": {"type": "number", "exclusiveMinimum": 0}},
    "SubdiffLipschitz": {
        "L": {"type": "number", "exclusiveMinimum": 0},
        "delta": {"type": "number", "exclusiveMinimum": 0},
        "omega_points": {"type": "integer", "minimum": 1},
    },
    "HessianBounds": {"m": _NUM, "M": _NUM, "probes": {"type": "integer", "minimum": 1}},
    "DescentBound": {"L": {"type": "number", "exclusiveMinimum": 0}, "epsilon": {"type": "number", "exclusiveMinimum": 0}},
    "GradientCheck": {"x": _VEC, "h": {"type": "number", "exclusiveMinimum": 0}},
}
_CERT_REQUIRED = {
    "ProxSubgradientMembership": ["zeta", "r"],
    "ProxRegularity": ["L"],
    "SubdiffLipschitz": ["L"],
    "HessianBounds": ["m", "M"],
}

DOCUMENT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "problem": {"type": "object"},
        "problems": {"type": "array", "items": {"type": "object"}},
        "corpus": {"enum": ["default"]},
        "solver": {"enum": ["nsdm", "sdm"]},
        "solvers": {"type": "array", "items": {"enum": ["nsdm", "sdm"]}, "minItems": 1, "uniqueItems": True},
        "solver_config": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "tol_subgrad": {"type": "number", "exclusiveMinimum": 0},
                "max_iters": {"type": "integer", "minimum": 1},
                "t_max": {"type": "number", "exclusiveMinimum": 0},
                "tol_t": {"type": "number", "exclusiveMinimum": 0},
                "selection_rule": {"enum": ["MinNorm", "FirstGenerator"]},
                "probe_epsilon": {"type": "number", "exclusiveMinimum": 0},
                "store_iterates": {"type": "boolean"},
            },
        },
        "verify": {"type": "array", "items": {"type": "object", "required": ["kind"]}},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: {"type": "string"} for k in ("trace", "report", "plot", "summary", "timing")},
        },
    },
}


def _validate(doc, schema, where: str) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(p) for p in exc.absolute_path)
        raise ConfigError(f"{where}{'/' + loc if loc else ''}: {exc.message}") from None


def load_config(path) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    _validate(doc, DOCUMENT_SCHEMA, "config")
    return doc


# ---------------------------------------------------------------------------
# problem construction


def build_problem(ref: dict, seed_override: int | None = None) -> ProblemSpec:
    fam = ref.get("id")
    if not isinstance(fam, str):
        raise ConfigError("problem: missing string 'id'")
    corpus = corpus_by_id()
    if fam not in _FAMILIES and fam not in corpus:
        raise ConfigError(f"problem: unknown id {fam!r}")
    _validate(ref, _problem_schema(fam if fam in _FAMILIES else None), "problem")
    name = ref.get("name")
    x0 = ref.get("x0")
    try:
        if fam == "l2_quadratic":
            if "y" in ref:
                spec = make_l2_quadratic(ref["y"], id=name or "l2_quadratic")
            else:
                seed = seed_override if seed_override is not None else ref.get("seed", 7)
                spec = make_seeded_l2_quadratic(ref.get("dim", 10), seed)
        elif fam == "quadratic":
            spec = make_strictly_convex_quadratic(ref["A"], ref["b"], ref.get("c", 0.0), id=name or "quadratic")
        elif fam == "max_affine":
            pieces = [(p["a"], p.get("b", 0.0)) for p in ref["pieces"]]
            spec = make_max_affine(pieces, ref.get("quadratic_weight", 0.0), id=name or "max_affine")
        elif fam == "l1_composite":
            spec = make_l1_composite(ref["lambda"], ref["A"], ref["b"], id=name or "l1_composite")
        elif fam == "rosenbrock":
            spec = make_smooth_nonconvex("rosenbrock")
        elif fam == "abs":
            spec = make_abs()
        else:
            spec = corpus[fam]
        if x0 is not None:
            spec = spec.with_start(x0)
        if name and spec.id != name:
            spec = ProblemSpec(name, *[getattr(spec, f) for f in
                               ("oracle", "x0", "params", "declared", "known_minimizer", "known_min_value",
                                "level_set_center", "level_set_radius")])
    except ProxDescentError as exc:
        raise ConfigError(f"problem {fam!r}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"problem {fam!r}: {exc}") from None
    return spec


def _solver_config(doc: dict, args) -> SolverConfig:
    cfg = SolverConfig(**doc.get("solver_config", {}))
    return cfg.with_overrides(tol_subgrad=args.tol, max_iters=args.max_iters)


def _solve(spec: ProblemSpec, solver: str, cfg: SolverConfig):
    fn = run_sdm if solver == "sdm" else run_nsdm
    return fn(spec.oracle, spec.x0, cfg)


def _resolve(base: Path, given: str | None, default: str | None):
    if given is None:
        return None if default is None else base.parent / default
    p = Path(given)
    return p if p.is_absolute() else base.parent / p


# ---------------------------------------------------------------------------
# commands


def cmd_run(args) -> int:
    path = Path(args.config)
    doc = load_config(path)
    if "problem" not in doc:
        raise ConfigError("run: config needs a 'problem'")
    spec = build_problem(doc["problem"], args.seed)
    solver = doc.get("solver", "nsdm")
    cfg = _solver_config(doc, args)
    try:
        trace = _solve(spec, solver, cfg)
    except ProxDescentError as exc:
        raise ConfigError(f"run: {exc}") from None

    out = doc.get("output", {})
    stem = path.stem
    write_trace_csv(trace, _resolve(path, out.get("trace"), f"{stem}.trace.csv"))
    final = trace.final
    write_json(
        {
            "command": "run",
            "problem": spec.id,
            "solver": solver,
            "solver_config": _cfg_dict(cfg),
            "termination": trace.termination.value,
            "iterations": trace.iterations,
            "final_f": final.f_value,
            "final_subgrad_norm": final.subgrad_norm,
            "oracle_evals": final.oracle_evals,
            "x_final": trace.x_final,
        },
        _resolve(path, out.get("report"), f"{stem}.summary.json"),
    )
    plot = _resolve(path, out.get("plot"), None)
    if plot is not None:
        write_svg_plot(trace, plot, title=f"{spec.id} ({solver})")
    print(
        f"{spec.id} {solver}: {trace.termination.value} after {trace.iterations} iterations, "
        f"f={final.f_value!r}, |v|={final.subgrad_norm!r} [{backend.NAME} kernel, {trace.wall_time:.3f}s]"
    )
    return _RUN_EXIT[trace.termination]


def _cfg_dict(cfg: SolverConfig) -> dict:
    return {
        "tol_subgrad": cfg.tol_subgrad,
        "max_iters": cfg.max_iters,
        "t_max": cfg.t_max,
        "tol_t": cfg.tol_t,
        "selection_rule": cfg.selection_rule.value,
        "probe_epsilon": cfg.probe_epsilon,
    }


def _plan(spec: ProblemSpec, req: dict, center, seed_override) -> SamplingPlan:
    p = req.get("plan", {})
    seed = seed_override if seed_override is not None else p.get("seed", 42)
    radius = p.get("radius", spec.declared.get("delta", 1.0))
    return SamplingPlan(p.get("center", center), radius, p.get("num_points", 2000), seed)


def _certify(spec: ProblemSpec, req: dict, doc: dict, args):
    kind = req["kind"]
    if kind not in _CERTS:
        raise ConfigError(f"verify: unknown certificate kind {kind!r}")
    props = dict(_CERTS[kind], kind={"type": "string"}, plan=_PLAN)
    _validate(req, {"type": "object", "additionalProperties": False, "properties": props,
                    "required": ["kind"] + _CERT_REQUIRED.get(kind, [])}, f"verify[{kind}]")
    oracle = spec.oracle
    seed = args.seed
    delta = req.get("delta", spec.declared.get("delta", 1.0))

    if kind == "ProxSubgradientMembership":
        x = req.get("x", spec.x0)
        return check_prox_subgradient(oracle, x, req["zeta"], req["r"], _plan(spec, req, x, seed))
    if kind == "ProxRegularity":
        center = spec.level_set_center if spec.level_set_center is not None else spec.x0
        plan = _plan(spec, req, center, seed)
        return check_prox_regularity(oracle, plan.center, delta, req["L"], plan)
    if kind == "SubdiffLipschitz":
        plan = _plan(spec, req, spec.x0, seed)
        center = spec.level_set_center
        radius = spec.level_set_radius if spec.level_set_radius is not None else delta
        omega = level_set_samples(oracle, spec.x0, center, radius, req.get("omega_points", 200), plan.seed)
        return check_subdiff_lipschitz(oracle, omega, delta, req["L"], plan)
    if kind == "HessianBounds":
        if req["m"] > req["M"]:
            raise ConfigError("verify[HessianBounds]: need m <= M")
        return check_hessian_bounds(oracle, req["m"], req["M"], req.get("probes", 1000),
                                    seed if seed is not None else req.get("plan", {}).get("seed", 42))
    if kind == "DescentBound":
        L = req.get("L", spec.declared.get("L"))
        if L is None:
            raise ConfigError(f"verify[DescentBound]: {spec.id} declares no L; give one")
        cfg = _solver_config(doc, args)
        eps = req.get("epsilon", cfg.probe_epsilon or 0.1)
        trace = _solve(spec, doc.get("solver", "nsdm"), cfg)
        return descent_bound_report(trace, L, eps)
    return finite_difference_gradient_check(oracle, req.get("x", spec.x0), req.get("h", 1e-4))


def cmd_verify(args) -> int:
    path = Path(args.config)
    doc = load_config(path)
    if "problem" not in doc or not doc.get("verify"):
        raise ConfigError("verify: config needs a 'problem' and a non-empty 'verify' list")
    spec = build_problem(doc["problem"], args.seed)
    certs = []
    for req in doc["verify"]:
        try:
            certs.append(_certify(spec, req, doc, args))
        except (ProxDescentError, ValueError) as exc:
            raise ConfigError(f"verify[{req.get('kind')}] on {spec.id}: {exc}") from None
    passed = all(c.passed for c in certs)
    out = doc.get("output", {})
    write_json(
        {"command": "verify", "problem": spec.id, "passed": passed,
         "certificates": [c.to_dict() for c in certs]},
        _resolve(path, out.get("report"), f"{path.stem}.verify.json"),
    )
    for c in certs:
        print(f"{c.kind.value}: {'pass' if c.passed else 'FAIL'} "
              f"({c.violation_count} violations / {c.samples_tested} samples)")
    return EXIT_OK if passed else EXIT_CERT_FAILED


BENCH_COLUMNS = ["problem", "solver", "iterations", "final_f", "final_subgrad_norm", "oracle_evals", "status"]


def cmd_bench(args) -> int:
    path = Path(args.config)
    doc = load_config(path)
    specs = [build_problem(ref, args.seed) for ref in doc.get("problems", [])]
    if doc.get("corpus") == "default":
        specs += default_corpus()
    if not specs:
        raise ConfigError("bench: no problems listed")
    ids = [s.id for s in specs]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise ConfigError(f"bench: duplicate problem ids {dupes}; set 'name' to disambiguate")
    cfg = _solver_config(doc, args)
    solvers = doc.get("solvers", ["nsdm", "sdm"])
    jobs = [(s, sv) for s in specs for sv in solvers if sv == "nsdm" or s.oracle.smooth]

    def work(job):
        spec, solver = job
        return spec.id, solver, _solve(spec, solver, cfg)

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = sorted(pool.map(work, jobs), key=lambda r: (r[0], r[1]))

    out = doc.get("output", {})
    rows = []
    for pid, solver, trace in results:
        fin = trace.final
        rows.append([pid, solver, trace.iterations, repr(fin.f_value), repr(fin.subgrad_norm),
                     fin.oracle_evals, trace.termination.value])
    with open(_resolve(path, out.get("summary"), f"{path.stem}.bench.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BENCH_COLUMNS)
        w.writerows(rows)
    write_json(
        {"command": "bench", "solver_config": _cfg_dict(cfg),
         "rows": [dict(zip(BENCH_COLUMNS, [r[0], r[1], r[2], t.final.f_value, t.final.subgrad_norm, r[5], r[6]]))
                  for r, (_, _, t) in zip(rows, results)]},
        _resolve(path, out.get("report"), f"{path.stem}.bench.json"),
    )
    timing = _resolve(path, out.get("timing"), None)
    if timing is not None:
        with open(timing, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["problem", "solver", "wall_time"])
            w.writerows([pid, sv, f"{t.wall_time:.6f}"] for pid, sv, t in results)
    width = max(len(r[0]) for r in rows)
    for (pid, solver, trace), r in zip(results, rows):
        print(f"{pid:<{width}}  {solver:<4}  {r[2]:>7}  {r[6]:<26}  |v|={float(r[4]):.3e}  "
              f"{trace.wall_time:8.3f}s", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="proxdescent", description="Proximal-subgradient steepest descent runner.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn, doc in (
        ("run", cmd_run, "run one solver on one problem"),
        ("verify", cmd_verify, "run certificate checks on one problem"),
        ("bench", cmd_bench, "run solvers over a list of problems"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("config", help="JSON config document")
        p.add_argument("--tol", type=float, help="override solver_config.tol_subgrad")
        p.add_argument("--max-iters", type=int, help="override solver_config.max_iters")
        p.add_argument("--seed", type=int, help="override problem and sampling seeds")
        if name == "bench":
            p.add_argument("--jobs", type=int, default=1, help="worker threads (default 1)")
        p.set_defaults(func=fn)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"proxdescent {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ProxDescentError, ValueError, TypeError) as exc:
        print(f"proxdescent {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
