"""Steepest-descent drivers with exact line search.

:func:`run_nsdm` picks a proximal subgradient ``v`` at each iterate (minimum
norm by default), moves along ``-v/|v|`` with an exact line search, and stops
once ``|v| <= tol_subgrad``. :func:`run_sdm` is the smooth special case that
uses the gradient directly; on smooth oracles both produce the same trace.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Callable, Optional

from .core import (
    CertificateKind,
    InsufficientTrace,
    InvalidStart,
    IterationRecord,
    NotSmooth,
    RunTrace,
    Status,
    ViolationLog,
    norm,
)
from .linesearch import DEFAULT_T_MAX, DEFAULT_TOL_T, LineSearchStatus, exact_line_search
from .oracle import Oracle, Rule, select_subgradient

# iterates are kept in the trace only up to this dimension unless asked otherwise
STORE_X_MAX_DIM = 64


@dataclass(frozen=True)
class SolverConfig:
    tol_subgrad: float = 1e-8
    max_iters: int = 100_000
    t_max: float = DEFAULT_T_MAX
    tol_t: float = DEFAULT_TOL_T
    selection_rule: Rule = Rule.MIN_NORM
    probe_epsilon: Optional[float] = None
    store_iterates: Optional[bool] = None

    def __post_init__(self):
        object.__setattr__(self, "selection_rule", Rule(self.selection_rule))
        if not self.tol_subgrad > 0:
            raise ValueError("tol_subgrad must be > 0")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError("max_iters must be a positive integer")
        if not (self.t_max > 0 and self.tol_t > 0):
            raise ValueError("t_max and tol_t must be > 0")
        if self.probe_epsilon is not None and not self.probe_epsilon > 0:
            raise ValueError("probe_epsilon must be > 0")

    def with_overrides(self, **kw) -> "SolverConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _run(oracle: Oracle, x0, cfg: SolverConfig, direction: Callable) -> RunTrace:
    start = time.perf_counter()
    x = oracle._check(x0)
    f = oracle.eval(x)
    if not math.isfinite(f):
        raise InvalidStart(f"f(x0) = {f}")
    store = cfg.store_iterates if cfg.store_iterates is not None else oracle.dim <= STORE_X_MAX_DIM
    evals = 1
    records = []
    n = 0
    while True:
        v = direction(x)
        vnorm = norm(v)

        status = None
        if vnorm == 0.0:
            status = Status.TERMINATED_ZERO_SUBGRADIENT
        elif vnorm <= cfg.tol_subgrad:
            status = Status.TERMINATED_TOLERANCE
        elif n >= cfg.max_iters:
            status = Status.MAX_ITERATIONS
        else:
            u = -v / vnorm
            ls = exact_line_search(oracle, x, u, cfg.t_max, cfg.tol_t)
            evals += ls.evaluations
            if ls.status is LineSearchStatus.AT_ZERO:
                status = Status.LINE_SEARCH_STALL

        if status is not None:
            records.append(IterationRecord(n, x if store else None, f, vnorm, 0.0, evals, status))
            break
        records.append(IterationRecord(n, x if store else None, f, vnorm, ls.t_star, evals))
        x = x + ls.t_star * u
        x.flags.writeable = False
        f = ls.f_at_t_star
        n += 1
    return RunTrace(tuple(records), x, time.perf_counter() - start)


def run_nsdm(oracle: Oracle, x0, cfg: SolverConfig | None = None) -> RunTrace:
    cfg = cfg or SolverConfig()

    def direction(x):
        return select_subgradient(oracle.prox_subdifferential(x), cfg.selection_rule)

    return _run(oracle, x0, cfg, direction)


def run_sdm(oracle: Oracle, x0, cfg: SolverConfig | None = None) -> RunTrace:
    """Classical steepest descent; ``oracle`` must be smooth everywhere."""
    if not oracle.smooth:
        raise NotSmooth(f"{oracle.id} ({oracle.class_tag.value}) can return non-singleton descriptors")
    cfg = cfg or SolverConfig()
    return _run(oracle, x0, cfg, oracle.gradient)


def descent_bound_report(trace: RunTrace, L: float, probe_epsilon: float, slack: float = 1e-9):
    """Check ``|v_{n-1}| <= (f_{n-1} - f_n)/eps + 1.5 L eps`` on consecutive records."""
    if not (L > 0 and probe_epsilon > 0):
        raise ValueError("L and probe_epsilon must be > 0")
    recs = trace.records
    if len(recs) < 2:
        raise InsufficientTrace("descent bound needs at least two records")
    eps = float(probe_epsilon)
    log = ViolationLog()
    worst = -math.inf
    for prev, cur in zip(recs, recs[1:]):
        rhs = (prev.f_value - cur.f_value) / eps + 1.5 * L * eps + slack
        worst = max(worst, prev.subgrad_norm - rhs)
        if prev.subgrad_norm > rhs:
            log.add(
                {"n": cur.n, "f_prev": prev.f_value, "f_next": cur.f_value, "subgrad_norm": prev.subgrad_norm},
                prev.subgrad_norm,
                rhs,
            )
    return log.certificate(
        CertificateKind.DESCENT_BOUND,
        len(recs) - 1,
        {"L": L, "epsilon": eps, "max_excess": worst},
    )
