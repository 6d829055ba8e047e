"""Batch jobs: a JSON file naming weights and a list of tasks, run into a report."""
from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from . import __version__, duals, matclass, spaces
from .core.dsl import DSLSyntaxError, sequence_from_expr
from .core.probe import DEFAULT, ProbeConfig, Verdict, limit_probe
from .core.sequence import EvaluationError, Sequence, WeightError, Weights, render
from .report import SCHEMA
from .sampling import random_sequence
from .spaces import Base, SpaceId

HORIZON_ENV = "GWMSPACES_HORIZON"
DEFAULT_COUNT = 10


class JobError(ValueError):
    """A job file or task record is malformed; carries the task index when known."""

    def __init__(self, message: str, task: Optional[int] = None):
        super().__init__(message if task is None else f"task {task}: {message}")
        self.task = task


@dataclass
class JobSpec:
    weights: tuple[str, str]
    tasks: list[dict]
    defaults: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def load_job(path: str | Path) -> JobSpec:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise JobError(f"cannot read job file {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise JobError(f"job file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or "tasks" not in raw:
        raise JobError("job file needs an object with a 'tasks' list")
    w = raw.get("weights", {"u": "e", "v": "e"})
    tasks = raw["tasks"]
    if not isinstance(tasks, list) or not all(isinstance(t, dict) and "op" in t for t in tasks):
        raise JobError("every task must be an object with an 'op'")
    for i, t in enumerate(tasks):
        if t["op"] not in OPS:
            raise JobError(f"unknown op {t['op']!r}", i)
    return JobSpec((str(w.get("u", "e")), str(w.get("v", "e"))), tasks, raw.get("defaults", {}), raw)


def base_config(job: JobSpec, horizon: Optional[int] = None, tol: Optional[float] = None) -> ProbeConfig:
    """Precedence: command-line flag, then job defaults, then the environment, then builtin defaults."""
    cfg = DEFAULT
    env = os.environ.get(HORIZON_ENV)
    if env:
        cfg = replace(cfg, horizon=int(env))
    for key in ("horizon", "window", "tol", "blowup"):
        if key in job.defaults:
            cfg = replace(cfg, **{key: type(getattr(cfg, key))(job.defaults[key])})
    if horizon is not None:
        cfg = replace(cfg, horizon=horizon)
    if tol is not None:
        cfg = replace(cfg, tol=tol)
    return cfg


class _Context:
    def __init__(self, weights: Weights, cfg: ProbeConfig, seed: int):
        self.w = weights
        self.cfg = cfg
        self.seed = seed

    def config(self, task: dict) -> ProbeConfig:
        cfg = self.cfg
        for key in ("horizon", "window", "tol", "blowup"):
            if key in task:
                cfg = replace(cfg, **{key: type(getattr(cfg, key))(task[key])})
        return cfg

    def sequence(self, spec) -> Sequence:
        if isinstance(spec, str):
            return sequence_from_expr(spec)
        if isinstance(spec, dict) and len(spec) == 1:
            (kind, arg), = spec.items()
            if kind == "expr":
                return sequence_from_expr(arg)
            if kind == "random":
                return random_sequence(self.seed + int(arg))
            if kind == "basis":
                return spaces.basis_vector(self.w, int(arg))
            if kind == "inverse_transform":
                return spaces.inverse_transform(self.w, self.sequence(arg))
        raise JobError(f"bad sequence spec {spec!r}")

    def matrix(self, spec) -> matclass.InfiniteMatrix:
        if isinstance(spec, str):
            builtin = {"identity": matclass.identity, "cesaro": matclass.cesaro, "zero": matclass.zero_matrix}
            if spec in builtin:
                return builtin[spec]()
            m = re.fullmatch(r"\s*diagonal\((.*)\)\s*", spec)
            if m:
                return matclass.diagonal(sequence_from_expr(m.group(1)))
            return matclass.from_expr(spec)
        if isinstance(spec, dict) and "expr" in spec:
            kwargs = {}
            if "tail_horizon" in spec:
                kwargs["tail_horizon"] = int(spec["tail_horizon"])
            return matclass.from_expr(spec["expr"], spec.get("row_support"), **kwargs)
        raise JobError(f"bad matrix spec {spec!r}")


def _terms(s: Sequence, count: int) -> list[str]:
    return [render(t) for t in s.prefix(count)]


def _verdict_result(v: Verdict, **extra) -> dict:
    return {"status": v.outcome.value, "verdict": v.to_dict(), **extra}


def _op_forward(ctx, t):
    y = spaces.forward_transform(ctx.w, ctx.sequence(t["x"]))
    return {"status": "ok", "terms": _terms(y, int(t.get("count", DEFAULT_COUNT)))}


def _op_inverse(ctx, t):
    x = spaces.inverse_transform(ctx.w, ctx.sequence(t["y"]))
    return {"status": "ok", "terms": _terms(x, int(t.get("count", DEFAULT_COUNT)))}


def _op_basis(ctx, t):
    b = spaces.basis_vector(ctx.w, int(t["k"]))
    return {"status": "ok", "terms": _terms(b, int(t.get("count", DEFAULT_COUNT)))}


def _op_norm(ctx, t):
    cfg = ctx.config(t)
    value, v = spaces.norm(ctx.w, ctx.sequence(t["x"]), cfg.horizon, cfg)
    return _verdict_result(v, value=render(value))


def _op_membership(ctx, t):
    cfg = ctx.config(t)
    space = SpaceId(Base(t.get("space", "c_zero")), ctx.w)
    return _verdict_result(spaces.membership(ctx.w, ctx.sequence(t["x"]), space, cfg.horizon, cfg))


def _op_expand(ctx, t):
    cfg = ctx.config(t)
    space = SpaceId(Base(t.get("space", "c_zero")), ctx.w)
    ex = spaces.expand(ctx.w, ctx.sequence(t["x"]), space, cfg.horizon, cfg)
    out = {"status": "ok", "coefficients": _terms(ex.coefficients, int(t.get("count", DEFAULT_COUNT)))}
    if ex.limit is not None:
        out["limit"] = render(ex.limit)
        out["limit_exact"] = ex.limit_exact
        out["limit_verdict"] = ex.limit_verdict.to_dict()
    return out


def _op_residual(ctx, t):
    cfg = ctx.config(t)
    r = spaces.partial_sum_residual(ctx.w, ctx.sequence(t["x"]), int(t["m"]), cfg.horizon)
    return {"status": "ok", "value": render(r)}


def _op_ad_probe(ctx, t):
    cfg = ctx.config(t)
    x = ctx.sequence(t["x"])
    ms = t["m"] if isinstance(t["m"], list) else [t["m"]]
    values = [render(spaces.ad_probe(ctx.w, x, int(m), cfg.horizon)) for m in ms]
    hypothesis = spaces.membership(ctx.w, ctx.w.u, SpaceId(Base.C_ZERO, ctx.w), cfg.horizon, cfg)
    return {"status": "ok", "m": [int(m) for m in ms], "residuals": values,
            "hypothesis": {"statement": "the weight sequence u itself lies in c_0(u,v,Delta)",
                           "verdict": hypothesis.to_dict()}}


def _op_limit(ctx, t):
    return _verdict_result(limit_probe(ctx.sequence(t["x"]), ctx.config(t)))


def _dual_result(report: duals.DualCheckReport) -> dict:
    return {"status": report.overall.outcome.value, "report": report.to_dict()}


def _op_alpha(ctx, t):
    cfg = ctx.config(t)
    return _dual_result(duals.check_alpha(ctx.w, ctx.sequence(t["a"]), cfg.horizon,
                                          int(t.get("max_cols", 15)), cfg))


def _op_beta(ctx, t):
    cfg = ctx.config(t)
    return _dual_result(duals.check_beta(ctx.w, ctx.sequence(t["a"]), Base(t.get("base", "c_zero")),
                                         cfg.horizon, cfg))


def _op_gamma(ctx, t):
    cfg = ctx.config(t)
    return _dual_result(duals.check_gamma(ctx.w, ctx.sequence(t["a"]), cfg.horizon, cfg))


def _classify(fn):
    def run(ctx, t):
        cfg = ctx.config(t)
        kwargs = {"probe_cols": int(t.get("probe_cols", 8))}
        if "tail_horizon" in t:
            kwargs["tail_horizon"] = int(t["tail_horizon"])
        rep = fn(ctx.matrix(t["matrix"]), ctx.w, cfg.horizon, cfg, **kwargs)
        return {"status": rep.overall.outcome.value, "report": rep.to_dict()}
    return run


def _op_toeplitz(ctx, t):
    cfg = ctx.config(t)
    v = matclass.toeplitz_condition(ctx.matrix(t["matrix"]), t["which"], cfg.horizon, cfg,
                                    max_cols=int(t.get("max_cols", 15)))
    return _verdict_result(v)


def _op_dual_transform(ctx, t):
    D = matclass.dual_transform(ctx.matrix(t["matrix"]), ctx.w, t.get("tail_horizon"))
    rows = int(t.get("rows", 5))
    count = int(t.get("count", DEFAULT_COUNT))
    return {"status": "ok", "approximate_tail": D.approximate,
            "rows": [[render(D.entry(n, k)) for k in range(count)] for n in range(rows)]}


OPS = {
    "forward_transform": _op_forward,
    "inverse_transform": _op_inverse,
    "basis_vector": _op_basis,
    "norm": _op_norm,
    "membership": _op_membership,
    "expand": _op_expand,
    "partial_sum_residual": _op_residual,
    "ad_probe": _op_ad_probe,
    "limit_probe": _op_limit,
    "check_alpha": _op_alpha,
    "check_beta": _op_beta,
    "check_gamma": _op_gamma,
    "classify_into_linf": _classify(matclass.classify_into_linf),
    "classify_into_c": _classify(matclass.classify_into_c),
    "toeplitz_condition": _op_toeplitz,
    "dual_transform": _op_dual_transform,
}

VERDICT_STATUSES = ("holds", "fails", "inconclusive")


def exit_code(results: list[dict]) -> int:
    statuses = [r["status"] for r in results]
    if "error" in statuses:
        return 1
    if "fails" in statuses:
        return 2
    if "inconclusive" in statuses:
        return 3
    return 0


def run_job(job: JobSpec, cfg: ProbeConfig, seed: int = 0) -> tuple[dict, int]:
    """Run every task in order. Returns the report and the process exit code."""
    try:
        weights = Weights(sequence_from_expr(job.weights[0]), sequence_from_expr(job.weights[1]))
    except (DSLSyntaxError, WeightError, EvaluationError) as exc:
        raise JobError(f"weights: {exc}") from exc
    ctx = _Context(weights, cfg, seed)
    results, seconds = [], []
    for i, task in enumerate(job.tasks):
        start = time.perf_counter()
        try:
            result = OPS[task["op"]](ctx, task)
        except DSLSyntaxError as exc:
            result = {"status": "error", "error": f"task {i}: {exc}", "position": exc.position}
        except (JobError, EvaluationError, WeightError, ValueError, KeyError, ArithmeticError) as exc:
            result = {"status": "error", "error": f"task {i}: {type(exc).__name__}: {exc}"}
        seconds.append(time.perf_counter() - start)
        results.append({"index": i, "op": task["op"], **result})
    code = exit_code(results)
    counts = {s: sum(r["status"] == s for r in results) for s in (*VERDICT_STATUSES, "ok", "error")}
    report = {
        "schema": SCHEMA,
        "tool_version": __version__,
        "seed": seed,
        "config": {"horizon": cfg.horizon, "window": cfg.window, "tol": cfg.tol, "blowup": cfg.blowup},
        "job": job.raw,
        "results": results,
        "summary": {**counts, "exit_code": code},
        "timing": {"task_seconds": seconds, "total_seconds": sum(seconds)},
    }
    return report, code
