"""Matrix maps from c(u, v, Delta) into l_infinity and into c.

A matrix A acts on ``x = T^-1 y`` as ``(Ax)_n = sum_k D(n, k) y_k`` with

    D(n, k) = a_nk/(u_k v_k) + (1/u_k)(1/v_k - 1/v_{k+1}) * sum_{j>k} a_nj,

so every condition is evaluated on D with the row-sum/column-limit library.
Rows are exact when A declares a row support; otherwise they are cut at a
tail horizon and the report says so.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional

from gmpy2 import mpq

from . import toeplitz
from .core.dsl import compile_expr, parse_expr, pretty
from .core.probe import (
    DEFAULT, ProbeConfig, Verdict, conjunction, limit_equals,
)
from .core.sequence import ONE, ZERO, Rational, Sequence, Weights, to_rational

DEFAULT_TAIL_HORIZON = 4096


class Target(str, Enum):
    INTO_ELL_INFINITY = "into_ell_infinity"
    INTO_C = "into_c"


class ToeplitzCondition(str, Enum):
    C0_TO_L1 = "c0_to_l1"
    C0_TO_C = "c0_to_c"
    C0_TO_LINF = "c0_to_linf"
    C0_TO_C_NULL = "c0_to_c_null"


class InfiniteMatrix:
    """An entry rule ``(n, k) -> Q`` with an optional row support ``r(n)``.

    With a row support, ``entry(n, k) == 0`` for ``k > r(n)`` is enforced by
    this wrapper whatever the raw rule says. Without one, rows are read up to ``tail_horizon`` and the
    matrix is flagged approximate.
    """

    def __init__(self, entry: Callable[[int, int], object], row_support: Optional[Callable[[int], int]] = None,
                 *, name: str = "matrix", tail_horizon: int = DEFAULT_TAIL_HORIZON,
                 row: Optional[Callable[[int], list]] = None):
        self._entry = entry
        self._support = row_support
        self._row = row
        self.name = name
        self.tail_horizon = tail_horizon

    def __repr__(self) -> str:
        return f"InfiniteMatrix({self.name})"

    @property
    def approximate(self) -> bool:
        return self._support is None

    def row_support(self, n: int) -> int:
        return self._support(n) if self._support is not None else self.tail_horizon

    def entry(self, n: int, k: int) -> Rational:
        if k < 0 or n < 0 or (self._support is not None and k > self._support(n)):
            return ZERO
        return to_rational(self._entry(n, k))

    def row(self, n: int) -> list[Rational]:
        if self._row is not None:
            return self._row(n)
        return [to_rational(self._entry(n, k)) for k in range(self.row_support(n) + 1)]

    def spot_check(self, rows: int = 16, beyond: int = 4) -> None:
        """Raise if a prebuilt row disagrees with the entry rule, or if the
        row support is not a nonnegative integer."""
        if self._support is None:
            return
        for n in range(rows):
            r = self._support(n)
            if not isinstance(r, int) or r < 0:
                raise ValueError(f"{self.name}: row support at n={n} is {r!r}")
            if self._row is not None:
                built = [to_rational(x) for x in self._row(n)]
                if built != [self.entry(n, k) for k in range(r + 1)]:
                    raise ValueError(f"{self.name}: row {n} disagrees with its entry rule")
            if any(self.entry(n, k) != 0 for k in range(r + 1, r + 1 + beyond)):
                raise ValueError(f"{self.name}: nonzero entry beyond support in row {n}")


def identity() -> InfiniteMatrix:
    return InfiniteMatrix(lambda n, k: ONE if n == k else ZERO, lambda n: n, name="identity",
                          row=lambda n: [ZERO] * n + [ONE])


def cesaro() -> InfiniteMatrix:
    return InfiniteMatrix(lambda n, k: mpq(1, n + 1), lambda n: n, name="cesaro",
                          row=lambda n: [mpq(1, n + 1)] * (n + 1))


def zero_matrix() -> InfiniteMatrix:
    return InfiniteMatrix(lambda n, k: ZERO, lambda n: 0, name="zero", row=lambda n: [ZERO])


def diagonal(d: Sequence) -> InfiniteMatrix:
    return InfiniteMatrix(lambda n, k: d.eval(n) if n == k else ZERO, lambda n: n,
                          name=f"diagonal({d.name or ''})", row=lambda n: [ZERO] * n + [d.eval(n)])


def _support_rule(text: str) -> Callable[[int], int]:
    fn = compile_expr(parse_expr(text, variables=("n",)))

    def support(n: int) -> int:
        r = fn({"n": n})
        if r.denominator != 1 or r < 0:
            raise ValueError(f"row support must be a nonnegative integer, got {r} at n={n}")
        return int(r)

    return support


def from_expr(text: str, row_support: Optional[str] = None, *,
              tail_horizon: int = DEFAULT_TAIL_HORIZON) -> InfiniteMatrix:
    """Matrix from a DSL rule in ``n`` and ``k``; ``row_support`` is a DSL rule in ``n``."""
    node = parse_expr(text, variables=("n", "k"))
    fn = compile_expr(node)
    support = _support_rule(row_support) if row_support is not None else None
    m = InfiniteMatrix(lambda n, k: fn({"n": n, "k": k}), support, name=pretty(node),
                       tail_horizon=tail_horizon)
    m.spot_check()
    return m


def dual_transform(A: InfiniteMatrix, w: Weights, tail_horizon: Optional[int] = None) -> InfiniteMatrix:
    """The matrix D acting on the transform y, row by row with suffix sums.

    Rows keep A's support; without one they are cut at ``tail_horizon``.
    """
    c, d = w.inverse_offdiag, w.diagonal_inverse
    tail = tail_horizon if tail_horizon is not None else A.tail_horizon

    @lru_cache(maxsize=64)
    def row(n: int) -> tuple:
        if A.approximate:
            a = [A.entry(n, k) for k in range(tail + 1)]
        else:
            a = A.row(n)
        out = [ZERO] * len(a)
        suffix = ZERO
        for k in range(len(a) - 1, -1, -1):
            ck = c.eval(k)
            out[k] = a[k] * d.eval(k) + (ck * suffix if ck else ZERO)
            suffix += a[k]
        return tuple(out)

    def entry(n, k):
        r = row(n)
        return r[k] if k < len(r) else ZERO

    support = None if A.approximate else A.row_support
    D = InfiniteMatrix(entry, support, name=f"D[{A.name}]", tail_horizon=tail, row=lambda n: list(row(n)))
    return D


@dataclass(frozen=True)
class ClassificationReport:
    target: Target
    conditions: dict
    overall: Verdict
    alpha: Optional[float] = None
    alpha_k: list = field(default_factory=list)
    approximate_tail: bool = False

    def to_dict(self) -> dict:
        out = {
            "target": self.target.value,
            "conditions": {k: v.to_dict() for k, v in self.conditions.items()},
            "overall": self.overall.to_dict(),
            "approximate_tail": self.approximate_tail,
        }
        if self.target is Target.INTO_C:
            out["alpha"] = self.alpha
            out["alpha_k"] = list(self.alpha_k)
        return out


def _linf_conditions(D: InfiniteMatrix, cfg: ProbeConfig, probe_cols: int):
    prober = toeplitz.RowProber(D, head=probe_cols)
    col_overall, per_col = toeplitz.column_limits(prober, probe_cols, cfg)
    conditions = {
        "row_abs_sums_bounded": toeplitz.bounded_row_sums(prober, cfg),
        "column_limits_exist": col_overall,
        "lower_row_abs_sums_bounded": toeplitz.bounded_row_sums(prober, cfg, lower=True),
        "lower_row_sum_limit_exists": toeplitz.row_sum_limit(prober, cfg, lower=True),
    }
    return prober, conditions, per_col


def classify_into_linf(A: InfiniteMatrix, w: Weights, horizon: Optional[int] = None,
                       cfg: ProbeConfig = DEFAULT, *, probe_cols: int = 8,
                       tail_horizon: Optional[int] = None) -> ClassificationReport:
    """Evidence for ``A in (c(u,v,Delta) : l_infinity)``."""
    cfg = cfg.with_horizon(horizon)
    D = dual_transform(A, w, tail_horizon)
    _, conditions, _ = _linf_conditions(D, cfg, probe_cols)
    overall = conjunction(conditions.values(), cfg.horizon)
    return ClassificationReport(Target.INTO_ELL_INFINITY, conditions, overall, approximate_tail=A.approximate)


def classify_into_c(A: InfiniteMatrix, w: Weights, horizon: Optional[int] = None,
                    cfg: ProbeConfig = DEFAULT, *, probe_cols: int = 8,
                    tail_horizon: Optional[int] = None) -> ClassificationReport:
    """Evidence for ``A in (c(u,v,Delta) : c)``; reports the limits alpha and alpha_k."""
    cfg = cfg.with_horizon(horizon)
    D = dual_transform(A, w, tail_horizon)
    prober, conditions, per_col = _linf_conditions(D, cfg, probe_cols)
    row_limit = toeplitz.row_sum_limit(prober, cfg)
    conditions["row_sum_limit"] = row_limit
    conditions["column_limit_values"] = conjunction(per_col, cfg.horizon, detail=f"columns 0..{probe_cols - 1}")
    overall = conjunction(conditions.values(), cfg.horizon)
    return ClassificationReport(Target.INTO_C, conditions, overall,
                                alpha=row_limit.limit if row_limit.holds else None,
                                alpha_k=[v.limit if v.holds else None for v in per_col],
                                approximate_tail=A.approximate)


def toeplitz_condition(A, which: ToeplitzCondition | str, horizon: Optional[int] = None,
                       cfg: ProbeConfig = DEFAULT, *, probe_cols: int = 8, max_cols: int = 15) -> Verdict:
    """Classical characterizations evaluated directly on A.

    c0_to_l1: subset-sum supremum; c0_to_linf: bounded absolute row sums;
    c0_to_c: plus column limits; c0_to_c_null: plus column limits and row sums tending to 0.
    """
    which = ToeplitzCondition(which)
    cfg = cfg.with_horizon(horizon)
    if which is ToeplitzCondition.C0_TO_L1:
        return toeplitz.subset_sup(A, cfg, max_cols)
    prober = toeplitz.RowProber(A, head=probe_cols)
    parts = [toeplitz.bounded_row_sums(prober, cfg)]
    if which is ToeplitzCondition.C0_TO_C:
        parts.append(toeplitz.column_limits(prober, probe_cols, cfg)[0])
    elif which is ToeplitzCondition.C0_TO_C_NULL:
        _, per_col = toeplitz.column_limits(prober, probe_cols, cfg)
        parts.extend(limit_equals(v, 0.0, cfg, f"column {k} limit") for k, v in enumerate(per_col))
        parts.append(limit_equals(toeplitz.row_sum_limit(prober, cfg), 0.0, cfg, "row-sum limit"))
    return conjunction(parts, cfg.horizon, detail=which.value)
