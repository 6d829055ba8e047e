"""Row-sum and column-limit conditions on infinite matrices.

Works on anything with ``row(n)`` (entries ``0 .. r(n)``) and ``entry(n, k)``:
triangles and :class:`gwmspaces.matclass.InfiniteMatrix` alike. Rows are
reduced to a :class:`RowSummary` once, so long rows are never held in memory.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import compress

import numpy as np

from .core.probe import (
    ProbeConfig, Verdict, as_float, checkpoints, conjunction, growth_verdict, limit_probe, sup_probe,
)
from .core.sequence import ZERO, Rational, Sequence

MAX_SUBSET_COLUMNS = 20


@dataclass(frozen=True)
class RowSummary:
    abs_sum: Rational
    total: Rational
    lower_abs_sum: Rational  # columns k <= n only
    lower_total: Rational
    head: tuple


class RowProber:
    def __init__(self, matrix, head: int = 8):
        self.matrix = matrix
        self.head = head
        self._rows: dict[int, RowSummary] = {}

    def summary(self, n: int) -> RowSummary:
        s = self._rows.get(n)
        if s is None:
            row = self.matrix.row(n)
            lower = row[: n + 1]
            abs_lower = sum((abs(a) for a in lower), ZERO)
            tot_lower = sum(lower, ZERO)
            rest = row[n + 1:]
            s = RowSummary(
                abs_sum=abs_lower + sum((abs(a) for a in rest), ZERO),
                total=tot_lower + sum(rest, ZERO),
                lower_abs_sum=abs_lower,
                lower_total=tot_lower,
                head=tuple(row[: self.head]) + (ZERO,) * max(0, self.head - len(row)),
            )
            self._rows[n] = s
        return s

    def abs_sums(self, lower: bool = False) -> Sequence:
        if lower:
            return Sequence(lambda n: self.summary(n).lower_abs_sum, name="lower row |sums|")
        return Sequence(lambda n: self.summary(n).abs_sum, name="row |sums|")

    def sums(self, lower: bool = False) -> Sequence:
        if lower:
            return Sequence(lambda n: self.summary(n).lower_total, name="lower row sums")
        return Sequence(lambda n: self.summary(n).total, name="row sums")

    def column(self, k: int) -> Sequence:
        if k < self.head:
            return Sequence(lambda n: self.summary(n).head[k], name=f"column {k}")
        return Sequence(lambda n: self.matrix.entry(n, k), name=f"column {k}")


def bounded_row_sums(prober: RowProber, cfg: ProbeConfig, *, lower: bool = False) -> Verdict:
    """``sup_n sum_k |a_nk| < oo``, judged on sampled rows."""
    return sup_probe(prober.abs_sums(lower), cfg)


def row_sum_limit(prober: RowProber, cfg: ProbeConfig, *, lower: bool = False) -> Verdict:
    """``lim_n sum_k a_nk`` exists."""
    return limit_probe(prober.sums(lower), cfg)


def column_limits(prober: RowProber, cols: int, cfg: ProbeConfig) -> tuple[Verdict, list[Verdict]]:
    """``lim_n a_nk`` exists for each probed column ``k < cols``."""
    per_column = [limit_probe(prober.column(k), cfg) for k in range(cols)]
    overall = conjunction(per_column, cfg.horizon, detail=f"columns 0..{cols - 1}")
    return overall, per_column


def abs_series(terms: list[float], cfg: ProbeConfig) -> Verdict:
    """Convergence evidence for ``sum_k |t_k|`` from partial sums at K/4, K/2, K."""
    K = len(terms)
    steps = checkpoints(K)
    partial = np.cumsum(np.abs(np.asarray(terms, dtype=float)))
    values = tuple(float(partial[s - 1]) for s in steps)
    v = growth_verdict(tuple(float(s) for s in steps), values, tuple(s - 1 for s in steps),
                       replace(cfg, horizon=K))
    return v


def _subset_masks(cols: int) -> np.ndarray:
    ids = np.arange(1 << cols, dtype=np.int64)
    return ((ids[None, :] >> np.arange(cols)[:, None]) & 1).astype(np.float64)


def subset_sup(matrix, cfg: ProbeConfig, max_cols: int = 15, *, chunk: int = 64) -> Verdict:
    """``sup_K sum_n |sum_{k in K} a_nk|`` over all subsets K of the first ``max_cols`` columns.

    Exhaustive enumeration, repeated for (columns, rows) = (max_cols/4, H/4),
    (max_cols/2, H/2), (max_cols, H); growth between the three decides.
    The sums themselves are accumulated in double precision.
    """
    if max_cols > MAX_SUBSET_COLUMNS:
        raise ValueError(f"max_cols={max_cols} exceeds the enumeration guard of {MAX_SUBSET_COLUMNS}")
    if max_cols < 3:
        raise ValueError("max_cols must be at least 3 for escalation")
    col_steps = (max(1, max_cols // 4), max(2, max_cols // 2), max_cols)
    row_steps = checkpoints(cfg.horizon)
    values, best_sets = [], []
    for cols, rows in zip(col_steps, row_steps):
        R = np.array([[as_float(matrix.entry(n, k)) for k in range(cols)] for n in range(rows + 1)])
        R = R[np.any(R != 0, axis=1)]
        masks = _subset_masks(cols)
        totals = np.zeros(masks.shape[1])
        for start in range(0, len(R), chunk):
            totals += np.abs(R[start:start + chunk] @ masks).sum(axis=0)
        best = int(np.argmax(totals))
        values.append(float(totals[best]))
        best_sets.append(tuple(compress(range(cols), masks[:, best].astype(bool))))
    verdict = growth_verdict(tuple(float(c) for c in col_steps), tuple(values),
                             best_sets[-1] or (0,), cfg)
    detail = f"subset sums {values[0]:.6g}, {values[1]:.6g}, {values[2]:.6g} at columns {col_steps}; " \
             f"best subset {list(best_sets[-1])}; " + verdict.detail
    return replace(verdict, detail=detail)
