"""Multiplier (alpha-, beta-, gamma-dual) membership for lambda(u, v, Delta).

For ``x = T^-1 y`` the products ``a_k x_k`` and the partial sums
``sum_{k<=n} a_k x_k`` are linear in y through two triangles:

* the alpha matrix B, ``B(n, i) = a_n * T^-1(n, i)``, so ``a x = B y``;
* the beta matrix C, ``C(n, j) = sum_{k=j}^{n} a_k T^-1(k, j)``
  ``= a_j/(u_j v_j) + (1/u_j)(1/v_j - 1/v_{j+1}) sum_{k=j+1}^{n} a_k``.

Membership of a in a dual is then a question about B or C as maps out of
c_0, c or l_infinity, answered with finite-horizon verdicts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from . import toeplitz
from .core.probe import (
    DEFAULT, ProbeConfig, Verdict, conjunction, fails, holds, inconclusive, limit_probe,
)
from .core.sequence import Cumulative, Sequence, Weights
from .spaces import Base
from .triangle import OperatorDescriptor, OperatorTag, Triangle

C3_TOL = 1e-7


class DualKind(str, Enum):
    ALPHA = "alpha"
    BETA = "beta"
    GAMMA = "gamma"


@dataclass(frozen=True)
class DualCheckReport:
    kind: DualKind
    base: Base
    conditions: dict
    overall: Verdict
    column_limits: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "base": self.base.value,
            "conditions": {k: v.to_dict() for k, v in self.conditions.items()},
            "column_limits": list(self.column_limits),
            "overall": self.overall.to_dict(),
        }


def alpha_matrix(w: Weights, a: Sequence) -> Triangle:
    c, d = w.inverse_offdiag, w.diagonal_inverse

    def entry(n, i):
        return a.eval(n) * (d.eval(n) if i == n else c.eval(i))

    def row(n):
        an = a.eval(n)
        return [an * c.eval(i) for i in range(n)] + [an * d.eval(n)]

    return Triangle(entry, row=row, descriptor=OperatorDescriptor(OperatorTag.CUSTOM, "alpha matrix", (w, a)))


def beta_matrix(w: Weights, a: Sequence) -> Triangle:
    c, d = w.inverse_offdiag, w.diagonal_inverse
    partial = Cumulative(a)

    def entry(n, j):
        return a.eval(j) * d.eval(j) + c.eval(j) * (partial.eval(n) - partial.eval(j))

    def row(n):
        pn = partial.eval(n)
        return [a.eval(j) * d.eval(j) + c.eval(j) * (pn - partial.eval(j)) for j in range(n + 1)]

    return Triangle(entry, row=row, descriptor=OperatorDescriptor(OperatorTag.CUSTOM, "beta matrix", (w, a)))


def check_alpha(w: Weights, a: Sequence, horizon: int | None = None, max_cols: int = 15,
                cfg: ProbeConfig = DEFAULT) -> DualCheckReport:
    """a is an alpha-multiplier iff the alpha matrix maps c_0 into l_1 (subset-sum criterion)."""
    cfg = cfg.with_horizon(horizon)
    v = toeplitz.subset_sup(alpha_matrix(w, a), cfg, max_cols)
    return DualCheckReport(DualKind.ALPHA, Base.C_ZERO, {"subset_sup": v}, v)


def _abs_limit_matches(prober: toeplitz.RowProber, series_cols: int, cfg: ProbeConfig,
                       column_verdicts: list[Verdict]) -> Verdict:
    """``lim_n sum_k |c_nk|`` equals ``sum_k |lim_n c_nk|`` (compared in double within C3_TOL)."""
    H = cfg.horizon
    lhs = limit_probe(prober.abs_sums(), cfg)
    cols = list(column_verdicts) + [limit_probe(prober.column(k), cfg)
                                     for k in range(len(column_verdicts), series_cols)]
    broken = next((v for v in cols if v.fails), None)
    if broken is not None:
        return fails(H, broken.witness, detail="a column limit does not exist")
    if lhs.fails:
        return lhs
    if not lhs.holds or not all(v.holds for v in cols):
        return inconclusive(H, detail="row |sum| limit or a column limit unsettled")
    rhs = toeplitz.abs_series([v.limit for v in cols], cfg)
    if not rhs.holds:
        return inconclusive(H, value=rhs.value, detail="series of |column limits| unsettled")
    gap = abs(lhs.limit - rhs.value)
    if gap <= C3_TOL:
        return holds(H, limit=lhs.limit, value=rhs.value, witness=lhs.witness,
                     detail=f"|gap| {gap:.3g} <= {C3_TOL:g}")
    return fails(H, lhs.witness, limit=lhs.limit, value=rhs.value,
                 detail=f"lim row |sums| {lhs.limit:.17g} vs sum |column limits| {rhs.value:.17g}: gap {gap:.6g}")


def check_beta(w: Weights, a: Sequence, base: Base = Base.C_ZERO, horizon: int | None = None,
               cfg: ProbeConfig = DEFAULT, *, probe_cols: int = 8, series_cols: int = 64) -> DualCheckReport:
    """a is a beta-multiplier of base(u,v,Delta) iff the beta matrix maps base into c.

    c_0: bounded row sums and column limits; c: additionally a row-sum limit;
    l_infinity: column limits and the absolute-limit interchange.
    """
    base = Base(base)
    cfg = cfg.with_horizon(horizon)
    prober = toeplitz.RowProber(beta_matrix(w, a), head=probe_cols)
    conditions: dict[str, Verdict] = {}
    if base in (Base.C_ZERO, Base.C):
        conditions["bounded_row_sums"] = toeplitz.bounded_row_sums(prober, cfg)
    col_overall, per_col = toeplitz.column_limits(prober, probe_cols, cfg)
    conditions["column_limits"] = col_overall
    if base is Base.ELL_INFINITY:
        conditions["abs_limit_interchange"] = _abs_limit_matches(prober, series_cols, cfg, per_col)
    if base is Base.C:
        conditions["row_sum_limit"] = toeplitz.row_sum_limit(prober, cfg)
    overall = conjunction(conditions.values(), cfg.horizon)
    return DualCheckReport(DualKind.BETA, base, conditions, overall,
                           column_limits=[v.limit for v in per_col])


def check_gamma(w: Weights, a: Sequence, horizon: int | None = None,
                cfg: ProbeConfig = DEFAULT) -> DualCheckReport:
    """a is a gamma-multiplier iff the beta matrix has bounded absolute row sums."""
    cfg = cfg.with_horizon(horizon)
    v = toeplitz.bounded_row_sums(toeplitz.RowProber(beta_matrix(w, a), head=0), cfg)
    return DualCheckReport(DualKind.GAMMA, Base.C_ZERO, {"bounded_row_sums": v}, v)
