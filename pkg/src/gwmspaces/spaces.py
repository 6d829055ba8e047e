"""The spaces lambda(u, v, Delta) for lambda in {l_infinity, c, c_0}.

``x`` belongs to lambda(u, v, Delta) when its transform
``y_n = u_n * sum_{i<=n} v_i (x_i - x_{i-1})`` belongs to lambda. The
transform and its inverse are evaluated with running sums, so a prefix of
length N costs O(N) exact operations.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from gmpy2 import mpq

from . import triangle
from .core.probe import DEFAULT, ProbeConfig, Verdict, limit_equals, limit_probe, sup_probe
from .core.sequence import ONE, ZERO, Cumulative, Rational, Sequence, Weights


class Base(str, Enum):
    ELL_INFINITY = "ell_infinity"
    C = "c"
    C_ZERO = "c_zero"


@dataclass(frozen=True)
class SpaceId:
    base: Base
    weights: Optional[Weights] = None

    @property
    def classical(self) -> bool:
        return self.weights is None


class KernelMismatchError(AssertionError):
    """Two independent computations of the same quantity disagreed."""


@dataclass(frozen=True)
class BasisExpansion:
    """Coefficients of x in the basis ``b^(k)``.

    For base c the stored coefficients are ``lambda_k - l`` and ``limit`` holds ``l``;
    ``limit_exact`` is False when ``l`` was recovered from a floating estimate.
    """
    coefficients: Sequence
    space: SpaceId
    limit: Optional[Rational] = None
    limit_verdict: Optional[Verdict] = None
    limit_exact: bool = True


def forward_transform(w: Weights, x: Sequence) -> Sequence:
    """``y_n = u_n (sum_{i<n} (v_i - v_{i+1}) x_i + v_n x_n)``."""
    u, v, dv = w.u, w.v, w.kernel_offdiag
    below = Cumulative(Sequence(lambda i: dv.eval(i) * x.eval(i)))
    return Sequence(lambda n: u.eval(n) * (below.eval(n - 1) + v.eval(n) * x.eval(n)),
                    name=f"T({x.name or 'x'})")


def inverse_transform(w: Weights, y: Sequence) -> Sequence:
    """``x_k = sum_{i<k} (1/u_i)(1/v_i - 1/v_{i+1}) y_i + y_k/(u_k v_k)``."""
    c, d = w.inverse_offdiag, w.diagonal_inverse
    below = Cumulative(Sequence(lambda i: c.eval(i) * y.eval(i)))
    return Sequence(lambda k: below.eval(k - 1) + d.eval(k) * y.eval(k),
                    name=f"T^-1({y.name or 'y'})")


def norm(w: Weights, x: Sequence, horizon: int, cfg: ProbeConfig = DEFAULT) -> tuple[Rational, Verdict]:
    """Exact ``max_{k<=horizon} |y_k|`` plus boundedness evidence for the tail."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    y = forward_transform(w, x)
    value = max(abs(y.eval(k)) for k in range(horizon + 1))
    return value, sup_probe(y, cfg.with_horizon(horizon), dense=True)


def membership(w: Weights, x: Sequence, space: SpaceId, horizon: int,
               cfg: ProbeConfig = DEFAULT) -> Verdict:
    """Evidence that x lies in the space: y bounded, convergent, or null."""
    cfg = cfg.with_horizon(horizon)
    y = forward_transform(w, x)
    if space.base is Base.ELL_INFINITY:
        return sup_probe(y, cfg, dense=True)
    v = limit_probe(y, cfg)
    if space.base is Base.C:
        return v
    return limit_equals(v, 0.0, cfg)


def basis_vector(w: Weights, k: int) -> Sequence:
    """Column k of the inverse transform: 0 above k, ``1/(u_k v_k)`` at k,
    ``(1/u_k)(1/v_k - 1/v_{k+1})`` below."""
    if k < 0:
        raise ValueError("k must be >= 0")
    diag = w.diagonal_inverse.eval(k)
    below = w.inverse_offdiag.eval(k)
    return Sequence(lambda n: ZERO if n < k else (diag if n == k else below), name=f"b({k})")


def unit_sequence(j: int) -> Sequence:
    return Sequence(lambda n: ONE if n == j else ZERO, name=f"unit({j})")


def _exact_limit(y: Sequence, verdict: Verdict, cfg: ProbeConfig) -> tuple[Rational, bool]:
    H = cfg.horizon
    tail = {y.eval(k) for k in range(H - cfg.window + 1, H + 1)}
    if len(tail) == 1:
        return tail.pop(), True
    return mpq(Fraction(verdict.limit).limit_denominator(10**9)), False


def expand(w: Weights, x: Sequence, space: SpaceId, horizon: int,
           cfg: ProbeConfig = DEFAULT) -> BasisExpansion:
    """Basis coefficients of x: ``y_k`` for c_0, ``y_k - l`` together with ``l`` for c."""
    if space.base is Base.ELL_INFINITY:
        raise ValueError("no Schauder basis is available for l_infinity(u,v,Delta)")
    cfg = cfg.with_horizon(horizon)
    y = forward_transform(w, x)
    if space.base is Base.C_ZERO:
        return BasisExpansion(y, space)
    v = limit_probe(y, cfg)
    if not v.holds:
        raise ValueError(f"y does not show a limit at horizon {horizon}: {v.outcome.value}")
    l, exact = _exact_limit(y, v, cfg)
    coeffs = Sequence(lambda k: y.eval(k) - l, name="lambda - l")
    return BasisExpansion(coeffs, space, limit=l, limit_verdict=v, limit_exact=exact)


def partial_section(w: Weights, coefficients: Sequence, m: int) -> Sequence:
    """``S_m = sum_{k<=m} lambda_k b^(k)``."""
    c, d = w.inverse_offdiag, w.diagonal_inverse
    below = Cumulative(Sequence(lambda k: coefficients.eval(k) * c.eval(k) if k <= m else ZERO))
    return Sequence(lambda n: below.eval(n - 1) + (d.eval(n) * coefficients.eval(n) if n <= m else ZERO))


def partial_sum_residual(w: Weights, x: Sequence, m: int, horizon: int) -> Rational:
    """``||x - S_m||`` over indices up to ``horizon``.

    Computed directly from ``x - S_m`` and cross-checked against
    ``max_{m<k<=horizon} |y_k|``; a mismatch raises KernelMismatchError.
    """
    if m < 0 or horizon <= m:
        raise ValueError("need 0 <= m < horizon")
    y = forward_transform(w, x)
    residual = x - partial_section(w, y, m)
    direct = max(abs(t) for t in forward_transform(w, residual).prefix(horizon + 1))
    via_tail = max(abs(y.eval(k)) for k in range(m + 1, horizon + 1))
    if direct != via_tail:
        raise KernelMismatchError(f"residual {direct} != tail sup {via_tail} at m={m}")
    return direct


def ad_probe(w: Weights, x: Sequence, m: int, horizon: int) -> Rational:
    """Distance from x to a finitely supported z (support in 0..m) that
    reproduces ``y_0 .. y_m``; z comes from a triangular solve."""
    if m < 0 or horizon <= m:
        raise ValueError("need 0 <= m < horizon")
    G = triangle.gwm_delta(w)
    y = forward_transform(w, x)
    z = Sequence.from_terms(triangle.solve(G, y.prefix(m + 1), m))
    gz = forward_transform(w, z)
    return max(abs(y.eval(k) - gz.eval(k)) for k in range(m + 1, horizon + 1))
