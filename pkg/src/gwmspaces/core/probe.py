"""Finite-horizon evidence for limits and suprema.

Nothing here is a proof. Every condition of the form "sup ... < oo" or
"lim ... exists" is turned into a three-valued Verdict backed by the indices
that were inspected. Values are exact until the final comparison, where they
are projected to double.

Escalation: each probe looks at checkpoints H/4, H/2 and H of the horizon H.
A limit must be visible at both H/2 and H; a supremum is judged by how its
increments between checkpoints behave on a logarithmic scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Iterable, Optional

from .sequence import to_rational


def as_float(q) -> float:
    """Project an exact value to double; overflow maps to +-inf."""
    try:
        return float(q)
    except OverflowError:
        return math.copysign(math.inf, q)

# increment-rate ratios on log-spaced checkpoints
GROWTH_FAIL_RATIO = 0.95   # increments not shrinking: at least logarithmic growth
GROWTH_HOLD_RATIO = 0.75   # increments shrinking geometrically enough to sum


class Outcome(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    horizon: int
    witness: tuple = ()
    oscillation: Optional[float] = None
    limit: Optional[float] = None
    value: Optional[float] = None
    method: str = ""
    detail: str = ""

    def __post_init__(self):
        if self.outcome is Outcome.FAILS and not self.witness:
            raise ValueError("a failing verdict needs a finite witness")

    @property
    def holds(self) -> bool:
        return self.outcome is Outcome.HOLDS

    @property
    def fails(self) -> bool:
        return self.outcome is Outcome.FAILS

    @property
    def inconclusive(self) -> bool:
        return self.outcome is Outcome.INCONCLUSIVE

    def to_dict(self) -> dict:
        out = {"outcome": self.outcome.value, "horizon": self.horizon, "witness": list(self.witness)}
        for key in ("oscillation", "limit", "value"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        if self.method:
            out["method"] = self.method
        if self.detail:
            out["detail"] = self.detail
        return out


def holds(horizon: int, **evidence) -> Verdict:
    return Verdict(Outcome.HOLDS, horizon, **evidence)


def fails(horizon: int, witness, **evidence) -> Verdict:
    return Verdict(Outcome.FAILS, horizon, tuple(witness), **evidence)


def inconclusive(horizon: int, **evidence) -> Verdict:
    return Verdict(Outcome.INCONCLUSIVE, horizon, **evidence)


def conjunction(verdicts: Iterable[Verdict], horizon: int, detail: str = "") -> Verdict:
    """Fails if any fails, else Inconclusive if any is, else Holds."""
    verdicts = list(verdicts)
    failing = [v for v in verdicts if v.fails]
    if failing:
        return replace(failing[0], detail=detail or failing[0].detail)
    if any(v.inconclusive for v in verdicts):
        return inconclusive(horizon, detail=detail)
    return holds(horizon, detail=detail)


@dataclass(frozen=True)
class ProbeConfig:
    horizon: int = 2000
    window: int = 50
    tol: float = 1e-9
    blowup: float = 1e12
    fail_margin: float = 1e-6
    dense_prefix: int = 256

    def with_horizon(self, horizon: Optional[int]) -> "ProbeConfig":
        return self if horizon is None else replace(self, horizon=horizon)


DEFAULT = ProbeConfig()


def checkpoints(horizon: int) -> tuple[int, int, int]:
    return (max(horizon // 4, 1), max(horizon // 2, 2), horizon)


RICHARDSON_LEVELS = 3


def _extrapolation_window(cfg: ProbeConfig) -> int:
    return max(2, min(cfg.window, cfg.horizon >> (RICHARDSON_LEVELS + 2)))


def _richardson(at, m: int, levels: int = RICHARDSON_LEVELS):
    """Extrapolate ``s_m, s_2m, ..., s_(2^levels m)`` assuming an expansion in powers of 1/m."""
    col = [at(m << i) for i in range(levels + 1)]
    for j in range(1, levels + 1):
        f = 1 << j
        col = [(f * col[i + 1] - col[i]) / (f - 1) for i in range(len(col) - 1)]
    return col[0]


def probe_indices(cfg: ProbeConfig, *, dense: bool = False) -> list[int]:
    """Indices a supremum probe inspects: a dense prefix, a log grid and the
    checkpoint windows (or everything up to the horizon when ``dense``)."""
    H = cfg.horizon
    if dense:
        return list(range(H + 1))
    idx = set(range(min(H, cfg.dense_prefix) + 1))
    j = 0
    while True:
        k = int(round(2 ** (j / 4)))
        if k > H:
            break
        idx.add(k)
        j += 1
    for c in checkpoints(H):
        idx.update(range(max(0, c - cfg.window + 1), c + 1))
    return sorted(i for i in idx if i <= H)


def growth_verdict(
    scales: tuple[float, float, float],
    values: tuple[float, float, float],
    witness: tuple,
    cfg: ProbeConfig,
) -> Verdict:
    """Judge boundedness of a nondecreasing quantity seen at three growing scales."""
    H = cfg.horizon
    v1, v2, v3 = values
    if not all(math.isfinite(v) for v in values) or v3 > cfg.blowup:
        return fails(H, witness, value=v3, method="blowup",
                     detail=f"value {v3:.6g} exceeds blow-up threshold {cfg.blowup:.3g}")
    d1, d2 = max(v2 - v1, 0.0), max(v3 - v2, 0.0)
    if d2 <= cfg.tol:
        return holds(H, value=v3, method="stable", detail="no increase beyond tol over last escalation step")
    if d1 <= cfg.tol:
        return inconclusive(H, value=v3, method="late-increase",
                            detail=f"increase {d2:.6g} only in the last escalation step")
    s1, s2, s3 = scales
    if not (s1 < s2 < s3):
        return inconclusive(H, value=v3, detail="degenerate escalation scales")
    rate1 = d1 / math.log(s2 / s1)
    rate2 = d2 / math.log(s3 / s2)
    ratio = rate2 / rate1
    if ratio >= GROWTH_FAIL_RATIO:
        return fails(H, witness, value=v3, method="growth",
                     detail=f"increments {d1:.6g} then {d2:.6g} (rate ratio {ratio:.4g}) do not shrink")
    if ratio <= GROWTH_HOLD_RATIO:
        q = d2 / d1
        if q < 1:
            bound = v3 + d2 * q / (1 - q)
            return holds(H, value=v3, method="geometric-tail",
                         detail=f"increments shrink by {q:.4g}; geometric tail bound {bound:.17g}")
    return inconclusive(H, value=v3, method="slow-growth",
                        detail=f"increments {d1:.6g} then {d2:.6g} (rate ratio {ratio:.4g})")


def sup_probe(s: Callable[[int], object], cfg: ProbeConfig = DEFAULT, *, dense: bool = False) -> Verdict:
    """Evidence that ``sup_k |s_k|`` is finite; ``value`` is the largest term observed."""
    indices = probe_indices(cfg, dense=dense)
    values = {k: abs(as_float(s(k))) for k in indices}
    marks = []
    for c in checkpoints(cfg.horizon):
        k_best = max((k for k in indices if k <= c), key=lambda k: values[k])
        marks.append((k_best, values[k_best]))
    scales = tuple(float(c) for c in checkpoints(cfg.horizon))
    verdict = growth_verdict(scales, tuple(v for _, v in marks), tuple(k for k, _ in marks), cfg)
    return verdict if verdict.fails else replace(verdict, witness=(marks[-1][0],))


def _window(c: int, cfg: ProbeConfig) -> range:
    return range(max(0, c - cfg.window + 1), c + 1)


def _exact_mean(at, ks) -> float:
    ks = list(ks)
    return as_float(sum((at(k) for k in ks), to_rational(0)) / len(ks))


def limit_probe(s: Callable[[int], object], cfg: ProbeConfig = DEFAULT) -> Verdict:
    """Evidence that ``lim_k s_k`` exists.

    Holds(L) when the last window sits within ``tol`` of its mean and agrees
    with the window at H/2. Failing that, Richardson extrapolation over the
    chain ``s_m, s_2m, s_4m, s_8m`` is tried for m near H/8 and H/16, but
    only while the raw oscillation is visibly shrinking. Unbounded growth and
    persistent oscillation yield Fails with witnesses.
    """
    H = cfg.horizon
    if H <= cfg.window or cfg.window < 2 or cfg.tol <= 0:
        raise ValueError("limit_probe needs horizon > window >= 2 and tol > 0")
    exact: dict[int, object] = {}

    def at(k: int):
        if k not in exact:
            exact[k] = to_rational(s(k))
        return exact[k]

    bound = sup_probe(lambda k: at(k), cfg)
    if bound.fails:
        return replace(bound, method="unbounded")

    w_end = [as_float(at(k)) for k in _window(H, cfg)]
    w_half = [as_float(at(k)) for k in _window(H // 2, cfg)]
    osc_end = max(w_end) - min(w_end)
    osc_half = max(w_half) - min(w_half)
    mean_end = _exact_mean(at, _window(H, cfg))
    mean_half = _exact_mean(at, _window(H // 2, cfg))

    if osc_end <= cfg.tol:
        if osc_half <= cfg.tol and abs(mean_half - mean_end) <= cfg.tol:
            return holds(H, limit=mean_end, oscillation=osc_end, method="window",
                         witness=(H - cfg.window + 1, H))
        return inconclusive(H, limit=mean_end, oscillation=osc_end, method="window",
                            detail="window at H settled but disagrees with window at H/2")

    if osc_end <= 0.75 * osc_half:
        ew = _extrapolation_window(cfg)
        estimates = []
        top = H >> RICHARDSON_LEVELS
        for scale in (top, top // 2):
            ms = range(max(1, scale - ew + 1), scale + 1)
            estimates.append([as_float(_richardson(at, m)) for m in ms])
        fine, coarse = estimates
        if len(fine) >= 2 and len(coarse) >= 2:
            spread_f = max(fine) - min(fine)
            spread_c = max(coarse) - min(coarse)
            mf, mc = math.fsum(fine) / len(fine), math.fsum(coarse) / len(coarse)
            if spread_f <= cfg.tol and spread_c <= cfg.tol and abs(mf - mc) <= cfg.tol:
                return holds(H, limit=mf, oscillation=osc_end, method="richardson",
                             witness=(top // 2, H),
                             detail=f"extrapolated from doubling chains m..{1 << RICHARDSON_LEVELS}m near H/{1 << RICHARDSON_LEVELS}")

    if osc_end > cfg.fail_margin and osc_end >= 0.9 * osc_half:
        lo = min(_window(H, cfg), key=lambda k: as_float(at(k)))
        hi = max(_window(H, cfg), key=lambda k: as_float(at(k)))
        lo2 = min(_window(H // 2, cfg), key=lambda k: as_float(at(k)))
        hi2 = max(_window(H // 2, cfg), key=lambda k: as_float(at(k)))
        return fails(H, (lo2, hi2, lo, hi), oscillation=osc_end, method="oscillation",
                     detail=f"oscillation {osc_end:.6g} at H and {osc_half:.6g} at H/2 exceeds margin {cfg.fail_margin:g}")
    return inconclusive(H, oscillation=osc_end, limit=mean_end, method="unsettled",
                        detail=f"last-window oscillation {osc_end:.6g} > tol {cfg.tol:g}")


def limit_equals(v: Verdict, target: float, cfg: ProbeConfig = DEFAULT, label: str = "limit") -> Verdict:
    """Refine a limit verdict into "the limit exists and equals target"."""
    if not v.holds:
        return v
    gap = abs(v.limit - target)
    if gap <= max(cfg.tol, 1e-12):
        return v
    if gap > cfg.fail_margin:
        return fails(v.horizon, v.witness or (v.horizon,), limit=v.limit, oscillation=v.oscillation,
                     method=v.method, detail=f"{label} {v.limit:.17g} differs from {target:g} by {gap:.6g}")
    return inconclusive(v.horizon, limit=v.limit, method=v.method,
                        detail=f"{label} within margin but not tol of {target:g}")
