"""Seeded pseudo-random rational inputs (for the verify battery, tests and jobs)."""
from __future__ import annotations

import random

from gmpy2 import mpq

from .core.sequence import Sequence, Weights, e, geometric, harmonic


def random_rational(rng: random.Random, *, span: int = 9, nonzero: bool = False):
    while True:
        q = mpq(rng.randint(-span, span), rng.randint(1, span))
        if q or not nonzero:
            return q


def random_sequence(seed: int, *, span: int = 9, nonzero: bool = False, name: str | None = None) -> Sequence:
    """Infinite sequence whose k-th term depends only on (seed, k)."""
    def rule(k):
        return random_rational(random.Random(seed * 1_000_003 + k), span=span, nonzero=nonzero)

    return Sequence(rule, name=name or f"random({seed})")


def weight_pairs(seed: int) -> dict[str, Weights]:
    """The five standard weight pairs: (e,e), (e,harmonic), (harmonic,e),
    (geometric(1/2),e) and a pair of random nonzero rationals."""
    return {
        "e,e": Weights(e(), e()),
        "e,harmonic": Weights(e(), harmonic()),
        "harmonic,e": Weights(harmonic(), e()),
        "geometric(1/2),e": Weights(geometric(mpq(1, 2)), e()),
        "random,random": Weights(random_sequence(seed, nonzero=True, name="random_u"),
                                 random_sequence(seed + 1, nonzero=True, name="random_v")),
    }
