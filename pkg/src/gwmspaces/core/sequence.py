"""Exact rational scalars and lazily evaluated infinite sequences.

Every scalar in the package is a ``gmpy2.mpq``. Sequences are rules
``k -> Rational`` with a per-sequence memo; indices below zero evaluate to 0.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from functools import cached_property
from numbers import Integral
from typing import Callable, Iterable, Optional

from gmpy2 import mpq

Rational = type(mpq())

ZERO = mpq(0)
ONE = mpq(1)


class EvaluationError(ArithmeticError):
    """A sequence or matrix rule could not be evaluated at an index."""

    def __init__(self, message: str, index=None):
        super().__init__(message if index is None else f"{message} (at index {index})")
        self.index = index


class WeightError(ValueError):
    """A weight sequence has a zero (or undefined) term."""


def to_rational(value) -> Rational:
    """Coerce an int, ``Fraction``, ``mpq`` or ``"p/q"`` string to an exact rational.

    Floats are rejected: they would silently carry binary rounding into exact code.
    """
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (Integral, Fraction)):
        return mpq(value)
    if isinstance(value, str):
        return mpq(Fraction(value.strip()))
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact rationals; use Fraction or 'p/q'")
    return mpq(value)


def render(q) -> str:
    """Render a rational as a reduced ``"p/q"`` string (denominator always shown)."""
    q = to_rational(q)
    return f"{q.numerator}/{q.denominator}"


class Sequence:
    """An infinite sequence of rationals given by a rule on the index.

    The memo is the only mutable state. Concurrent readers may race on a cold
    index; both compute the same value, so the store is idempotent.
    """

    __slots__ = ("_rule", "descriptor", "name", "_cache", "_cap")

    def __init__(
        self,
        rule: Callable[[int], object],
        descriptor=None,
        *,
        name: Optional[str] = None,
        cache_cap: Optional[int] = None,
    ):
        self._rule = rule
        self.descriptor = descriptor
        self.name = name
        self._cache: dict[int, Rational] = {}
        self._cap = cache_cap

    def __call__(self, k: int) -> Rational:
        return self.eval(k)

    def eval(self, k: int) -> Rational:
        if k < 0:
            return ZERO
        try:
            return self._cache[k]
        except KeyError:
            pass
        try:
            value = to_rational(self._rule(k))
        except ZeroDivisionError as exc:
            raise EvaluationError("division by zero", k) from exc
        if self._cap is None or len(self._cache) < self._cap:
            self._cache[k] = value
        return value

    def prefix(self, n: int) -> list[Rational]:
        """Terms ``0 .. n-1``."""
        return [self.eval(k) for k in range(n)]

    def __repr__(self) -> str:
        label = self.name or (str(self.descriptor) if self.descriptor is not None else "rule")
        return f"Sequence({label})"

    # termwise arithmetic

    def __add__(self, other: "Sequence") -> "Sequence":
        return Sequence(lambda k: self.eval(k) + other.eval(k))

    def __sub__(self, other: "Sequence") -> "Sequence":
        return Sequence(lambda k: self.eval(k) - other.eval(k))

    def __neg__(self) -> "Sequence":
        return Sequence(lambda k: -self.eval(k))

    def __mul__(self, other) -> "Sequence":
        if isinstance(other, Sequence):
            return Sequence(lambda k: self.eval(k) * other.eval(k))
        c = to_rational(other)
        return Sequence(lambda k: c * self.eval(k))

    __rmul__ = __mul__

    @classmethod
    def from_terms(cls, terms: Iterable, *, name: Optional[str] = None) -> "Sequence":
        """Finitely supported sequence: the given terms, then zeros."""
        values = [to_rational(t) for t in terms]
        n = len(values)
        return cls(lambda k: values[k] if k < n else ZERO, name=name)


class Cumulative(Sequence):
    """Running sums ``C_n = t_0 + ... + t_n`` filled iteratively (no recursion)."""

    __slots__ = ("_terms", "_sums", "_lock")

    def __init__(self, terms: Sequence, *, name: Optional[str] = None):
        super().__init__(self._lookup, name=name)
        self._terms = terms
        self._sums: list[Rational] = []
        self._lock = threading.Lock()

    def _lookup(self, n: int) -> Rational:
        if n >= len(self._sums):
            with self._lock:
                total = self._sums[-1] if self._sums else ZERO
                for i in range(len(self._sums), n + 1):
                    total = total + self._terms.eval(i)
                    self._sums.append(total)
        return self._sums[n]

    def eval(self, k: int) -> Rational:
        # the list already memoizes; skip the dict
        if k < 0:
            return ZERO
        return self._lookup(k)


# builtin sequences

def constant(c) -> Sequence:
    c = to_rational(c)
    return Sequence(lambda k: c, name=f"constant({render(c)})")


def e() -> Sequence:
    """The all-ones sequence."""
    return Sequence(lambda k: ONE, name="e")


def zero() -> Sequence:
    return Sequence(lambda k: ZERO, name="zero")


def harmonic() -> Sequence:
    """``1/(k+1)``."""
    return Sequence(lambda k: mpq(1, k + 1), name="harmonic")


def enumerate_() -> Sequence:
    """``(1, 2, 3, ...)``."""
    return Sequence(lambda k: mpq(k + 1), name="enumerate")


def geometric(r) -> Sequence:
    r = to_rational(r)
    return Sequence(lambda k: r**k, name=f"geometric({render(r)})")


def unit(j: int) -> Sequence:
    """The unit sequence with a single 1 at index ``j``."""
    return Sequence(lambda k: ONE if k == j else ZERO, name=f"unit({j})")


def delta(s: Sequence) -> Sequence:
    """Backward difference ``s_k - s_{k-1}``; ``(delta s)_0 = s_0``."""
    return Sequence(lambda k: s.eval(k) - s.eval(k - 1), name=f"delta({s.name or 's'})")


def nabla(s: Sequence) -> Sequence:
    """Forward difference ``s_i - s_{i+1}``."""
    return Sequence(lambda k: s.eval(k) - s.eval(k + 1), name=f"nabla({s.name or 's'})")


def shift(s: Sequence, j: int) -> Sequence:
    """Index translation ``k -> s_{k+j}`` (negative indices still read as 0)."""
    return Sequence(lambda k: s.eval(k + j))


class Weights:
    """A pair ``(u, v)`` of weight sequences with no zero terms.

    Terms ``0 .. check_upto-1`` are verified at construction; later terms are
    checked as they are first evaluated.
    """

    def __init__(self, u: Sequence, v: Sequence, *, check_upto: int = 256):
        self.u = _nonzero(u, "u")
        self.v = _nonzero(v, "v")
        for k in range(check_upto):
            self.u.eval(k)
            self.v.eval(k)

    def __repr__(self) -> str:
        return f"Weights(u={self.u.name or self.u.descriptor}, v={self.v.name or self.v.descriptor})"

    @cached_property
    def diagonal_inverse(self) -> Sequence:
        """``1/(u_k v_k)``."""
        u, v = self.u, self.v
        return Sequence(lambda k: 1 / (u.eval(k) * v.eval(k)))

    @cached_property
    def inverse_offdiag(self) -> Sequence:
        """``(1/u_k)(1/v_k - 1/v_{k+1})``: the constant below-diagonal entry of column k of the inverse."""
        u, v = self.u, self.v
        return Sequence(lambda k: (1 / v.eval(k) - 1 / v.eval(k + 1)) / u.eval(k))

    @cached_property
    def kernel_offdiag(self) -> Sequence:
        """``v_i - v_{i+1}`` (scaled by ``u_n`` in row n of the forward kernel)."""
        v = self.v
        return Sequence(lambda k: v.eval(k) - v.eval(k + 1))


def _nonzero(s: Sequence, label: str) -> Sequence:
    def rule(k: int) -> Rational:
        try:
            value = s.eval(k)
        except EvaluationError as exc:
            raise WeightError(f"weight {label} undefined at index {k}: {exc}") from exc
        if value == 0:
            raise WeightError(f"weight {label} has a zero term at index {k}")
        return value

    return Sequence(rule, s.descriptor, name=s.name)
