"""Infinite lower-triangular matrices over exact rationals.

A Triangle is an entry rule ``(n, k) -> Q`` that is zero above the diagonal.
Besides the generic operations (apply, compose, invert by forward
substitution) this module builds the factorable matrix ``G(u, v)``, the
difference matrix, their product and its closed-form inverse.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .core.dsl import compile_expr, parse_expr, pretty
from .core.sequence import ONE, ZERO, Rational, Sequence, Weights, to_rational


class SingularTriangleError(ArithmeticError):
    """A triangle declared invertible has a zero on its diagonal."""


class OperatorTag(str, Enum):
    FACTORABLE = "factorable"
    DIFFERENCE = "difference"
    GWM_DELTA = "gwm_delta"
    GWM_DELTA_INVERSE = "gwm_delta_inverse"
    COMPOSED = "composed"
    INVERTED = "inverted"
    CUSTOM = "custom"


@dataclass(frozen=True)
class OperatorDescriptor:
    tag: OperatorTag
    label: str = ""
    parts: tuple = field(default=(), compare=False)


class Triangle:
    """Lower-triangular infinite matrix.

    ``row`` may be supplied when a whole row is cheaper to build at once than
    entry by entry (closed forms with running sums).
    """

    def __init__(
        self,
        entry: Callable[[int, int], object],
        *,
        diagonal_nonzero: bool = False,
        descriptor: Optional[OperatorDescriptor] = None,
        row: Optional[Callable[[int], list]] = None,
        memo: bool = False,
    ):
        self._entry = entry
        self._row = row
        self.diagonal_nonzero = diagonal_nonzero
        self.descriptor = descriptor or OperatorDescriptor(OperatorTag.CUSTOM)
        self._memo: Optional[dict] = {} if memo else None

    def __repr__(self) -> str:
        d = self.descriptor
        return f"Triangle({d.tag.value}{': ' + d.label if d.label else ''})"

    def entry(self, n: int, k: int) -> Rational:
        if k > n or k < 0:
            return ZERO
        if self._memo is not None:
            key = (n, k)
            value = self._memo.get(key)
            if value is None:
                value = to_rational(self._entry(n, k))
                self._memo[key] = value
        else:
            value = to_rational(self._entry(n, k))
        if n == k and self.diagonal_nonzero and value == 0:
            raise SingularTriangleError(f"zero diagonal entry at n={n}")
        return value

    __call__ = entry

    def row(self, n: int) -> list[Rational]:
        """Entries ``(n, 0) .. (n, n)``."""
        if self._row is not None:
            values = [to_rational(x) for x in self._row(n)]
            if self.diagonal_nonzero and values[n] == 0:
                raise SingularTriangleError(f"zero diagonal entry at n={n}")
            return values
        return [self.entry(n, k) for k in range(n + 1)]

    def row_support(self, n: int) -> int:
        return n

    def block(self, size: int) -> list[list[Rational]]:
        """The leading ``size x size`` block as nested lists."""
        return [[self.entry(n, k) for k in range(size)] for n in range(size)]


def apply(A: Triangle, x: Sequence, n: int) -> Rational:
    """``(Ax)_n = sum_{k<=n} A(n,k) x_k`` exactly."""
    if n < 0:
        return ZERO
    total = ZERO
    for k, a in enumerate(A.row(n)):
        if a:
            total += a * x.eval(k)
    return total


def transform(A: Triangle, x: Sequence) -> Sequence:
    """The sequence ``A x``."""
    return Sequence(lambda n: apply(A, x, n), name=f"{A!r}*{x.name or 'x'}")


def identity() -> Triangle:
    return Triangle(lambda n, k: ONE if n == k else ZERO, diagonal_nonzero=True,
                    descriptor=OperatorDescriptor(OperatorTag.CUSTOM, "identity"))


def summation() -> Triangle:
    """All ones on and below the diagonal: partial sums."""
    return Triangle(lambda n, k: ONE, diagonal_nonzero=True,
                    descriptor=OperatorDescriptor(OperatorTag.CUSTOM, "summation"))


def diagonal(d: Sequence) -> Triangle:
    return Triangle(lambda n, k: d.eval(n) if n == k else ZERO,
                    descriptor=OperatorDescriptor(OperatorTag.CUSTOM, f"diagonal({d.name or ''})"))


def factorable(w: Weights) -> Triangle:
    """The factorable matrix ``G(u, v)``: ``u_n v_k`` for ``k <= n``."""
    u, v = w.u, w.v

    def row(n):
        un = u.eval(n)
        return [un * v.eval(k) for k in range(n + 1)]

    return Triangle(lambda n, k: u.eval(n) * v.eval(k), diagonal_nonzero=True, row=row,
                    descriptor=OperatorDescriptor(OperatorTag.FACTORABLE, repr(w), (w,)))


def difference() -> Triangle:
    """Backward difference: 1 on the diagonal, -1 just below it."""
    def entry(n, k):
        if k == n:
            return ONE
        return -ONE if k == n - 1 else ZERO

    return Triangle(entry, diagonal_nonzero=True, descriptor=OperatorDescriptor(OperatorTag.DIFFERENCE))


def compose(A: Triangle, B: Triangle) -> Triangle:
    """The product ``AB``: ``sum_{j=k}^{n} A(n,j) B(j,k)``, memoized."""
    def entry(n, k):
        total = ZERO
        for j in range(k, n + 1):
            a = A.entry(n, j)
            if a:
                total += a * B.entry(j, k)
        return total

    return Triangle(entry, diagonal_nonzero=A.diagonal_nonzero and B.diagonal_nonzero, memo=True,
                    descriptor=OperatorDescriptor(OperatorTag.COMPOSED, f"{A!r}.{B!r}", (A, B)))


def invert(A: Triangle) -> Triangle:
    """Two-sided inverse by forward substitution, memoized column by column.

    ``T(k,k) = 1/A(k,k)`` and ``T(n,k) = -(1/A(n,n)) sum_{j=k}^{n-1} A(n,j) T(j,k)``.
    """
    if not A.diagonal_nonzero:
        raise SingularTriangleError("invert needs a triangle declared with a nonzero diagonal")
    columns: dict[int, list[Rational]] = {}
    lock = threading.Lock()

    def entry(n, k):
        col = columns.get(k)
        if col is None or len(col) <= n - k:
            with lock:
                col = columns.setdefault(k, [])
                while len(col) <= n - k:
                    m = k + len(col)
                    diag = A.entry(m, m)
                    if m == k:
                        col.append(1 / diag)
                        continue
                    acc = ZERO
                    for j in range(k, m):
                        a = A.entry(m, j)
                        if a:
                            acc += a * col[j - k]
                    col.append(-acc / diag)
        return col[n - k]

    return Triangle(entry, diagonal_nonzero=True,
                    descriptor=OperatorDescriptor(OperatorTag.INVERTED, repr(A), (A,)))


def solve(A: Triangle, b: list, m: int) -> list[Rational]:
    """Solve ``(Az)_k = b_k`` for ``k <= m`` by forward substitution."""
    z: list[Rational] = []
    for n in range(m + 1):
        acc = to_rational(b[n])
        for j in range(n):
            a = A.entry(n, j)
            if a:
                acc -= a * z[j]
        diag = A.entry(n, n)
        if diag == 0:
            raise SingularTriangleError(f"zero diagonal entry at n={n}")
        z.append(acc / diag)
    return z


def gwm_delta(w: Weights) -> Triangle:
    """The product ``G(u,v) . Delta`` in closed form.

    Row n is ``u_n (v_i - v_{i+1})`` for ``i < n`` and ``u_n v_n`` on the diagonal.
    """
    u, v, dv = w.u, w.v, w.kernel_offdiag

    def entry(n, i):
        if i == n:
            return u.eval(n) * v.eval(n)
        return u.eval(n) * dv.eval(i)

    def row(n):
        un = u.eval(n)
        return [un * dv.eval(i) for i in range(n)] + [un * v.eval(n)]

    return Triangle(entry, diagonal_nonzero=True, row=row,
                    descriptor=OperatorDescriptor(OperatorTag.GWM_DELTA, repr(w), (w,)))


def gwm_delta_inverse(w: Weights) -> Triangle:
    """Closed-form inverse of :func:`gwm_delta`.

    Column i is ``(1/u_i)(1/v_i - 1/v_{i+1})`` strictly below the diagonal and
    ``1/(u_i v_i)`` on it. Note the ``1/u`` factor carries the column index.
    """
    c, d = w.inverse_offdiag, w.diagonal_inverse

    def entry(k, i):
        return d.eval(k) if i == k else c.eval(i)

    def row(k):
        return [c.eval(i) for i in range(k)] + [d.eval(k)]

    return Triangle(entry, diagonal_nonzero=True, row=row,
                    descriptor=OperatorDescriptor(OperatorTag.GWM_DELTA_INVERSE, repr(w), (w,)))


def custom(text: str) -> Triangle:
    """Triangle from a two-variable DSL rule in ``n`` and ``k``; entries above the diagonal are forced to 0."""
    node = parse_expr(text, variables=("n", "k"))
    fn = compile_expr(node)
    return Triangle(lambda n, k: fn({"n": n, "k": k}),
                    descriptor=OperatorDescriptor(OperatorTag.CUSTOM, pretty(node)))
