import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from gwmspaces import triangle as tri
from gwmspaces.core import Sequence, Weights, e, enumerate_, harmonic, sequence_from_expr
from gwmspaces.triangle import SingularTriangleError

from conftest import rational_lists


def _tail(terms):
    # keeps weights nonzero past the listed prefix
    n = len(terms)
    return Sequence(lambda k: 1 if k >= n else 0)


nonzero_weights = st.tuples(
    rational_lists(24, nonzero=True, span=6), rational_lists(24, nonzero=True, span=6)
).map(lambda p: Weights(Sequence.from_terms(p[0]) + _tail(p[0]), Sequence.from_terms(p[1]) + _tail(p[1])))


def is_identity(A, size):
    return all(A.entry(n, k) == (1 if n == k else 0) for n in range(size) for k in range(size))


def test_factorable_examples():
    S = tri.factorable(Weights(e(), e()))
    assert S.block(4) == [[1 if k <= n else 0 for k in range(4)] for n in range(4)]
    C = tri.factorable(Weights(harmonic(), e()))
    assert all(C.entry(n, k) == mpq(1, n + 1) for n in range(10) for k in range(n + 1))
    assert C.entry(2, 5) == 0


def test_difference_examples():
    D = tri.difference()
    assert tri.transform(D, e()).prefix(4) == [1, 0, 0, 0]
    assert tri.transform(D, enumerate_()).prefix(4) == [1, 1, 1, 1]
    assert is_identity(tri.compose(tri.summation(), D), 51)


def test_apply_examples():
    x = harmonic()
    assert all(tri.apply(tri.identity(), x, n) == x(n) for n in range(10))
    assert tri.apply(tri.summation(), e(), 4) == 5
    assert tri.apply(tri.factorable(Weights(harmonic(), e())), enumerate_(), 3) == mpq(5, 2)
    assert tri.apply(tri.identity(), x, -1) == 0


def test_compose_examples():
    B = tri.custom("(n - 2*k + 1)/(k + 1)")
    IB = tri.compose(tri.identity(), B)
    assert all(IB.entry(n, k) == B.entry(n, k) for n in range(51) for k in range(51))
    assert all(IB.entry(n, k) == 0 for n in range(10) for k in range(n + 1, 15))


def test_invert_examples():
    assert is_identity(tri.invert(tri.identity()), 20)
    inv = tri.invert(tri.difference())
    assert all(inv.entry(n, k) == (1 if k <= n else 0) for n in range(30) for k in range(30))
    assert is_identity(tri.invert(tri.gwm_delta(Weights(e(), e()))), 20)


def test_invert_rejects_singular():
    with pytest.raises(SingularTriangleError):
        tri.invert(tri.custom("n+k"))
    bad = tri.Triangle(lambda n, k: 0 if n == k == 3 else 1, diagonal_nonzero=True)
    T = tri.invert(bad)
    assert T.entry(2, 0) == 0
    with pytest.raises(SingularTriangleError):
        T.entry(3, 0)


def test_invert_matches_sympy_block():
    A = tri.custom("(n + 2)^2 / (k + 1) - k")
    A = tri.Triangle(A.entry, diagonal_nonzero=True)
    size = 12
    M = sympy.Matrix(size, size, lambda n, k: sympy.Rational(str(A.entry(int(n), int(k)))))
    ref = M.inv()
    T = tri.invert(A)
    for n in range(size):
        for k in range(size):
            assert sympy.Rational(str(T.entry(n, k))) == ref[n, k]


def test_gwm_delta_examples():
    assert is_identity(tri.gwm_delta(Weights(e(), e())), 30)
    G = tri.gwm_delta(Weights(e(), harmonic()))
    for n in range(15):
        for i in range(n):
            assert G.entry(n, i) == mpq(1, i + 1) - mpq(1, i + 2)
        assert G.entry(n, n) == mpq(1, n + 1)


def test_gwm_delta_inverse_examples():
    assert is_identity(tri.gwm_delta_inverse(Weights(e(), e())), 30)
    T = tri.gwm_delta_inverse(Weights(e(), harmonic()))
    for k in range(15):
        assert T.row(k) == [-1] * k + [k + 1]


def test_closed_inverse_with_varying_first_weight():
    # entries below the diagonal carry 1/u of the column index
    w = Weights(enumerate_(), sequence_from_expr("k^2 + 1"))
    T = tri.gwm_delta_inverse(w)
    size = 10
    G = tri.gwm_delta(w)
    ref = sympy.Matrix(size, size, lambda n, k: sympy.Rational(str(G.entry(int(n), int(k))))).inv()
    for n in range(size):
        for k in range(size):
            assert sympy.Rational(str(T.entry(n, k))) == ref[n, k]
    assert T.entry(3, 1) == mpq(1, 2) * (mpq(1, 2) - mpq(1, 5))


@given(nonzero_weights)
@settings(max_examples=15, deadline=None)
def test_closed_inverse_is_two_sided(w):
    G, T = tri.gwm_delta(w), tri.gwm_delta_inverse(w)
    size = 40
    assert is_identity(tri.compose(G, T), size)
    assert is_identity(tri.compose(T, G), size)


@given(nonzero_weights)
@settings(max_examples=15, deadline=None)
def test_kernel_is_factorable_times_difference(w):
    G, FD = tri.gwm_delta(w), tri.compose(tri.factorable(w), tri.difference())
    assert all(G.entry(n, k) == FD.entry(n, k) for n in range(30) for k in range(30))


@given(nonzero_weights)
@settings(max_examples=15, deadline=None)
def test_row_sums_telescope(w):
    G = tri.gwm_delta(w)
    for n in range(30):
        assert sum(G.row(n)) == w.u(n) * w.v(0)


@given(rational_lists(20, nonzero=True), rational_lists(20))
@settings(max_examples=20, deadline=None)
def test_generic_inverse_is_two_sided(diag, lower):
    A = tri.Triangle(lambda n, k: diag[n] if n == k else lower[(n * 7 + k) % 20], diagonal_nonzero=True)
    T = tri.invert(A)
    assert is_identity(tri.compose(A, T), 20)
    assert is_identity(tri.compose(T, A), 20)


@given(rational_lists(15), rational_lists(15), rational_lists(15))
@settings(max_examples=20, deadline=None)
def test_apply_of_product_is_nested_apply(a, b, xs):
    A = tri.Triangle(lambda n, k: a[(n + 2 * k) % 15])
    B = tri.Triangle(lambda n, k: b[(3 * n + k) % 15])
    x = Sequence.from_terms(xs)
    Bx = tri.transform(B, x)
    AB = tri.compose(A, B)
    for n in range(15):
        assert tri.apply(AB, x, n) == tri.apply(A, Bx, n)


def test_solve_recovers_right_hand_side():
    w = Weights(harmonic(), enumerate_())
    G = tri.gwm_delta(w)
    b = [mpq(k * k - 3, k + 2) for k in range(12)]
    z = tri.solve(G, b, 11)
    assert [tri.apply(G, Sequence.from_terms(z), n) for n in range(12)] == b


def test_custom_rule_is_zero_above_diagonal():
    C = tri.custom("1/(n+1)")
    assert C.entry(3, 2) == mpq(1, 4)
    assert C.entry(2, 3) == 0
    assert C.descriptor.tag is tri.OperatorTag.CUSTOM


def test_descriptors():
    w = Weights(e(), harmonic())
    assert tri.gwm_delta(w).descriptor.tag is tri.OperatorTag.GWM_DELTA
    assert tri.invert(tri.difference()).descriptor.tag is tri.OperatorTag.INVERTED
    assert tri.compose(tri.identity(), tri.identity()).descriptor.tag is tri.OperatorTag.COMPOSED
