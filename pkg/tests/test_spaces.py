import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from gwmspaces import spaces, triangle as tri
from gwmspaces.core import (
    Sequence, Weights, e, enumerate_, geometric, harmonic, sequence_from_expr, unit,
)
from gwmspaces.sampling import random_sequence
from gwmspaces.spaces import Base, KernelMismatchError, SpaceId

from conftest import rational_lists

HALF = mpq(1, 2)
PAIR_KEYS = ["e,e", "e,harmonic", "harmonic,e", "geometric(1/2),e", "random,random"]


def naive_forward(w, x, n):
    return sum((w.u(n) * w.v(i) * (x(i) - x(i - 1)) for i in range(n + 1)), mpq(0))


def test_forward_examples(ee, e_harm):
    assert spaces.forward_transform(ee, enumerate_()).prefix(5) == [1, 2, 3, 4, 5]
    assert spaces.forward_transform(e_harm, e()).prefix(5) == [1] * 5


@pytest.mark.parametrize("key", PAIR_KEYS)
def test_forward_matches_naive_sum(pairs, key):
    w = pairs[key]
    x = random_sequence(11)
    y = spaces.forward_transform(w, x)
    for n in range(40):
        assert y(n) == naive_forward(w, x, n)
        assert y(n) == tri.apply(tri.gwm_delta(w), x, n)


def test_inverse_examples(ee, e_harm):
    x = random_sequence(5)
    assert spaces.inverse_transform(ee, x).prefix(30) == x.prefix(30)
    y = spaces.forward_transform(e_harm, enumerate_())
    assert y(1) == mpq(3, 2)
    assert spaces.inverse_transform(e_harm, y).prefix(30) == enumerate_().prefix(30)
    for j in range(5):
        assert spaces.inverse_transform(e_harm, unit(j)).prefix(20) == spaces.basis_vector(e_harm, j).prefix(20)


@pytest.mark.parametrize("key", PAIR_KEYS)
def test_roundtrip_both_ways(pairs, key):
    w = pairs[key]
    x = random_sequence(3)
    assert spaces.inverse_transform(w, spaces.forward_transform(w, x)).prefix(201) == x.prefix(201)
    y = random_sequence(4)
    assert spaces.forward_transform(w, spaces.inverse_transform(w, y)).prefix(201) == y.prefix(201)


def test_norm_examples(ee, e_harm):
    value, verdict = spaces.norm(ee, harmonic(), 200)
    assert value == 1 and verdict.holds
    value, verdict = spaces.norm(ee, enumerate_(), 200)
    assert value == 201 and verdict.fails and verdict.witness
    x = spaces.inverse_transform(e_harm, geometric(HALF))
    value, verdict = spaces.norm(e_harm, x, 200)
    assert value == 1 and verdict.holds


def test_norm_requires_positive_horizon(ee):
    with pytest.raises(ValueError):
        spaces.norm(ee, e(), 0)


@pytest.mark.parametrize("key", PAIR_KEYS)
def test_isometry(pairs, key):
    w = pairs[key]
    for seed in range(5):
        y = random_sequence(100 + seed)
        value, _ = spaces.norm(w, spaces.inverse_transform(w, y), 200)
        assert value == max(abs(t) for t in y.prefix(201))


@given(rational_lists(30), rational_lists(30), st.fractions(-5, 5, max_denominator=7), st.fractions(-5, 5, max_denominator=7))
@settings(max_examples=30, deadline=None)
def test_linearity_and_triangle_inequality(xs, ts, a, b):
    w = Weights(harmonic(), sequence_from_expr("k^2 + 1"))
    x, t = Sequence.from_terms(xs), Sequence.from_terms(ts)
    a, b = mpq(a), mpq(b)
    lhs = spaces.forward_transform(w, a * x + b * t)
    fx, ft = spaces.forward_transform(w, x), spaces.forward_transform(w, t)
    for n in range(30):
        assert lhs(n) == a * fx(n) + b * ft(n)
    nx = spaces.norm(w, x, 29)[0]
    nt = spaces.norm(w, t, 29)[0]
    assert spaces.norm(w, x + t, 29)[0] <= nx + nt


def test_membership_examples(ee, e_harm):
    b = spaces.basis_vector(e_harm, 2)
    assert spaces.membership(e_harm, b, SpaceId(Base.C_ZERO, e_harm), 200).holds
    v = spaces.membership(ee, e(), SpaceId(Base.C, ee), 200)
    assert v.holds and v.limit == 1.0
    assert spaces.membership(ee, e(), SpaceId(Base.C_ZERO, ee), 200).fails
    alt = sequence_from_expr("(-1)^k")
    assert spaces.membership(ee, alt, SpaceId(Base.ELL_INFINITY, ee), 200).holds
    assert spaces.membership(ee, alt, SpaceId(Base.C, ee), 200).fails


def test_basis_examples(ee, e_harm):
    for k in range(5):
        assert spaces.basis_vector(ee, k).prefix(10) == unit(k).prefix(10)
    assert spaces.basis_vector(e_harm, 0).prefix(6) == [1, -1, -1, -1, -1, -1]
    with pytest.raises(ValueError):
        spaces.basis_vector(ee, -1)


@pytest.mark.parametrize("key", PAIR_KEYS)
def test_basis_columns_map_to_units(pairs, key):
    w = pairs[key]
    for k in range(31):
        assert spaces.forward_transform(w, spaces.basis_vector(w, k)).prefix(40) == unit(k).prefix(40)


def test_basis_uses_its_own_weight_index():
    w = Weights(enumerate_(), sequence_from_expr("k + 2"))
    b = spaces.basis_vector(w, 1)
    assert b.prefix(4) == [0, mpq(1, 6), mpq(1, 2) * (mpq(1, 3) - mpq(1, 4)), mpq(1, 24)]


def test_expand_examples(ee, e_harm):
    b = spaces.basis_vector(e_harm, 3)
    exp = spaces.expand(e_harm, b, SpaceId(Base.C_ZERO, e_harm), 200)
    assert exp.coefficients.prefix(8) == unit(3).prefix(8)
    exp = spaces.expand(ee, e(), SpaceId(Base.C, ee), 200)
    assert exp.limit == 1 and exp.limit_exact
    assert exp.coefficients.prefix(50) == [0] * 50
    x = spaces.inverse_transform(e_harm, geometric(HALF))
    exp = spaces.expand(e_harm, x, SpaceId(Base.C_ZERO, e_harm), 200)
    assert exp.coefficients.prefix(20) == [HALF ** k for k in range(20)]


def test_expand_in_c_with_inexact_limit(e_harm):
    x = spaces.inverse_transform(e_harm, sequence_from_expr("3 + 2^(-k)"))
    exp = spaces.expand(e_harm, x, SpaceId(Base.C, e_harm), 200)
    assert exp.limit == 3 and not exp.limit_exact
    # x = l e + sum (lambda_k - l) b^(k), checked through the transform
    assert exp.coefficients(4) == mpq(1, 16)


def test_expand_rejects_l_infinity_and_divergent(ee):
    with pytest.raises(ValueError):
        spaces.expand(ee, e(), SpaceId(Base.ELL_INFINITY, ee), 200)
    with pytest.raises(ValueError):
        spaces.expand(ee, enumerate_(), SpaceId(Base.C, ee), 200)


def test_partial_sum_residual_examples(ee, e_harm):
    x = spaces.inverse_transform(e_harm, geometric(HALF))
    for m in range(8):
        assert spaces.partial_sum_residual(e_harm, x, m, 60) == HALF ** (m + 1)
    y = Sequence.from_terms([3, -1, 2])
    assert spaces.partial_sum_residual(e_harm, spaces.inverse_transform(e_harm, y), 2, 30) == 0
    assert spaces.partial_sum_residual(ee, unit(0), 0, 10) == 0
    with pytest.raises(ValueError):
        spaces.partial_sum_residual(ee, e(), 5, 5)


def test_partial_sum_residual_flags_a_broken_section(monkeypatch, e_harm):
    x = spaces.inverse_transform(e_harm, geometric(HALF))
    real = spaces.partial_section
    monkeypatch.setattr(spaces, "partial_section", lambda w, c, m: real(w, c, m + 1))
    with pytest.raises(KernelMismatchError):
        spaces.partial_sum_residual(e_harm, x, 3, 40)


@pytest.mark.parametrize("key", PAIR_KEYS)
def test_residual_identity_on_random_inputs(pairs, key):
    w = pairs[key]
    x = random_sequence(21)
    y = spaces.forward_transform(w, x)
    for m in (0, 3, 10):
        assert spaces.partial_sum_residual(w, x, m, 40) == max(abs(y(k)) for k in range(m + 1, 41))


def test_ad_probe_examples(ee, e_harm):
    x = Sequence.from_terms([2, 5, -1])
    assert spaces.ad_probe(ee, x, 3, 30) == 0
    g = geometric(HALF)
    for m in range(6):
        assert spaces.ad_probe(ee, g, m, 40) == spaces.partial_sum_residual(ee, g, m, 40)
    x = spaces.inverse_transform(e_harm, g)
    residuals = [spaces.ad_probe(e_harm, x, m, 60) for m in range(11)]
    assert all(a >= b for a, b in zip(residuals, residuals[1:]))


def test_space_id():
    assert SpaceId(Base.C).classical
    assert not SpaceId(Base.C, Weights(e(), e())).classical
