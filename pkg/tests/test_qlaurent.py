import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adlvkit.errors import ContractError
from adlvkit.qlaurent import ONE, Q, QLaurent, QMinusOnePoly, monomial, parse

big = st.integers(min_value=-(2 ** 128), max_value=2 ** 128)
laurent = st.dictionaries(st.integers(-12, 12), big, max_size=6).map(QLaurent)
poly = st.dictionaries(st.integers(0, 30), big, max_size=8).map(QLaurent)


@settings(max_examples=200)
@given(laurent, laurent, laurent)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == QLaurent()
    assert a * ONE == a


@settings(max_examples=1000)
@given(poly)
def test_basis_round_trip(p):
    assert p.to_qm1_basis().to_qlaurent() == p


@given(st.dictionaries(st.integers(0, 20), big, max_size=6))
def test_qm1_round_trip(c):
    m = QMinusOnePoly(c)
    assert m.to_qlaurent().to_qm1_basis() == m


@given(laurent)
def test_render_parse_round_trip(p):
    assert parse(str(p)) == p


@given(st.integers(0, 8), st.integers(-5, 5), st.integers(-3, 3))
def test_monomial_matches_expansion(e1, e2, q):
    if q == 0 and e2 < 0:
        return
    from fractions import Fraction
    assert monomial(e1, e2).evaluate(Fraction(q)) == (q - 1) ** e1 * Fraction(q) ** e2


def test_examples():
    assert (Q - 1) + 1 == Q
    assert Q ** 5 * Q ** -5 == ONE
    assert monomial(0, 0) == ONE
    assert str(monomial(1, 2)) == "1*q^3 - 1*q^2"
    assert str(monomial(2, -1)) == "1*q^1 - 2*q^0 + 1*q^-1"
    assert Q.to_qm1_basis().coeffs() == {1: 1, 0: 1}
    assert (Q ** 2).to_qm1_basis().coeffs() == {2: 1, 1: 2, 0: 1}
    assert (Q ** 3 - Q ** 2).to_qm1_basis().is_nonneg
    # (q-1) q^2 + q^3 expands with binomial coefficients
    m = (monomial(1, 2) + Q ** 3).to_qm1_basis()
    assert m.is_nonneg
    assert m.coeffs() == {3: 2, 2: 5, 1: 4, 0: 1}
    assert str(QLaurent.const(3).shift(2) - 1) == "3*q^2 - 1*q^0"
    assert str(QLaurent()) == "0"


def test_errors():
    with pytest.raises(ContractError):
        Q.shift(-3).to_qm1_basis()
    with pytest.raises(ContractError):
        monomial(-1, 0)
    with pytest.raises(ValueError):
        (Q + 1) ** -1
    with pytest.raises(ValueError):
        parse("3*q^2 +")


def test_no_zero_coefficients():
    p = QLaurent({1: 2, 3: 0}) + QLaurent({1: -2})
    assert p.is_zero() and p.coeffs() == {}
    assert QLaurent({2: 1}) != QLaurent({2: 1, 1: 1})
