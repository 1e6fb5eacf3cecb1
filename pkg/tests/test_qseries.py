from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from baileyflow.qseries import (
    INF,
    LeadingCoefficientNotUnit,
    NegativeM,
    NonconvergentProduct,
    NotAPolynomial,
    PoleInNegativePochhammer,
    QSeries,
    SignedMonomial,
    TruncationError,
    first_mismatch,
    pochhammer,
    pochhammer_infinite,
    qbinomial,
    qbinomial_ext,
    reciprocal_pochhammer,
    reciprocal_pochhammer_infinite,
)

from conftest import S, as_dict, d_geometric, d_mul, d_product, d_qbinomial, partitions

q = QSeries.monomial


# -- ring operations ---------------------------------------------------------


def test_add_cancels():
    assert (1 + q(1)) + (1 - q(1)) == S({0: 2})


def test_difference_of_squares():
    assert (1 + q(1)) * (1 - q(1)) == S({0: 1, 2: -1})


def test_half_integer_lattice_refines():
    prod = q(F(1, 2)) * q(F(1, 2))
    assert prod == q(1)
    assert prod.normalize().den == 1


def test_valid_through_rules():
    f = S({0: 1, 1: 2}, valid=5)
    g = S({2: 1, 3: 1}, valid=7)
    assert (f + g).valid_through == 5
    # min(V_f + ord g, V_g + ord f)
    assert (f * g).valid_through == 7


def test_coefficient_beyond_horizon_is_refused():
    f = (1 - q(1)).reciprocal(3)
    assert f.coeff(3) == 1
    with pytest.raises(TruncationError):
        f.coeff(4)


# -- reciprocals ---------------------------------------------------------------


def test_reciprocal_geometric():
    assert (1 - q(1)).reciprocal(3) == S({0: 1, 1: 1, 2: 1, 3: 1}, valid=3)


def test_reciprocal_half_step():
    assert (1 + q(F(1, 2))).reciprocal(1) == S({0: 1, F(1, 2): -1, 1: 1}, valid=1)


def test_reciprocal_needs_unit_leading_coefficient():
    with pytest.raises(LeadingCoefficientNotUnit):
        (2 + q(1)).reciprocal(3)


# -- Pochhammer symbols ---------------------------------------------------------


def test_pochhammer_two_factors():
    got = pochhammer(SignedMonomial(-1, F(1, 2)), 2)
    assert as_dict(got) == d_product([(1, F(1, 2)), (1, F(3, 2))], 10)


def test_pochhammer_q_three():
    got = pochhammer(SignedMonomial(1, 1), 3)
    assert as_dict(got) == d_product([(-1, 1), (-1, 2), (-1, 3)], 10)


def test_pochhammer_negative_index():
    # (q^2)_{-1} = 1/(1 - q)
    got = pochhammer(SignedMonomial(1, 2), -1, 3)
    assert got == S(d_geometric(1, 1, 3), valid=3)


def test_pochhammer_negative_index_pole():
    with pytest.raises(PoleInNegativePochhammer):
        pochhammer(SignedMonomial(1, 1), -1, 3)


def test_euler_function_pentagonal():
    assert pochhammer_infinite(SignedMonomial(1, 1), 5) == S({0: 1, 1: -1, 2: -1, 5: 1}, valid=5)


def test_infinite_products_small_orders():
    assert pochhammer_infinite(SignedMonomial(-1, F(1, 2)), F(3, 2)) == S(
        {0: 1, F(1, 2): 1, F(3, 2): 1}, valid=F(3, 2)
    )
    assert pochhammer_infinite(SignedMonomial(-1, 1), 2) == S({0: 1, 1: 1, 2: 1}, valid=2)


def test_infinite_product_needs_positive_exponent():
    with pytest.raises(NonconvergentProduct):
        pochhammer_infinite(SignedMonomial(1, 0), 5)


def test_reciprocal_euler_counts_partitions():
    got = reciprocal_pochhammer_infinite(SignedMonomial(1, 1), 30)
    assert [got.coeff(n) for n in range(31)] == [partitions(n) for n in range(31)]


def test_reciprocal_pochhammer_finite_against_geometric_product():
    order = 12
    want = {F(0): 1}
    for k in range(1, 4):
        want = d_mul(want, d_geometric(1, k, order), order)
    assert as_dict(reciprocal_pochhammer(SignedMonomial(1, 1), 3, order)) == want


@given(st.integers(0, 6), st.integers(0, 6))
def test_pochhammer_cocycle(n, m):
    a = SignedMonomial(-1, F(1, 2))
    left = pochhammer(a, n) * pochhammer(a.times_q(n), m)
    assert left == pochhammer(a, n + m)


# -- q-binomials ------------------------------------------------------------------


def test_qbinomial_examples():
    assert qbinomial(2, 1) == S({0: 1, 1: 1})
    for n in range(6):
        assert qbinomial(n, 0) == QSeries.one()
    assert qbinomial(2, 3).is_zero()
    assert qbinomial(2, 3).valid_through == INF


@given(st.integers(0, 12), st.integers(0, 12))
def test_qbinomial_matches_pascal_oracle(n, k):
    assert as_dict(qbinomial(n, k)) == d_qbinomial(n, k)


@given(st.integers(0, 14), st.data())
def test_qbinomial_symmetry_and_q_equals_one(n, data):
    import math

    j = data.draw(st.integers(0, n))
    assert qbinomial(n, j) == qbinomial(n, n - j)
    assert qbinomial(n, j).at_one() == math.comb(n, j)


def test_qbinomial_ext_examples():
    assert qbinomial_ext(-1, 2).is_zero()
    assert qbinomial_ext(1, 1) == S({0: 1, 1: 1})
    assert qbinomial_ext(-3, 1) == S({-2: -1, -1: -1})


def test_qbinomial_ext_negative_m():
    with pytest.raises(NegativeM):
        qbinomial_ext(1, -1)


@pytest.mark.parametrize("n", range(-10, 11))
def test_binomial_inversion_law(n):
    for m in range(11):
        f = qbinomial_ext(n, m)
        assert f.invert_q() == f.shift(-n * m)


# -- q -> 1/q ------------------------------------------------------------------------


def test_invert_q_examples():
    assert (1 + q(1)).invert_q() == S({0: 1, -1: 1})
    assert S({0: 5}).invert_q() == S({0: 5})
    f = qbinomial_ext(1, 1)
    assert f.invert_q() == f.shift(-1)


def test_invert_q_rejects_truncated_series():
    with pytest.raises(NotAPolynomial):
        (1 - q(1)).reciprocal(3).invert_q()


# -- properties on random polynomials ------------------------------------------------

poly = st.dictionaries(st.integers(-3, 8).map(lambda k: F(k, 2)), st.integers(-5, 5), max_size=6).map(S)


@given(poly, poly, poly)
def test_ring_axioms(f, g, h):
    assert (f + g) * h == f * h + g * h
    assert f * g == g * f


@given(poly, poly)
def test_multiplication_matches_dict_oracle(f, g):
    assert as_dict(f * g) == d_mul(as_dict(f), as_dict(g))


@given(poly)
def test_invert_q_involution(f):
    assert f.invert_q().invert_q() == f


unit_poly = st.tuples(
    st.sampled_from([1, -1]),
    st.dictionaries(st.integers(1, 8).map(lambda k: F(k, 2)), st.integers(-4, 4), max_size=5),
).map(lambda t: S({0: t[0], **t[1]}))


@settings(max_examples=50)
@given(unit_poly, st.integers(1, 10))
def test_reciprocal_inverts(f, order):
    inv = f.reciprocal(order)
    assert first_mismatch(f * inv, QSeries.one()) is None
    assert (f * inv).valid_through == order


def test_text_and_json_forms():
    f = S({0: 1, F(1, 2): 1, 2: -2})
    assert str(f) == "1 + q^(1/2) - 2*q^2"
    assert f.to_json() == {"den": 2, "valid_through": "inf", "terms": [["0", "1"], ["1", "1"], ["4", "-2"]]}
    assert QSeries.from_json(f.to_json()) == f
    g = (1 - q(1)).reciprocal(2)
    assert str(g) == "1 + q + q^2 + O(q^2+)"
    assert QSeries.from_json(g.to_json()) == g
