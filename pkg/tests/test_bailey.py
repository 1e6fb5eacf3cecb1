from fractions import Fraction as F

import pytest

from baileyflow import bailey
from baileyflow.minimal_model import bose_poly
from baileyflow.qseries import QSeries, SignedMonomial, first_mismatch, reciprocal_pochhammer

from conftest import S, as_dict, d_geometric, d_mul, partitions

PARAMS = [(3, 5, 0, 1, 1), (5, 7, 1, 1, 2), (2, 3, 0, 1, 1), (3, 4, 0, 1, 1)]


def test_alpha_examples():
    pair = bailey.mpp_pair(3, 5, 0, 1, 1)
    assert pair.alpha_at(0) == QSeries.one()
    assert pair.alpha_at(-1) == S({0: -1})
    assert pair.alpha_at(5) == S({12: 1})
    assert pair.alpha_at(2).is_zero()


def test_dual_alpha_examples():
    pair = bailey.mpp_pair(3, 5, 0, 1, 1, dual=True)
    assert pair.alpha_at(0) == QSeries.one()
    # second branch at j=0: sign -1, exponent (0 - s)(0 + r - b) = (-1)(-1) = 1
    assert pair.alpha_at(-1) == S({1: -1})
    # first branch at j=1: 5*2 - 5*(0-1) - 1*2 = 13
    assert pair.alpha_at(5) == S({13: 1})


@pytest.mark.parametrize("p,pp,r,s,b", PARAMS)
def test_dualize_reproduces_printed_dual(p, pp, r, s, b):
    fams = bailey.alpha_mpp(p, pp, r, s, b, 0)
    assert bailey.families_equal(bailey.dualize_alpha(fams, b - s), bailey.alpha_mpp_dual(p, pp, r, s, b, 0))


@pytest.mark.parametrize("p,pp,r,s,b", PARAMS)
def test_dualize_is_an_involution(p, pp, r, s, b):
    fams = bailey.alpha_mpp(p, pp, r, s, b, 0)
    assert bailey.families_equal(bailey.dualize_alpha(bailey.dualize_alpha(fams, b - s), b - s), fams)


def test_dualize_unit_pair():
    assert bailey.families_equal(bailey.dualize_alpha(bailey.unit_alpha(), 0), bailey.unit_alpha())


def test_dualize_rejects_non_monomial_alpha():
    with pytest.raises(bailey.NonMonomialAlpha):
        bailey.dualize_alpha([QSeries.one()], 0)


def test_unit_pair_beta():
    pair = bailey.unit_pair()
    for n in range(5):
        want = {F(0): 1}
        for k in range(1, n + 1):
            g = d_geometric(1, k, 10)
            want = d_mul(d_mul(want, g, 10), g, 10)
        assert as_dict(bailey.beta_from_alpha(pair, n, 10)) == want


def test_mpp_beta_examples():
    pair = bailey.mpp_pair(3, 5, 0, 1, 1)
    assert bailey.beta_from_alpha(pair, 0, 10) == QSeries.one().truncate(10)
    want = (QSeries.monomial(1) * reciprocal_pochhammer(SignedMonomial(1, 1), 2, 10)).truncate(10)
    assert bailey.beta_from_alpha(pair, 1, 10) == want
    assert want == (bose_poly(3, 5, 0, 1, 1, 2) * reciprocal_pochhammer(SignedMonomial(1, 1), 2, 10)).truncate(10)


@pytest.mark.parametrize("p,pp,r,s,b", PARAMS)
@pytest.mark.parametrize("dual", [False, True])
def test_beta_matches_bosonic_polynomial(p, pp, r, s, b, dual):
    pair = bailey.mpp_pair(p, pp, r, s, b, 0, dual)
    for n in range(6):
        assert first_mismatch(bailey.beta_from_alpha(pair, n, 20), pair.beta_bosonic(n, 20)) is None


def test_beta_needs_integer_base():
    pair = bailey.BaileyPair(F(1, 2), bailey.unit_alpha())
    with pytest.raises(bailey.BaileyError):
        bailey.beta_from_alpha(pair, 1, 5)


# -- the lemma -------------------------------------------------------------------


def test_lemma_unit_pair_both_limits_gives_partitions():
    lhs, rhs = bailey.lemma_sides(bailey.unit_pair(), "inf_inf", 30)
    assert first_mismatch(lhs, rhs) is None
    assert [lhs.coeff(n) for n in range(31)] == [partitions(n) for n in range(31)]


@pytest.mark.parametrize("p,pp,r,s,b", PARAMS)
@pytest.mark.parametrize("dual", [False, True])
def test_lemma_n1(p, pp, r, s, b, dual):
    pair = bailey.mpp_pair(p, pp, r, s, b, 0, dual)
    lhs, rhs = bailey.lemma_sides(pair, "n1", 30)
    assert first_mismatch(lhs, rhs) is None
    assert lhs.valid_through >= 30


def test_lemma_n1_sector_check():
    pair = bailey.mpp_pair(5, 7, 1, 1, 2)
    bailey.lemma_sides(pair, "n1_r", 10)
    with pytest.raises(bailey.UnsupportedSpecialization):
        bailey.lemma_sides(pair, "n1_ns", 10)


@pytest.mark.parametrize("spec", ["n2_ns", "n2_r"])
def test_lemma_n2(spec):
    from baileyflow.bivariate import z_first_mismatch

    lhs, rhs = bailey.lemma_sides(bailey.mpp_pair(3, 5, 0, 1, 1), spec, 16)
    assert z_first_mismatch(lhs, rhs) is None
    assert lhs.q_valid_through >= 16


def test_lemma_unknown_specialization():
    with pytest.raises(bailey.UnsupportedSpecialization):
        bailey.lemma_sides(bailey.unit_pair(), "rho_generic", 5)


# -- calibration -------------------------------------------------------------------


def test_calibrate_examples():
    one_q = S({0: 1, 1: 1})
    rep = bailey.calibrate(one_q, one_q.shift(F(1, 2)))
    assert rep.shift == F(1, 2) and rep.match
    rep = bailey.calibrate(one_q, S({0: 1, 1: 2}))
    assert rep.shift == 0 and not rep.match and rep.first_mismatch[0] == 1
    rep = bailey.calibrate(one_q, one_q)
    assert rep.shift == 0 and rep.match


def test_calibrate_zero_series():
    with pytest.raises(bailey.ZeroSeries):
        bailey.calibrate(QSeries.zero(), QSeries.one())
