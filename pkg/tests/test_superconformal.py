from fractions import Fraction as F

import pytest

from baileyflow import superconformal as sc
from baileyflow.bailey import calibrate
from baileyflow.bivariate import ZQSeries, z_first_mismatch
from baileyflow.qseries import first_mismatch

from conftest import S, as_dict, d_geometric, d_mul, d_product


def n1_oracle(p, pp, r, s, order):
    """Naive expansion of the N=1 character body with plain dicts."""
    eps = F(1, 2) if (r - s) % 2 == 0 else F(1)
    theta = {}
    for j in range(-10, 11):
        for e, c in ((F(j * (j * p * pp + r * pp - s * p), 2), 1), (F((j * p - r) * (j * pp - s), 2), -1)):
            if e <= order:
                theta[e] = theta.get(e, 0) + c
    out = d_product([(1, eps + k) for k in range(int(order) + 2)], order)
    for n in range(1, int(order) + 1):
        out = d_mul(out, d_geometric(1, n, order), order)
    out = d_mul(out, theta, order)
    return {e: c for e, c in out.items() if c}


@pytest.mark.parametrize("p,pp,r,s", [(5, 11, 1, 1), (7, 17, 1, 4), (3, 7, 1, 1), (5, 9, 1, 3)])
def test_n1_character_against_oracle(p, pp, r, s):
    chi = sc.n1_character(p, pp, r, s, 12)
    assert as_dict(chi.body) == n1_oracle(p, pp, r, s, 12)


def test_n1_character_examples():
    chi = sc.n1_character(5, 11, 1, 1, 20)
    assert chi.sector == "NS"
    assert chi.body.coeff(chi.body.ord()) == 1
    assert chi.central_charge == F(3, 2) * (1 - F(2 * 36, 5 * 11))
    assert sc.n1_character(7, 17, 1, 4, 5).sector == "R"


@pytest.mark.parametrize("p,pp,r,s", [(5, 11, 1, 1), (7, 17, 1, 4), (3, 7, 1, 2)])
def test_n1_character_label_symmetry(p, pp, r, s):
    a = sc.n1_character(p, pp, r, s, 30).body
    b = sc.n1_character(p, pp, p - r, pp - s, 30).body
    assert a == b


def test_n1_character_errors():
    with pytest.raises(sc.BadParity):
        sc.n1_character(4, 7, 1, 1, 5)
    with pytest.raises(sc.CharacterError):
        sc.n1_character(3, 9, 1, 1, 5)
    with pytest.raises(sc.LabelOutOfRange):
        sc.n1_character(5, 11, 0, 1, 5)


@pytest.mark.parametrize(
    "args,target",
    [((3, 5, 1, 1, False), (5, 11, 1, 1)), ((5, 7, 2, 1, False), (7, 17, 1, 4)), ((3, 5, 1, 1, True), (5, 9, 1, 3))],
)
def test_n1_flow_examples(args, target):
    lhs = sc.n1_flow_lhs(*args, order=25)
    rep = calibrate(lhs, sc.n1_character(*target, 25).body)
    assert rep.match


# -- N=2 -------------------------------------------------------------------------------


def test_vacuum_forms_agree_small():
    a = sc.n2_ns_vacuum(2, 5, "embedding", 10)
    b = sc.n2_ns_vacuum(2, 5, "product", 10)
    assert z_first_mismatch(a.body, b.body) is None
    assert a.prefactor == b.prefactor == sc.Prefactor(-sc.n2_central_charge(2, 5) / 24, F(0))


def test_vacuum_ground_state_and_z_one():
    v = sc.n2_ns_vacuum(3, 5, "product", 15)
    assert v.body.coeff(0).coeff(0) == 1
    assert v.body.invert_z() == v.body
    assert first_mismatch(v.body.set_z_one(), sc.vacuum3(3, 5, 15)) is None


def test_vacuum_bad_form():
    with pytest.raises(sc.CharacterError):
        sc.n2_ns_vacuum(3, 5, "other", 5)


def test_flow_of_constant_character():
    c = F(-3, 5)
    one = sc.CharacterResult(sc.Prefactor(), ZQSeries.one(), "NS", ("vacuum", F(0), F(0)), c)
    out = sc.spectral_flow_half(one, 1)
    assert out.prefactor == sc.Prefactor(c / 24, -c / 6)
    assert out.body == ZQSeries.one()
    assert out.sector == "R"
    assert out.labels == ("vacuum", c / 24, -c / 6)


def test_flow_prefactor_for_three_five():
    c = sc.n2_central_charge(3, 5)
    assert c == F(-3, 5)
    # the factor applied by the flow
    assert (c / 24, -c / 6) == (F(-1, 40), F(1, 10))
    v = sc.n2_ns_vacuum(3, 5, "product", 6)
    out = sc.spectral_flow_half(v, 1)
    assert out.prefactor.z_exp - v.prefactor.z_exp == F(1, 10)


def test_flow_round_trip_and_sector_guard():
    v = sc.n2_ns_vacuum(3, 5, "product", 12)
    there = sc.spectral_flow_half(v, 1)
    back = sc.spectral_flow_half(there, -1)
    assert back.prefactor == v.prefactor and back.labels == v.labels and back.sector == "NS"
    assert z_first_mismatch(back.body, v.body) is None
    with pytest.raises(sc.SectorMismatch):
        sc.spectral_flow_half(there, 1)


@pytest.mark.parametrize("p,pp", [(3, 5), (2, 3)])
def test_flowed_vacuum_equals_ramond_character(p, pp):
    flowed = sc.spectral_flow_half(sc.n2_ns_vacuum(p, pp, "product", 19))
    ram = sc.n2_r_vacuum(p, pp, 12)
    assert flowed.body.q_valid_through >= 12
    assert z_first_mismatch(flowed.body, ram.body) is None
    assert flowed.prefactor == ram.prefactor
    assert flowed.labels == ram.labels


def test_ramond_character_shape():
    c = sc.n2_central_charge(3, 5)
    ram = sc.n2_r_vacuum(3, 5, 12)
    assert ram.prefactor.z_exp == -c / 6
    assert ram.labels == ("vacuum", c / 24, -c / 6)
    assert ram.body.coeff(0).coeff(0) == 1
    witness = z_first_mismatch(ram.body, ram.body.invert_z())
    assert witness is not None


def test_ns_flow_at_z_one_small_model():
    # B(2n) = q^n for M(2,3), so the z=1 sum is sum_n q^n (-q^{1/2})_n^2 / (q)_{2n}
    order = 15
    want = {}
    for n in range(order + 1):
        term = {F(n): 1}
        for k in range(n):
            term = d_mul(term, d_product([(1, F(1, 2) + k)] * 2, order), order)
        for k in range(1, 2 * n + 1):
            term = d_mul(term, d_geometric(1, k, order), order)
        for e, c in term.items():
            want[e] = want.get(e, 0) + c
    want = {e: c for e, c in want.items() if c}
    got = sc.n2_flow_lhs(2, 3, "NS", order).set_z_one()
    assert as_dict(got) == want


def test_r_flow_matches_ramond_for_five_seven():
    got = sc.n2_flow_lhs(5, 7, "R", 25)
    assert z_first_mismatch(got, sc.n2_r_vacuum(5, 7, 25).body) is None


def test_first_negative():
    assert sc.first_negative(S({0: 1, 2: -3})) == (None, F(2), -3)
    assert sc.first_negative(ZQSeries.monomial(-1, 1, -1) + ZQSeries.one()) == (-1, F(1), -1)
    assert sc.first_negative(S({0: 1})) is None


@pytest.mark.parametrize("p,pp", [(1, 3), (2, 3), (5, 7)])
def test_vacuum_product_form_keeps_full_horizon(p, pp):
    # the j = -1 numerator carries a negative exponent, which must not shorten the horizon
    assert sc.n2_ns_vacuum(p, pp, "product", 25).body.q_valid_through == 25
