import itertools
import json
from fractions import Fraction as F

import pytest

from baileyflow import fermionic as fm
from baileyflow import superconformal as sc
from baileyflow.bailey import calibrate
from baileyflow.minimal_model import bose_poly, decompose
from baileyflow.qseries import QSeries, first_mismatch

from conftest import S, as_dict, d_qbinomial


def ext_binomial(top, m):
    """``[top; m]'`` via the reflection rule for negative tops."""
    if m < 0:
        return {}
    if top >= 0:
        return d_qbinomial(top, m)
    n = top - m
    shift = F(m * (2 * n + m + 1), 2)
    return {e + shift: (-1) ** m * c for e, c in d_qbinomial(-n - 1, m).items()}


def brute_force(sys, L, box):
    """Sum over every m in ``[0, box]^d`` without any region analysis."""
    d = sys.dim
    I = sys.incidence
    out = {}
    for m in itertools.product(range(box + 1), repeat=d):
        ok = True
        for want, x in zip(sys.parity, m):
            if want == "L" and (x - L) % 2 or want in (0, 1) and x % 2 != want:
                ok = False
        if not ok:
            continue
        term = {sys.ground_at(L) + sum(F(0) + sys.matrix[i][j] * m[i] * m[j] for i in range(d) for j in range(d)) / 4
                + sys.a_sign * sum(F(0) + a * x for a, x in zip(sys.linear, m)) / 2: 1}
        for j in range(d):
            t2 = sum(I[j][k] * m[k] for k in range(d)) + sys.u[j] + sys.v[j] + (L if j == 0 else 0)
            if t2.denominator != 1 or int(t2) % 2:
                term = None
                break
            b = ext_binomial(int(t2) // 2, m[j])
            new = {}
            for e1, c1 in term.items():
                for e2, c2 in b.items():
                    new[e1 + e2] = new.get(e1 + e2, 0) + c1 * c2
            term = new
        for e, c in (term or {}).items():
            out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


D0 = fm.FermionicSystem((), (), (), (), (), ground=(0, F(1, 2), 0))
D1 = fm.FermionicSystem(((F(1),),), (F(0),), ("L",), (0,), (0,))


def test_oracle_reflection_rule():
    assert ext_binomial(-2, 1) == {F(-2): -1, F(-1): -1}


def test_empty_system():
    assert fm.fermi_eval(D0, 4) == S({2: 1})
    assert fm.fermi_eval_dual(D0, 4) == S({-2: 1})
    assert fm.fermi_eval_dual(D0, 0) == QSeries.one()


def test_one_dimensional_examples():
    assert fm.fermi_eval(D1, 2) == S({0: 1, 1: 1})
    assert fm.fermi_eval(D1, 0) == QSeries.one()
    assert fm.fermi_eval_dual(D1, 2) == fm.fermi_eval(D1, 2).invert_q()
    assert fm.fermi_eval_dual(D1, 0) == QSeries.one()


def test_infeasible_parity():
    sys = fm.FermionicSystem(((F(1),),), (F(0),), (1,), (0,), (0,))
    # tops (m + L)/2 with m odd and L even are never integral
    assert fm.fermi_eval(sys, 2).is_zero()
    assert not fm.is_feasible(sys, 2)
    with pytest.raises(fm.InfeasibleParity):
        fm.fermi_eval(sys, 2, strict=True)


BASES = [((3, 5), 1, 1), ((5, 7), 1, 1), ((5, 7), 2, 1), ((4, 5), 1, 1), ((5, 8), 1, 1), ((4, 7), 1, 1)]


@pytest.mark.parametrize("model,b,s", BASES)
@pytest.mark.parametrize("parity", ["L", None])
def test_finite_sum_matches_brute_force(model, b, s, parity):
    m = decompose(*model)
    sys = fm.base_system(m, b, s, parity=[parity] * m.dim)
    for L in range(abs(b - s), 9, 2):
        assert as_dict(fm.fermi_eval(sys, L)) == brute_force(sys, L, L + 4)


@pytest.mark.parametrize("model,b,s", BASES)
def test_dual_form_is_q_inversion(model, b, s):
    m = decompose(*model)
    sys = fm.base_system(m, b, s, linear=[F(1, 2)] * m.dim, parity=["L"] * m.dim, ground=(0, F(1, 4), 0))
    for L in range(abs(b - s), 11, 2):
        assert fm.fermi_eval_dual(sys, L) == fm.fermi_eval(sys, L).invert_q()


@pytest.mark.parametrize("model,b,s", BASES)
def test_zero_linear_term_sums_are_positive(model, b, s):
    m = decompose(*model)
    sys = fm.base_system(m, b, s, parity=["L"] * m.dim)
    for L in range(abs(b - s), 13, 2):
        assert all(c > 0 for _, c in fm.fermi_eval(sys, L).items())


# -- enlarged systems ---------------------------------------------------------------


def test_extend_n2_over_one_dimensional_base():
    ext = fm.extend_system(fm.base_system(decompose(3, 5), 1, 1), "n2ns")
    M = [[int(x) for x in row] for row in ext.matrix]
    assert [row[:3] for row in M[:3]] == [[2, 0, -1], [0, 2, -1], [-1, -1, 1]]
    assert M[3][2] == -1 and M[3][3] == 1
    assert ext.dim == 4 and ext.distinguished == {2}
    assert ext.parity[:3] == (None, None, 0)


def test_extend_n2_over_empty_base():
    ext = fm.extend_system(fm.base_system(decompose(2, 3), 1, 1), "n2ns")
    assert [[int(x) for x in row] for row in ext.matrix] == [[2, 0, -1], [0, 2, -1], [-1, -1, 1]]


def test_extend_n1():
    ext = fm.extend_system(fm.base_system(decompose(3, 5), 1, 1), "n1ns")
    M = [[int(x) for x in row] for row in ext.matrix]
    assert [row[:2] for row in M[:2]] == [[2, -1], [-1, 1]]
    assert ext.dim == 3 and ext.distinguished == {1}
    r = fm.extend_system(fm.base_system(decompose(3, 5), 1, 1), "n1r")
    assert r.u[:2] == (1, 0) and r.parity[1] == 1 and r.scale == F(1, 2)


@pytest.mark.parametrize("target", fm.TARGETS)
def test_extended_incidence_is_two_minus_matrix(target):
    ext = fm.extend_system(fm.base_system(decompose(5, 7), 2, 1), target)
    for i in range(ext.dim):
        for j in range(ext.dim):
            assert ext.incidence[i][j] == (2 if i == j else 0) - ext.matrix[i][j]


def test_extend_unknown_target():
    with pytest.raises(fm.UnknownTarget):
        fm.extend_system(D1, "n3")


def test_extend_needs_base():
    ext = fm.extend_system(D0, "n2ns")
    with pytest.raises(fm.FermionicError):
        fm.extend_system(ext, "n2ns")


@pytest.fixture(scope="module")
def small_model_system():
    rep = fm.discover(decompose(2, 3), 1, 1, 4, 12)
    assert len(rep.found) == 1
    return rep.found[0]


def test_discovery_small_model(small_model_system):
    assert small_model_system.ground == (0, F(1, 2), 0)
    for L in range(0, 13, 2):
        assert fm.fermi_eval(small_model_system, L) == bose_poly(2, 3, 0, 1, 1, L)


def test_char_below_first_exponent_is_one(small_model_system):
    ext = fm.extend_system(small_model_system, "n2ns")
    assert fm.fermi_char(ext, F(1, 4)) == QSeries.one().truncate(F(1, 4))


def test_char_n2_sectors(small_model_system):
    ns = fm.fermi_char(fm.extend_system(small_model_system, "n2ns"), 12)
    assert first_mismatch(ns, sc.n2_ns_vacuum(2, 3, "product", 12).body.set_z_one()) is None
    r = fm.fermi_char(fm.extend_system(small_model_system, "n2r"), 12)
    assert calibrate(r, sc.n2_r_vacuum(2, 3, 12).body.set_z_one()).match


def test_char_n1_targets(small_model_system):
    ns = fm.fermi_char(fm.extend_system(small_model_system, "n1ns"), 15)
    assert calibrate(ns, sc.n1_character(3, 7, 1, 1, 15).body).match
    dual = fm.fermi_char(fm.extend_system(small_model_system, "n1ns_dual"), 15)
    assert calibrate(dual, sc.n1_character(3, 5, 1, 3, 15).body).match


def test_char_rejects_uncertifiable_forms():
    grows_negative = fm.FermionicSystem(((F(3),),), (F(0),), (None,), (0,), (0,))
    with pytest.raises(fm.IndefiniteForm):
        fm.fermi_char(fm.extend_system(grows_negative, "n2ns"), 5)
    indefinite = fm.FermionicSystem(((F(-1),),), (F(0),), (None,), (0,), (0,))
    with pytest.raises(fm.IndefiniteForm):
        fm.fermi_char(fm.extend_system(indefinite, "n1ns"), 5)


# -- lemmas and discovery ---------------------------------------------------------------


def test_lemma_examples():
    rep = fm.expansion_lemma("neg_q_half", 2)
    assert rep.equal and rep.lhs == S({0: 1, F(1, 2): 1})
    rep = fm.expansion_lemma("neg_q", 1)
    assert rep.equal and rep.lhs == QSeries.one()
    rep = fm.expansion_lemma("x_n", 1)
    assert rep.equal


@pytest.mark.parametrize("kind,sizes", [("neg_q_half", range(0, 21, 2)), ("neg_q", range(1, 21, 2)), ("x_n", range(21))])
def test_lemmas_hold_through_twenty(kind, sizes):
    for size in sizes:
        assert fm.expansion_lemma(kind, size).equal


def test_lemma_parity_domain():
    with pytest.raises(fm.BadParity):
        fm.expansion_lemma("neg_q", 2)
    with pytest.raises(fm.BadParity):
        fm.expansion_lemma("neg_q_half", 3)
    with pytest.raises(fm.FermionicError):
        fm.expansion_lemma("other", 1)


def test_inversion_check():
    assert all(fm.inversion_check(n, m) for n in range(-10, 11) for m in range(11))


def test_discover_radius_zero_rejects_bare_system():
    rep = fm.discover(decompose(3, 5), 1, 1, 0, 2)
    assert rep.found == [] and rep.exhausted
    bare = fm.base_system(decompose(3, 5), 1, 1, parity=["L"])
    assert fm.fermi_eval(bare, 2).coeff(0) == 1
    assert bose_poly(3, 5, 0, 1, 1, 2) == S({1: 1})


def test_discover_single_length_is_degenerate():
    rep = fm.discover(decompose(3, 5), 1, 1, 2, 0)
    assert rep.found
    assert any("underdetermined" in n for n in rep.notes)
    for sys in rep.found:
        assert fm.fermi_eval(sys, 0) == bose_poly(3, 5, 0, 1, 1, 0)


def test_discover_is_deterministic():
    a = fm.discover(decompose(3, 5), 1, 1, 2, 4).to_json()
    b = fm.discover(decompose(3, 5), 1, 1, 2, 4).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


# -- configuration ------------------------------------------------------------------------


def test_system_json_round_trip(tmp_path, small_model_system):
    for sys in (small_model_system, fm.extend_system(fm.base_system(decompose(5, 7), 2, 1), "n2r")):
        data = fm.system_to_json(sys)
        assert fm.system_from_json(json.loads(json.dumps(data))) == sys
    path = tmp_path / "sys.json"
    path.write_text(json.dumps({"matrix": [[1]], "linear": ["0"], "parity": ["free"], "u": [0], "v": [0]}))
    loaded = fm.load_system(str(path))
    assert loaded.parity == (None,) and loaded.ground == (0, 0, 0)


def test_bad_configuration():
    with pytest.raises(fm.FermionicError):
        fm.system_from_json({"linear": ["0"]})
    with pytest.raises(fm.FermionicError):
        fm.system_from_json({"matrix": [[1, 0]], "linear": ["0"]})
