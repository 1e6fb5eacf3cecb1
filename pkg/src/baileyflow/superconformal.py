"""Superconformal characters and the Bailey-flow sums that reproduce them.

Characters come back normalised: the overall ``q**q_exp * z**z_exp`` sits in
a :class:`Prefactor` and the body is an honest series on a half-integer
lattice.  Flow sums use the bosonic polynomial ``B`` in place of
``q**-N * F`` (they are equal), and ``B(q**-1)`` for ``q**N * F(q**-1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Tuple, Union

from .bivariate import ZQSeries, inverse_linear
from .minimal_model import (
    bose_degree_bound,
    bose_lower_bound,
    bose_poly,
    decompose,
    find_label,
)
from .qseries import (
    QSeries,
    SignedMonomial,
    pochhammer,
    reciprocal_pochhammer,
    reciprocal_pochhammer_infinite,
    series_sum,
)

HALF = Fraction(1, 2)


class CharacterError(ValueError):
    pass


class LabelOutOfRange(CharacterError):
    pass


class BadParity(CharacterError):
    pass


class SectorMismatch(CharacterError):
    pass


@dataclass(frozen=True)
class Prefactor:
    q_exp: Fraction = Fraction(0)
    z_exp: Fraction = Fraction(0)

    def to_json(self) -> dict:
        return {"q_exp": str(self.q_exp), "z_exp": str(self.z_exp)}


@dataclass(frozen=True)
class CharacterResult:
    prefactor: Prefactor
    body: Union[QSeries, ZQSeries]
    sector: str  # "NS" or "R"
    labels: tuple  # (p, p', r, s) for N=1; ("vacuum", h, Q) for N=2
    central_charge: Fraction

    def to_json(self) -> dict:
        return {
            "prefactor": self.prefactor.to_json(),
            "body": self.body.to_json(),
            "sector": self.sector,
            "labels": [str(x) for x in self.labels],
            "central_charge": str(self.central_charge),
        }


def n1_central_charge(p: int, p_prime: int) -> Fraction:
    return Fraction(3, 2) - Fraction(3 * (p - p_prime) ** 2, p * p_prime)


def n2_central_charge(p: int, p_prime: int) -> Fraction:
    return 3 * (1 - Fraction(2 * p, p_prime))


def _check_pair(p: int, p_prime: int):
    if not (0 < p < p_prime) or math.gcd(p, p_prime) != 1:
        raise CharacterError(f"need coprime 0 < p < p', got ({p}, {p_prime})")


def _theta_window(c2: Fraction, c1: Fraction, c0: Fraction, order):
    """Integers j with ``c2 j^2 + c1 j + c0 <= order`` (c2 > 0)."""
    centre = math.floor(-c1 / (2 * c2))
    out = []
    for j0, step in ((centre, 1), (centre - 1, -1)):
        j = j0
        while True:
            e = c2 * j * j + c1 * j + c0
            if e > order and (j - centre) * step >= 1:
                break
            if e <= order:
                out.append((j, e))
            j += step
    return out


# -- N=1 ---------------------------------------------------------------------


def n1_character(p: int, p_prime: int, r: int, s: int, order) -> CharacterResult:
    """The N=1 character of SM(p, p') with labels (r, s), body expanded through ``order``."""
    order = Fraction(order)
    _check_pair(p, p_prime)
    if (p_prime - p) % 2:
        raise BadParity(f"p'-p = {p_prime - p} is odd")
    if math.gcd(p, (p_prime - p) // 2) != 1:
        raise BadParity(f"p={p} and (p'-p)/2={(p_prime - p) // 2} are not coprime")
    if not (1 <= r <= p - 1 and 1 <= s <= p_prime - 1):
        raise LabelOutOfRange(f"need 1 <= r <= {p - 1} and 1 <= s <= {p_prime - 1}, got r={r}, s={s}")
    eps = HALF if (r - s) % 2 == 0 else Fraction(1)
    pp = p_prime
    terms = []
    # q^{j(j p pp + r pp - s p)/2}
    for _, e in _theta_window(Fraction(p * pp, 2), Fraction(r * pp - s * p, 2), Fraction(0), order):
        terms.append(QSeries.monomial(e, 1))
    # -q^{(jp - r)(j pp - s)/2}
    for _, e in _theta_window(Fraction(p * pp, 2), Fraction(-(p * s + r * pp), 2), Fraction(r * s, 2), order):
        terms.append(QSeries.monomial(e, -1))
    theta = series_sum(terms, order)
    pref = _neg_poch_inf(eps, order) * reciprocal_pochhammer_infinite(SignedMonomial(1, 1), order)
    body = (theta * pref).truncate(order)
    return CharacterResult(
        Prefactor(), body, "NS" if eps == HALF else "R", (p, p_prime, r, s), n1_central_charge(p, p_prime)
    )


def _neg_poch_inf(e0, order) -> QSeries:
    """``(-q^e0; q)_oo`` through ``order``."""
    out = QSeries.one()
    k = 0
    while e0 + k <= order:
        out = out.mul_binomial(1, e0 + k).truncate(order)
        k += 1
    return out.with_valid(Fraction(order))


def n1_flow_lhs(p: int, p_prime: int, b: int, s: int, dual: bool, order) -> QSeries:
    """The left side of the N=1 flow identity for M(p, p') labels (b, s).

    Non-dual: ``sum_n q^{(n^2+nb-ns)/2} (-q^e)_k B(2n+b-s) / (q)_{2n+b-s}``.
    Dual: the same with ``q^{3n(n+b-s)/2}`` and ``B(q^-1)``.  Here e and k
    are ``1/2, n+(b-s)/2`` for b-s even and ``1, n+(b-s-1)/2`` for b-s odd.
    """
    order = Fraction(order)
    model = decompose(p, p_prime)
    find_label(model, s)
    r = find_label(model, b).truncated
    d = b - s
    ns = d % 2 == 0
    lower = bose_lower_bound(p, p_prime, r, s)
    terms = []
    n = 0
    while True:
        if dual:
            low = Fraction(3 * n * (n + d), 2) - bose_degree_bound(p, p_prime, r, s, b, n)
            nxt = Fraction(3 * (n + 1) * (n + 1 + d), 2) - bose_degree_bound(p, p_prime, r, s, b, n + 1)
        else:
            low = Fraction(n * (n + d), 2) + lower
            nxt = Fraction((n + 1) * (n + 1 + d), 2) + lower
        if low > order and nxt >= low:
            break
        L = 2 * n + d
        n += 1
        if L < 0:
            continue
        B = bose_poly(p, p_prime, r, s, b, L)
        if B.is_zero():
            continue
        if dual:
            B = B.invert_q()
            lead = Fraction(3 * (n - 1) * (n - 1 + d), 2)
        else:
            lead = Fraction((n - 1) * (n - 1 + d), 2)
        k = (n - 1) + (d // 2 if ns else (d - 1) // 2)
        poch = pochhammer(SignedMonomial(-1, HALF if ns else 1), k)
        num = (B * poch).shift(lead)
        if num.ord() > order:
            continue
        rec = reciprocal_pochhammer(SignedMonomial(1, 1), L, order - num.ord())
        terms.append((num * rec).truncate(order))
    return series_sum(terms, order) if terms else QSeries.zero(order)


# -- N=2 vacuum ----------------------------------------------------------------


def _ns_product(order) -> ZQSeries:
    """``prod_n (1 + z q^{n-1/2})(1 + z^-1 q^{n-1/2}) / (1-q^n)^2``."""
    f = ZQSeries.one()
    k = 0
    while k + HALF <= order:
        f = f.mul_linear(1, 1, k + HALF).mul_linear(1, -1, k + HALF).truncate(order)
        k += 1
    f = f.truncate(order)
    return f * (reciprocal_pochhammer_infinite(SignedMonomial(1, 1), order) ** 2).truncate(order)


def _pole(zpow: int, e, order) -> ZQSeries:
    return inverse_linear(zpow, e, order)


def n2_ns_vacuum(p: int, p_prime: int, form: str = "product", order=20) -> CharacterResult:
    """The N=2 NS vacuum character, from the embedding-diagram form or the product form."""
    order = Fraction(order)
    _check_pair(p, p_prime)
    pp = p_prime
    if form == "product":
        s = _vacuum_sum_product(p, pp, order)
    elif form == "embedding":
        s = _vacuum_sum_embedding(p, pp, order)
    else:
        raise CharacterError(f"unknown form {form!r}; use 'embedding' or 'product'")
    body = (_ns_product(order) * s).truncate(order)
    c = n2_central_charge(p, pp)
    return CharacterResult(Prefactor(-c / 24, Fraction(0)), body, "NS", ("vacuum", Fraction(0), Fraction(0)), c)


def _vacuum_sum_product(p: int, pp: int, order) -> ZQSeries:
    # sum_j q^{pj(pp j+1)} (1 - q^{2pp j+1}) / ((1 + z q^{pp j+1/2})(1 + z^-1 q^{pp j+1/2}))
    total = ZQSeries.zero(order)
    for j, base in _theta_window(Fraction(p * pp), Fraction(p), Fraction(0), order + 2 * pp + 2):
        e = pp * j + HALF
        # each flipped pole contributes q^{-e} > 0, so the term is at least base - 2*min(e,0) + min(0, 2pp j+1)
        low = base + min(0, 2 * pp * j + 1) - 2 * min(e, 0)
        if low > order:
            continue
        num = ZQSeries.from_qseries(QSeries.from_exponents({base: 1, base + 2 * pp * j + 1: -1}))
        # a negative numerator exponent eats into the poles' horizon
        deep = order - min(0, base, base + 2 * pp * j + 1)
        total = total + (num * _pole(1, e, deep) * _pole(-1, e, deep)).truncate(order)
    return total


def _vacuum_sum_embedding(p: int, pp: int, order) -> ZQSeries:
    terms = [ZQSeries.one()]
    n = 0
    while True:
        a = p * (n + 1) * (pp * (n + 1) - 1)
        b = pp * n * (p * n + 1) + p * n + HALF
        if a > order and b > order:
            break
        if a <= order:
            terms.append(ZQSeries.monomial(0, a, -1))
        if b <= order:
            e = pp * n + HALF
            terms.append(-(ZQSeries.monomial(1, b) * _pole(1, e, order)).truncate(order))
            terms.append(-(ZQSeries.monomial(-1, b) * _pole(-1, e, order)).truncate(order))
        n += 1
    n = 1
    while True:
        a = p * n * (pp * n + 1)
        b = pp * n * (p * n + 1) - p * n - HALF
        if a > order and b > order:
            break
        if a <= order:
            terms.append(ZQSeries.monomial(0, a, 1))
        if b <= order:
            e = pp * n - HALF
            terms.append((ZQSeries.monomial(1, b) * _pole(1, e, order)).truncate(order))
            terms.append((ZQSeries.monomial(-1, b) * _pole(-1, e, order)).truncate(order))
        n += 1
    total = ZQSeries.zero(order)
    for t in terms:
        total = total + t.truncate(order)
    return total


def vacuum3(p: int, p_prime: int, order) -> QSeries:
    """The z = 1 vacuum body, from its own single-variable formula."""
    order = Fraction(order)
    _check_pair(p, p_prime)
    pp = p_prime
    pref = _neg_poch_inf(HALF, order) ** 2 * reciprocal_pochhammer_infinite(SignedMonomial(1, 1), order) ** 2
    pref = pref.truncate(order)
    terms = []
    for j, base in _theta_window(Fraction(p * pp), Fraction(p), Fraction(0), order + pp + 1):
        e = pp * j + HALF
        if e > 0:
            # (1 - w) / (1 + w), w = q^e
            frac = QSeries.from_exponents({0: 1, e: -1}).div_binomial(1, e, order)
            term = frac.shift(base)
        else:
            # (1 - w)/(1 + w) = -(1 - 1/w)/(1 + 1/w)
            frac = QSeries.from_exponents({0: 1, -e: -1}).div_binomial(1, -e, order)
            term = -frac.shift(base)
        terms.append(term.truncate(order))
    return (series_sum(terms, order) * pref).truncate(order)


def n2_r_vacuum(p: int, p_prime: int, order=20) -> CharacterResult:
    """The Ramond character obtained from the vacuum by half a unit of spectral flow.

    Body: ``(-z)_oo (-z^-1 q)_oo / (q)_oo^2 * sum_j q^{pj(pp j+1)} (1-q^{2pp j+1})
    / ((1 + z q^{pp j})(1 + z^-1 q^{pp j+1}))``; the j = 0 pole ``1/(1+z)``
    cancels the leading factor of ``(-z)_oo``.
    """
    order = Fraction(order)
    _check_pair(p, p_prime)
    pp = p_prime
    head = ZQSeries.one()
    k = 1
    while k <= order:
        head = head.mul_linear(1, 1, k).mul_linear(1, -1, k).truncate(order)
        k += 1
    head = head.truncate(order) * (reciprocal_pochhammer_infinite(SignedMonomial(1, 1), order) ** 2).truncate(order)
    # j = 0: (1 - q) / (1 + z^-1 q)
    zero_term = (ZQSeries.from_qseries(QSeries.from_exponents({0: 1, 1: -1})) * _pole(-1, 1, order)).truncate(order)
    rest = ZQSeries.zero(order)
    for j, base in _theta_window(Fraction(p * pp), Fraction(p), Fraction(0), order + 2 * pp + 2):
        if j == 0:
            continue
        e1, e2 = pp * j, pp * j + 1
        low = base + min(0, 2 * pp * j + 1) - min(e1, 0) - min(e2, 0)
        if low > order:
            continue
        num = ZQSeries.from_qseries(QSeries.from_exponents({base: 1, base + 2 * pp * j + 1: -1}))
        rest = rest + (num * _pole(1, e1, order) * _pole(-1, e2, order)).truncate(order)
    body = (head * (zero_term + rest.mul_linear(1, 1, 0))).truncate(order)
    c = n2_central_charge(p, pp)
    return CharacterResult(Prefactor(Fraction(0), -c / 6), body, "R", ("vacuum", c / 24, -c / 6), c)


# -- spectral flow ---------------------------------------------------------


def spectral_flow_half(chi: CharacterResult, direction: int = 1) -> CharacterResult:
    """Half a unit of spectral flow: NS -> R for direction +1, back for -1.

    ``chi_R(q, z) = q^{c/24} z^{-c/6} chi_NS(q, z q^{-1/2})``; a prefactor
    ``z^w`` picks up ``q^{-w/2}`` under the substitution.
    """
    c = chi.central_charge
    pq, pz = chi.prefactor.q_exp, chi.prefactor.z_exp
    if direction == 1:
        if chi.sector != "NS":
            raise SectorMismatch("flow with direction +1 needs an NS character")
        body = chi.body.shift_z(-1)
        pref = Prefactor(pq + c / 24 - pz / 2, pz - c / 6)
        sector = "R"
        labels = chi.labels
        if labels and labels[0] == "vacuum":
            h, Q = labels[1], labels[2]
            labels = ("vacuum", h - Q / 2 + c / 24, Q - c / 6)
    elif direction == -1:
        if chi.sector != "R":
            raise SectorMismatch("flow with direction -1 needs an R character")
        body = chi.body.shift_z(1)
        pref = Prefactor(pq + c / 24 + pz / 2, pz + c / 6)
        sector = "NS"
        labels = chi.labels
        if labels and labels[0] == "vacuum":
            h, Q = labels[1], labels[2]
            Q0 = Q + c / 6
            labels = ("vacuum", h + Q0 / 2 - c / 24, Q0)
    else:
        raise ValueError("direction must be +1 or -1")
    return replace(chi, prefactor=pref, body=body, sector=sector, labels=labels)


# -- N=2 flow ----------------------------------------------------------------


def n2_flow_lhs(p: int, p_prime: int, sector: str, order) -> ZQSeries:
    """``sum_n (rho1)_n (rho2)_n B_{0,1}(2n, 1) / (q)_{2n}`` for the NS or R choice of rho.

    NS: ``rho1 = -z q^{1/2}, rho2 = -z^-1 q^{1/2}``; R: ``rho1 = -z, rho2 = -z^-1 q``.
    Every ``B_{0,1}(2n, 1)`` starts at ``q^n`` or later, so n stops at ``order``.
    """
    order = Fraction(order)
    _check_pair(p, p_prime)
    if sector == "NS":
        e1, e2 = HALF, HALF
    elif sector == "R":
        e1, e2 = Fraction(0), Fraction(1)
    else:
        raise SectorMismatch(f"sector must be NS or R, got {sector!r}")
    total = ZQSeries.zero(order)
    poch = ZQSeries.one()
    n = 0
    while n <= order:
        B = bose_poly(p, p_prime, 0, 1, 1, 2 * n)
        if not B.is_zero() and B.ord() <= order:
            rec = reciprocal_pochhammer(SignedMonomial(1, 1), 2 * n, order - B.ord())
            total = total + (poch * (B * rec).truncate(order)).truncate(order)
        poch = poch.mul_linear(1, 1, e1 + n).mul_linear(1, -1, e2 + n).truncate(order)
        n += 1
    return total


def first_negative(body) -> Optional[Tuple]:
    """Witness ``(zpow, exponent, coeff)`` of a negative coefficient, or None."""
    if isinstance(body, QSeries):
        for e, cf in body.items():
            if cf < 0:
                return (None, e, cf)
        return None
    for k, c in body.items():
        for e, cf in c.items():
            if cf < 0:
                return (k, e, cf)
    return None
