"""Bilateral Bailey pairs, their duals, and the specialised Bailey lemma.

A pair is relative to ``a = q**a_exp``.  Its alpha-sequence is sparse: a
union of :class:`QuadraticFamily` objects, each putting a signed monomial
``sign * q**(c2 j^2 + c1 j + c0)`` at index ``n = period*j + shift``.

The beta side is either summed from alpha through the defining relation or
read off the bosonic polynomial ``B_{r,s}(2n+b-s+2x, b) / (aq)_{2n}``.  The
normalisation ``q**-N F`` of the fermionic side is never needed: it equals
``B`` by the Bose-Fermi identity, so only ``B`` enters here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .bivariate import ZQSeries, inverse_linear
from .minimal_model import bose_degree_bound, bose_lower_bound, bose_poly
from .qseries import (
    INF,
    QSeries,
    SignedMonomial,
    first_mismatch,
    pochhammer,
    pochhammer_infinite,
    reciprocal_pochhammer,
    reciprocal_pochhammer_infinite,
    series_sum,
)


class BaileyError(ValueError):
    pass


class NonMonomialAlpha(BaileyError):
    pass


class UnsupportedSpecialization(BaileyError):
    pass


class ZeroSeries(BaileyError):
    pass


@dataclass(frozen=True)
class QuadraticFamily:
    sign: int
    period: int
    shift: int
    c2: Fraction
    c1: Fraction
    c0: Fraction

    @property
    def isolated(self) -> bool:
        """Period 0 marks a single entry at ``n = shift`` (only j = 0)."""
        return self.period == 0

    def index(self, j: int) -> int:
        return self.period * j + self.shift

    def params(self, nmin: int, nmax: int) -> range:
        """All j with ``nmin <= index(j) <= nmax``."""
        if self.isolated:
            return range(0, 1) if nmin <= self.shift <= nmax else range(0)
        lo = math.ceil(Fraction(nmin - self.shift, self.period))
        hi = math.floor(Fraction(nmax - self.shift, self.period))
        return range(lo, hi + 1)

    def exponent(self, j: int) -> Fraction:
        return self.c2 * j * j + self.c1 * j + self.c0

    def param_for(self, n: int) -> Optional[int]:
        """The j with index(j) == n, if any."""
        d = n - self.shift
        if self.isolated:
            return 0 if d == 0 else None
        if d % self.period:
            return None
        return d // self.period

    def key(self):
        shift = self.shift if self.isolated else self.shift % self.period
        return (self.sign, self.period, shift, self.c2, self.c1, self.c0)


def _family(sign, period, shift, c2, c1, c0) -> QuadraticFamily:
    return QuadraticFamily(sign, period, shift, Fraction(c2), Fraction(c1), Fraction(c0))


def alpha_mpp(p: int, p_prime: int, r: int, s: int, b: int, x: int) -> List[QuadraticFamily]:
    """The two alpha-branches of the M(p,p') pair relative to a = q^(b-s+2x)."""
    pp = p_prime
    # q^{j(j p pp + r pp - s p)} at n = j pp - x
    first = _family(1, pp, -x, p * pp, r * pp - s * p, 0)
    # -q^{(jp - r)(j pp - s)} at n = j pp - b - x
    second = _family(-1, pp, -b - x, p * pp, -(p * s + r * pp), r * s)
    return [first, second]


def alpha_mpp_dual(p: int, p_prime: int, r: int, s: int, b: int, x: int) -> List[QuadraticFamily]:
    """The alpha-branches of the dual M(p,p') pair, as printed."""
    pp = p_prime
    tail = -x * (b + x - s)
    # j^2 pp (pp - p) - j pp (r - b) - j s (pp - p) - x(b + x - s)
    first = _family(1, pp, -x, pp * (pp - p), -pp * (r - b) - s * (pp - p), tail)
    # sign -1, exponent (j pp - s)(j (pp - p) + r - b) - x(b + x - s)
    second = _family(
        -1, pp, -b - x, pp * (pp - p), pp * (r - b) - s * (pp - p), -s * (r - b) + tail
    )
    return [first, second]


def dualize_alpha(families: Sequence[QuadraticFamily], a_exp) -> List[QuadraticFamily]:
    """Apply ``A_n(a,q) = a^n q^{n^2} alpha_n(1/a, 1/q)`` to monomial families.

    With ``a = q^c`` and ``n = P j + S`` the new exponent is
    ``c n + n^2 - E(j)``, again quadratic in j.
    """
    c = Fraction(a_exp)
    out = []
    for f in families:
        if not isinstance(f, QuadraticFamily):
            raise NonMonomialAlpha(f"cannot dualize {f!r}")
        P, S = f.period, f.shift
        c2 = P * P - f.c2
        c1 = 2 * P * S + c * P - f.c1
        c0 = S * S + c * S - f.c0
        out.append(QuadraticFamily(f.sign, P, S, c2, c1, c0))
    return out


def unit_alpha() -> List[QuadraticFamily]:
    """alpha_n = delta_{n,0}."""
    return [QuadraticFamily(1, 0, 0, Fraction(0), Fraction(0), Fraction(0))]


def families_equal(fa: Sequence[QuadraticFamily], fb: Sequence[QuadraticFamily], jrange=range(-4, 5)) -> bool:
    """Family-by-family equality of (index, sign, exponent) over a j-window."""
    if len(fa) != len(fb):
        return False
    for f, g in zip(fa, fb):
        if f.isolated != g.isolated:
            return False
        for j in (0,) if f.isolated else jrange:
            if (f.index(j), f.sign, f.exponent(j)) != (g.index(j), g.sign, g.exponent(j)):
                return False
    return True


@dataclass
class BaileyPair:
    """A bilateral Bailey pair relative to ``a = q**a_exp``.

    ``bosonic`` (optional) holds ``(p, p', r, s, b, x, dual)``; when given,
    beta is available in closed form from the bosonic polynomial.
    """

    a_exp: Fraction
    alpha: List[QuadraticFamily]
    bosonic: Optional[Tuple[int, int, int, int, int, int, bool]] = None

    def alpha_at(self, n: int) -> QSeries:
        terms = []
        for f in self.alpha:
            j = f.param_for(n)
            if j is not None:
                terms.append(QSeries.monomial(f.exponent(j), f.sign))
        return series_sum(terms) if terms else QSeries.zero()

    def alpha_support(self, nmin: int, nmax: int):
        """Yield (n, sign, exponent) for alpha entries with nmin <= n <= nmax."""
        out = []
        for f in self.alpha:
            for j in f.params(nmin, nmax):
                out.append((f.index(j), f.sign, f.exponent(j)))
        out.sort()
        return out

    def beta_from_alpha(self, n: int, order) -> QSeries:
        return beta_from_alpha(self, n, order)

    def beta_bosonic(self, n: int, order) -> QSeries:
        """``B(2n+b-s+2x)/(aq)_{2n}``; for the dual pair ``a^n q^{n^2} B(q^-1)/(aq)_{2n}``."""
        if self.bosonic is None:
            raise BaileyError("pair has no bosonic closed form")
        p, pp, r, s, b, x, dual = self.bosonic
        L = 2 * n + b - s + 2 * x
        if L < 0:
            return QSeries.zero()
        B = bose_poly(p, pp, r, s, b, L)
        if dual:
            B = B.invert_q().shift(self.a_exp * n + n * n)
        return (B * reciprocal_pochhammer(SignedMonomial(1, self.a_exp + 1), 2 * n, order)).truncate(order)


def mpp_pair(p: int, p_prime: int, r: int, s: int, b: int, x: int = 0, dual: bool = False) -> BaileyPair:
    alpha = alpha_mpp_dual(p, p_prime, r, s, b, x) if dual else alpha_mpp(p, p_prime, r, s, b, x)
    return BaileyPair(Fraction(b - s + 2 * x), alpha, (p, p_prime, r, s, b, x, dual))


def unit_pair(a_exp=0) -> BaileyPair:
    return BaileyPair(Fraction(a_exp), unit_alpha())


def beta_from_alpha(pair: BaileyPair, n: int, order) -> QSeries:
    """``beta_n = sum_{j <= n} alpha_j / ((q)_{n-j} (aq)_{n+j})``.

    Reciprocals of Pochhammer symbols at their poles are zero, so with
    ``a = q^c`` (c a nonnegative integer) only ``j >= -n - c`` contribute.
    """
    c = pair.a_exp
    if c.denominator != 1 or c < 0:
        raise BaileyError(f"a = q^{c}: the bilateral sum is only finite for integer c >= 0")
    c = int(c)
    q1 = SignedMonomial(1, 1)
    aq = SignedMonomial(1, c + 1)
    terms = []
    for j, sign, e in pair.alpha_support(-n - c, n):
        w = reciprocal_pochhammer(q1, n - j, order) * reciprocal_pochhammer(aq, n + j, order)
        terms.append((w.shift(e) * sign).truncate(order))
    if not terms:
        return QSeries.zero(order)
    return series_sum(terms, order)


# -- the lemma under the specialisations used for the character flows ----------


SPECIALIZATIONS = ("inf_inf", "n1", "n1_ns", "n1_r", "n2_ns", "n2_r")


def lemma_sides(pair: BaileyPair, specialization: str, order):
    """Both sides of the bilateral Bailey lemma under a named specialisation.

    * ``inf_inf``: rho1, rho2 -> oo.
    * ``n1`` (or ``n1_ns`` / ``n1_r``, which also check the parity of c):
      rho1 -> oo, rho2 = -q^{(c+1)/2} with a = q^c.
    * ``n2_ns``: rho1 = -z q^{1/2}, rho2 = -z^-1 q^{1/2}, aq/(rho1 rho2) = 1.
    * ``n2_r``: rho1 = -z, rho2 = -z^-1 q, aq/(rho1 rho2) = 1.

    The n2 forms need an M(p,p') pair with r = 0, b = s = 1, x = 0.
    Returns ``(lhs, rhs)``; QSeries for the first two, ZQSeries otherwise.
    """
    order = Fraction(order)
    if specialization == "inf_inf":
        return _inf_inf(pair, order)
    if specialization in ("n1", "n1_ns", "n1_r"):
        c = pair.a_exp
        if specialization != "n1" and (c % 2 == 0) != (specialization == "n1_ns"):
            raise UnsupportedSpecialization(f"{specialization} needs b-s+2x of the matching parity, got {c}")
        return _rho1_infinite(pair, order)
    if specialization in ("n2_ns", "n2_r"):
        return _n2(pair, specialization, order)
    raise UnsupportedSpecialization(f"unknown specialization {specialization!r}")


def _beta(pair: BaileyPair, n: int, order) -> QSeries:
    if pair.bosonic is not None:
        return pair.beta_bosonic(n, order)
    return beta_from_alpha(pair, n, order)


def _beta_bound(pair: BaileyPair) -> Fraction:
    """Lower bound on ord(beta_n) valid for every n >= 0 (non-dual pairs)."""
    if pair.bosonic is None:
        return Fraction(0)
    p, pp, r, s, b, x, dual = pair.bosonic
    if dual:
        raise UnsupportedSpecialization("no uniform order bound for dual beta; use a flow with growth")
    return bose_lower_bound(p, pp, r, s)


def _alpha_window(pair: BaileyPair, weight: Callable[[int], Fraction], order):
    """alpha entries whose weighted exponent is at most ``order``.

    Per family, ``weight(n(j)) + exponent(j)`` is a convex quadratic in j, so
    the admissible j form an interval around its vertex.
    """
    out = []
    for f in pair.alpha:
        def g(j, f=f):
            return weight(f.index(j)) + f.exponent(j)

        if f.isolated:
            if g(0) <= order:
                out.append((f.index(0), f.sign, f.exponent(0)))
            continue

        curv = (g(1) + g(-1) - 2 * g(0)) / 2
        if curv <= 0:
            raise UnsupportedSpecialization("alpha-side sum does not converge for this specialization")
        slope = (g(1) - g(-1)) / 2
        centre = math.floor(-slope / (2 * curv))
        for start, step in ((centre, 1), (centre - 1, -1)):
            j = start
            while g(j) <= order or (j - centre) * step < 2:
                if g(j) <= order:
                    out.append((f.index(j), f.sign, f.exponent(j)))
                j += step
    return out


def _inf_inf(pair: BaileyPair, order):
    c = pair.a_exp
    lb = _beta_bound(pair)
    lhs_terms = []
    n = 0
    while True:
        lead = n * n + c * n
        if lead + lb > order and 2 * n + 1 + c > 0:
            break
        beta = _beta(pair, n, order - lead)
        lhs_terms.append(beta.shift(lead).truncate(order))
        n += 1
    lhs = series_sum(lhs_terms, order)
    pref = reciprocal_pochhammer_infinite(SignedMonomial(1, c + 1), order)
    rhs_terms = [
        QSeries.monomial(c * n + n * n + e, sign)
        for n, sign, e in _alpha_window(pair, lambda n: c * n + n * n, order)
    ]
    rhs = (series_sum(rhs_terms).truncate(order) * pref).truncate(order)
    return lhs, rhs


def _rho1_infinite(pair: BaileyPair, order):
    c = pair.a_exp
    rho2 = SignedMonomial(-1, (c + 1) / 2)
    # aq/rho2 == rho2, so (rho2)_n / (aq/rho2)_n == 1 for every n
    dual = pair.bosonic is not None and pair.bosonic[6]
    lhs_terms = []
    n = 0
    if dual:
        p, pp, r, s, b, x, _ = pair.bosonic

        def low(n):
            # ord of q^{n(n+c)/2} a^n q^{n^2} B(q^{-1}) >= ... - deg B
            return Fraction(n * (n + c), 2) + c * n + n * n - bose_degree_bound(p, pp, r, s, b, n)
    else:
        lb = _beta_bound(pair)

        def low(n):
            return Fraction(n * (n + c), 2) + lb
    while True:
        lo = low(n)
        if lo > order and low(n + 1) >= lo:
            break
        lead = Fraction(n * (n + c), 2)
        w = pochhammer(rho2, n)
        beta = _beta(pair, n, order - lead + _abs_ord_slack(pair, n))
        lhs_terms.append((beta * w).shift(lead).truncate(order))
        n += 1
    lhs = series_sum(lhs_terms, order)
    pref = (pochhammer_infinite(rho2, order) * reciprocal_pochhammer_infinite(SignedMonomial(1, c + 1), order)).truncate(order)
    rhs_terms = [
        QSeries.monomial(Fraction(n * (n + c), 2) + e, sign)
        for n, sign, e in _alpha_window(pair, lambda n: Fraction(n * (n + c), 2), order)
    ]
    rhs = (series_sum(rhs_terms).truncate(order) * pref).truncate(order)
    return lhs, rhs


def _abs_ord_slack(pair: BaileyPair, n: int) -> Fraction:
    """Extra precision so that negative exponents in beta do not cut the product short."""
    if pair.bosonic is None:
        return Fraction(0)
    p, pp, r, s, b, x, dual = pair.bosonic
    if not dual:
        return -min(bose_lower_bound(p, pp, r, s), 0)
    L = 2 * n + b - s + 2 * x
    if L < 0:
        return Fraction(0)
    B = bose_poly(p, pp, r, s, b, L)
    # beta_n = q^{c n + n^2} B(1/q) / (aq)_{2n}: its lowest exponent may be negative
    lo = pair.a_exp * n + n * n - (B.degree() if not B.is_zero() else 0)
    return max(Fraction(0), -lo)


def _n2(pair: BaileyPair, specialization: str, order):
    if pair.bosonic is None:
        raise UnsupportedSpecialization("n2 specialisations need an M(p,p') pair")
    p, pp, r, s, b, x, dual = pair.bosonic
    if dual or (r, s, b, x) != (0, 1, 1, 0):
        raise UnsupportedSpecialization("n2 specialisations are defined for r=0, b=s=1, x=0, non-dual")
    half = Fraction(1, 2)
    if specialization == "n2_ns":
        rho1 = (1, half)  # -z q^{1/2}
        rho2 = (-1, half)  # -z^{-1} q^{1/2}
    else:
        rho1 = (1, Fraction(0))  # -z
        rho2 = (-1, Fraction(1))  # -z^{-1} q
    # LHS: sum_n (rho1)_n (rho2)_n beta_n; ord beta_n >= n for this pair
    lhs = ZQSeries.zero(order)
    poch = ZQSeries.one()
    n = 0
    while n <= order:
        beta = _beta(pair, n, order)
        lhs = lhs + (poch.truncate(order) * beta).truncate(order)
        poch = poch.mul_linear(1, rho1[0], rho1[1] + n).mul_linear(1, rho2[0], rho2[1] + n).truncate(order)
        n += 1
    rhs = _n2_rhs(p, pp, rho1, rho2, order)
    return lhs, rhs


def _n2_rhs(p: int, pp: int, rho1, rho2, order) -> ZQSeries:
    """Right side in the form with ``aq/(rho1 rho2) -> 1`` taken, before j -> -j.

    (rho1)_oo (rho2)_oo / ((rho1 rho2)_oo (q)_oo)
      * sum_j q^{jp(jp'-1)} (rho1 rho2 q^{2(jp'-1)} - 1) / ((1 - rho1 q^{jp'-1})(1 - rho2 q^{jp'-1}))
    with rho1 rho2 = q (x = 0, s = 1).
    """
    (z1, e1), (z2, e2) = rho1, rho2
    # prefactor; a q^0 factor (1 + z^k) in (rho)_oo is kept aside to cancel a denominator
    held = None
    pref = ZQSeries.one()
    for zk, e in ((z1, e1), (z2, e2)):
        k = 0
        while e + k <= order:
            if e + k == 0:
                held = zk
            else:
                pref = pref.mul_linear(1, zk, e + k)
            k += 1
    pref = pref.truncate(order)
    qinv = (reciprocal_pochhammer_infinite(SignedMonomial(1, 1), order) ** 2).truncate(order)
    pref = pref * qinv
    total = ZQSeries.zero(order)
    j = 0
    misses = 0
    direction = 1
    while True:
        base = p * j * (pp * j - 1)
        num = QSeries.from_exponents({2 * pp * j - 1: 1, 0: -1})
        factors = [(z1, e1 + pp * j - 1), (z2, e2 + pp * j - 1)]
        term = ZQSeries.from_qseries(num.shift(base))
        held_used = held is None
        ok = True
        for zk, e in factors:
            if e == 0:
                if held is None or held_used:
                    ok = False
                    break
                # (1 + z^held) / (1 + z^zk)
                held_used = True
                if zk != held:
                    term = term.shift_zpow(held)
                continue
            term = (term.truncate(order + 4 * abs(e) + 4) * inverse_linear(zk, e, order + 4 * abs(e) + 4))
        if not ok:
            raise UnsupportedSpecialization("uncancelled pole 1/(1+z^k)")
        if not held_used:
            term = term.mul_linear(1, held, 0)
        term = term.truncate(order)
        if term.is_zero() or term.lower_bound() > order:
            misses += 1
        else:
            misses = 0
            total = total + term
        if misses >= 2 and base > order:
            if direction == 1:
                direction, j, misses = -1, -1, 0
                continue
            break
        j += direction
    return (total * pref).truncate(order)


# -- calibration ------------------------------------------------------------


@dataclass
class CalibrationReport:
    shift: Fraction
    match: bool
    horizon: object
    first_mismatch: Optional[tuple] = None
    terms_compared: int = 0


def calibrate(lhs: QSeries, rhs: QSeries) -> CalibrationReport:
    """Find the monomial shift ``ord(rhs) - ord(lhs)`` and test ``q^shift lhs == rhs``."""
    if lhs.is_zero() or rhs.is_zero():
        raise ZeroSeries("calibrate needs two nonzero series")
    shift = rhs.ord() - lhs.ord()
    moved = lhs.shift(shift)
    horizon = min(moved.valid_through, rhs.valid_through)
    mm = first_mismatch(moved, rhs)
    compared = sum(1 for e, _ in rhs.items() if horizon == INF or e <= horizon)
    return CalibrationReport(shift, mm is None, horizon, mm, compared)
