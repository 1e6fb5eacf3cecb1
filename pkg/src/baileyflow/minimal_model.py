"""Structural data of the minimal model M(p, p') and its bosonic polynomials."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .qseries import QSeries, qbinomial, series_sum


class ModelError(ValueError):
    pass


class UnsupportedFraction(ModelError):
    pass


class NotTakahashi(ModelError):
    pass


class BoundaryLabelUnsupported(ModelError):
    pass


class ParityMismatch(UserWarning):
    pass


@dataclass(frozen=True)
class TakahashiLabel:
    index: int  # beta (or sigma): the label is l_{index+1}
    zone: int  # m with t_m < index <= t_{m+1} + delta_{m,n0}
    value: int  # l_{index+1}
    truncated: int  # lbar_{index+1}, i.e. r(b) when value == b


@dataclass(frozen=True)
class ModelData:
    p: int
    p_prime: int
    nu: Tuple[int, ...]
    t: Tuple[int, ...]  # t_1 .. t_{n0+1}
    incidence: np.ndarray
    y: Tuple[int, ...]  # y_0 .. y_{n0+1}
    ybar: Tuple[int, ...]

    @property
    def n0(self) -> int:
        return len(self.nu) - 1

    @property
    def dim(self) -> int:
        return self.t[-1]

    @property
    def cartan(self) -> np.ndarray:
        return 2 * np.eye(self.dim, dtype=int) - self.incidence

    def t_at(self, i: int) -> int:
        """t_i with the convention t_0 = 0."""
        return 0 if i == 0 else self.t[i - 1]

    def y_at(self, m: int) -> int:
        return 0 if m == -1 else self.y[m]

    def ybar_at(self, m: int) -> int:
        return -1 if m == -1 else self.ybar[m]

    def continued_fraction_value(self) -> Fraction:
        """Rebuild p'/(p'-p) from nu."""
        nu = self.nu
        if self.n0 == 0:
            return Fraction(nu[0] + 3)
        tail = Fraction(nu[-1] + 2)
        for k in range(self.n0 - 1, 0, -1):
            tail = nu[k] + 1 / tail
        return 1 + nu[0] + 1 / tail

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "p_prime": self.p_prime,
            "nu": list(self.nu),
            "n0": self.n0,
            "t": list(self.t),
            "dim": self.dim,
            "incidence": self.incidence.tolist(),
            "cartan": self.cartan.tolist(),
            "y": list(self.y),
            "ybar": list(self.ybar),
            "takahashi": [
                {"index": lab.index + 1, "length": lab.value, "truncated": lab.truncated, "zone": lab.zone}
                for lab in takahashi_list(self)
            ],
        }


def _regular_cf(x: Fraction) -> List[int]:
    out = []
    while True:
        a = math.floor(x)
        out.append(a)
        if x == a:
            return out
        x = 1 / (x - a)


def decompose(p: int, p_prime: int) -> ModelData:
    """Continued fraction, incidence matrix and y-sequences for M(p, p').

    Only 2 < p'/(p'-p), i.e. p < p' < 2p, has fermionic data.
    """
    if not (0 < p < p_prime):
        raise ModelError(f"need 0 < p < p', got ({p}, {p_prime})")
    if math.gcd(p, p_prime) != 1:
        raise ModelError(f"p={p} and p'={p_prime} are not coprime")
    x = Fraction(p_prime, p_prime - p)
    if x <= 2:
        raise UnsupportedFraction(
            f"p'/(p'-p) = {x} <= 2; only p < p' < 2p is in the fermionic regime"
        )
    cf = _regular_cf(x)
    if len(cf) == 1:
        nu = (cf[0] - 3,)
    else:
        nu = (cf[0] - 1, *cf[1:-1], cf[-1] - 2)
    n0 = len(nu) - 1
    t = tuple(sum(nu[:i]) for i in range(1, n0 + 2))
    dim = t[-1]

    inc = np.zeros((dim, dim), dtype=int)
    tset = {t[i - 1]: i for i in range(1, n0 + 1)}
    last_nu_zero = 1 if nu[n0] == 0 else 0
    for j in range(1, dim + 1):
        row = inc[j - 1]
        if j == dim:
            if j >= 2:
                row[j - 2] += 1
            row[j - 1] += last_nu_zero
        elif j in tset and tset[j] <= n0 - last_nu_zero:
            if j >= 2:
                row[j - 2] += 1
            row[j - 1] += 1
            row[j] -= 1
        else:
            if j >= 2:
                row[j - 2] += 1
            row[j] += 1

    y = [1]
    yb = [1]
    yprev, ybprev = 0, -1
    for m in range(n0 + 1):
        k = nu[m] + (1 if m == 0 else 0) + (2 if m == n0 else 0)
        y_next = yprev + k * y[-1]
        yb_next = ybprev + k * yb[-1]
        yprev, ybprev = y[-1], yb[-1]
        y.append(y_next)
        yb.append(yb_next)

    model = ModelData(p, p_prime, nu, t, inc, tuple(y), tuple(yb))
    assert model.continued_fraction_value() == x
    assert y[-1] == p_prime and yb[-1] == p
    return model


def takahashi_list(model: ModelData) -> List[TakahashiLabel]:
    out = []
    n0 = model.n0
    for m in range(n0 + 1):
        lo = model.t_at(m)
        hi = model.t_at(m + 1) + (1 if m == n0 else 0)
        for j in range(lo + 1, hi + 1):
            ell = model.y_at(m - 1) + (j - lo) * model.y_at(m)
            ellbar = model.ybar_at(m - 1) + (j - lo) * model.ybar_at(m)
            out.append(TakahashiLabel(j, m, ell, ellbar))
    return out


def find_label(model: ModelData, value: int) -> TakahashiLabel:
    for lab in takahashi_list(model):
        if lab.value == value:
            return lab
    raise NotTakahashi(f"{value} is not a Takahashi length of M({model.p},{model.p_prime})")


def r_of_b(model: ModelData, b: int) -> int:
    """The truncated partner r(b) of a Takahashi length b (boundary labels allowed)."""
    return find_label(model, b).truncated


def uv_vectors(model: ModelData, b: int, s: int):
    """The vectors u, v of the fermionic constraint, plus r(b), beta and sigma.

    Returns ``(u, v, r, beta, sigma)`` with u and v integer numpy vectors.
    """
    lb = find_label(model, b)
    ls = find_label(model, s)
    dim = model.dim
    for lab, name in ((lb, "b"), (ls, "s")):
        if lab.index > dim:
            raise BoundaryLabelUnsupported(
                f"{name}={lab.value} has index {lab.index} > dim {dim}; boundary labels are not housed"
            )

    def vec(lab: TakahashiLabel) -> np.ndarray:
        w = np.zeros(dim, dtype=int)
        w[lab.index - 1] += 1
        for k in range(lab.zone + 1, model.n0 + 1):
            w[model.t_at(k) - 1] -= 1
        return w

    return vec(lb), vec(ls), lb.truncated, lb.index, ls.index


def bose_window(p: int, p_prime: int, r: int, s: int, b: int, L: int):
    """Yield ``(exponent, bottom, sign)`` for each contributing bosonic term."""
    k1 = (L + s - b) // 2
    k2 = (L - s - b) // 2
    # first family bottom k1 - j p', second family bottom k2 + j p'
    jlo = min(-((L - k1) // p_prime) - 1, -(k2 // p_prime) - 1)
    jhi = max(k1 // p_prime + 1, (L - k2) // p_prime + 1)
    for j in range(jlo, jhi + 1):
        bot = k1 - j * p_prime
        if 0 <= bot <= L:
            yield j * (j * p * p_prime + r * p_prime - s * p), bot, 1
        bot = k2 + j * p_prime
        if 0 <= bot <= L:
            yield (j * p - r) * (j * p_prime - s), bot, -1


def bose_poly(p: int, p_prime: int, r: int, s: int, b: int, L: int) -> QSeries:
    """The bosonic polynomial B_{r,s}(L, b; q), an alternating sum of q-binomials."""
    if L < 0 or (L + s - b) % 2:
        warnings.warn(
            f"L={L} with b-s={b - s}: (L+s-b)/2 is not an integer; returning 0", ParityMismatch
        )
        return QSeries.zero()
    terms = [qbinomial(L, bot).shift(e) * sign for e, bot, sign in bose_window(p, p_prime, r, s, b, L)]
    return series_sum(terms)


def bose_lower_bound(p: int, p_prime: int, r: int, s: int) -> Fraction:
    """A lower bound, uniform in L and b, for the exponents of B_{r,s}(L, b).

    Each term is q^E times a binomial with nonnegative exponents, and both
    families' E are quadratics in j bounded below by their vertex values.
    """
    v1 = Fraction(-(r * p_prime - s * p) ** 2, 4 * p * p_prime)
    v2 = Fraction(-(r * p_prime - s * p) ** 2, 4 * p * p_prime)
    return min(v1, v2, Fraction(0))


def bose_degree_bound(p: int, p_prime: int, r: int, s: int, b: int, n: int) -> Fraction:
    """Upper bound on deg B_{r,s}(2n+b-s, b) as an explicit quadratic in n.

    The top exponent of ``q^E [L, k]`` is ``E + k(L-k)``; in j this is a
    concave quadratic (coefficient ``p p' - p'^2 < 0``), bounded by its vertex.
    """
    d = b - s
    pp = p_prime
    # first family: n^2 + n d + j^2 (p pp - pp^2) + j (r pp - s p - pp d)
    c1 = r * pp - s * p - pp * d
    # second family: k = n - s + j pp, L - k = n + b - j pp
    # (jp - r)(j pp - s) + (n - s + j pp)(n + b - j pp)
    #   = n^2 + n d - s b + r s + j^2 (p pp - pp^2) + j (-p s - r pp + pp (b + s))
    c2 = -p * s - r * pp + pp * (b + s)
    a = p * pp - pp * pp
    v1 = Fraction(-c1 * c1, 4 * a)
    v2 = Fraction(-c2 * c2, 4 * a) - s * b + r * s
    return n * n + n * d + max(v1, v2)
