"""Fermionic lattice sums, their enlarged forms, and a search for missing data.

A :class:`FermionicSystem` is the data of a sum

    scale * sum_p q^{ground + p.M.p/4 + a_sign * A.p/2 [- L p_1/2]} * prod binomials

over nonnegative integer vectors p subject to parity constraints.  Binomial
tops are ``(I p + u + v [+ L e_1]) / 2`` with ``I = 2 - M``; coordinates in
``distinguished`` contribute ``1/(q)_{p_i}`` instead, and ``auxiliary``
coordinates use ordinary binomials (zero once the top is negative).

The data ``A``, ``Q`` and the ground polynomial are not derived here; they come
from configuration or from :func:`discover`, which searches a finite box and
keeps only exact matches with the bosonic polynomial.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linprog

from .bivariate import ZQSeries
from .minimal_model import ModelData, bose_poly, uv_vectors
from .qseries import (
    QSeries,
    SignedMonomial,
    first_mismatch,
    pochhammer,
    qbinomial,
    qbinomial_ext,
    reciprocal_pochhammer,
    series_sum,
)


class FermionicError(ValueError):
    pass


class InfeasibleParity(FermionicError):
    pass


class UnknownTarget(FermionicError):
    pass


class IndefiniteForm(FermionicError):
    pass


class BadParity(FermionicError):
    pass


Parity = Union[int, None, str]  # 0, 1, None (free) or "L" (same parity as L)

TARGETS = ("n1ns", "n1r", "n1ns_dual", "n1r_dual", "n2ns", "n2r", "n2ns_dual")


def _fr_matrix(rows) -> Tuple[Tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


@dataclass(frozen=True)
class FermionicSystem:
    matrix: Tuple[Tuple[Fraction, ...], ...]
    linear: Tuple[Fraction, ...]
    parity: Tuple[Parity, ...]
    u: Tuple[int, ...]
    v: Tuple[int, ...]
    ground: Tuple[Fraction, Fraction, Fraction] = (Fraction(0), Fraction(0), Fraction(0))
    distinguished: frozenset = frozenset()
    auxiliary: frozenset = frozenset()
    a_sign: int = -1
    scale: Fraction = Fraction(1)
    zero_slice: bool = False  # R-sector N=2: the p_dist = 0 slice has weight 1
    target: str = "base"

    def __post_init__(self):
        d = self.dim
        if any(len(row) != d for row in self.matrix):
            raise FermionicError("matrix must be square")
        for name in ("linear", "parity", "u", "v"):
            if len(getattr(self, name)) != d:
                raise FermionicError(f"{name} has length {len(getattr(self, name))}, expected {d}")
        for p in self.parity:
            if p not in (0, 1, None, "L"):
                raise FermionicError(f"parity entries are 0, 1, 'free' or 'L', got {p!r}")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def is_extended(self) -> bool:
        return self.target != "base"

    @property
    def incidence(self) -> Tuple[Tuple[Fraction, ...], ...]:
        d = self.dim
        return tuple(
            tuple((2 if i == j else 0) - self.matrix[i][j] for j in range(d)) for i in range(d)
        )

    def ground_at(self, x) -> Fraction:
        c0, c1, c2 = self.ground
        return c0 + c1 * x + c2 * x * x

    def to_json(self) -> dict:
        return system_to_json(self)


def base_system(
    model: ModelData,
    b: int,
    s: int,
    linear: Sequence = None,
    parity: Sequence[Parity] = None,
    ground=(0, 0, 0),
) -> FermionicSystem:
    """The finite-L system of M(p,p') for labels (b, s) with the given completion data."""
    d = model.dim
    if d == 0:
        # nothing to house u and v in
        u = v = ()
    else:
        uu, vv, *_ = uv_vectors(model, b, s)
        u, v = tuple(int(x) for x in uu), tuple(int(x) for x in vv)
    B = _fr_matrix(model.cartan.tolist()) if d else ()
    return FermionicSystem(
        matrix=B,
        linear=tuple(Fraction(x) for x in (linear if linear is not None else [0] * d)),
        parity=tuple(parity if parity is not None else [None] * d),
        u=u,
        v=v,
        ground=tuple(Fraction(x) for x in ground),
    )


# -- exact helpers ---------------------------------------------------------


def _quad(M, p) -> Fraction:
    return sum((M[i][j] * p[i] * p[j] for i in range(len(p)) for j in range(len(p)) if M[i][j]), Fraction(0))


def _dot(a, p) -> Fraction:
    return sum((x * y for x, y in zip(a, p)), Fraction(0))


def _parity_ok(parity, p, L) -> bool:
    for want, x in zip(parity, p):
        if want is None:
            continue
        if want == "L":
            if (x - L) % 2:
                return False
        elif x % 2 != want:
            return False
    return True


def _tops(sys: FermionicSystem, p, L: Optional[int]):
    """Twice the binomial tops, as integers: ``I p + u + v (+ L e_1)``."""
    I = sys.incidence
    out = []
    for j in range(sys.dim):
        t = sum(I[j][k] * p[k] for k in range(sys.dim) if I[j][k]) + sys.u[j] + sys.v[j]
        if L is not None and j == 0:
            t += L
        out.append(t)
    return out


def _binomial_product(sys: FermionicSystem, p, tops2, dual: bool = False) -> Optional[QSeries]:
    """Product of the binomial factors, or None if a top is not an integer.

    With ``dual`` the binomials are taken at ``q^-1``.
    """
    out = QSeries.one()
    for j in range(sys.dim):
        if j in sys.distinguished:
            continue
        t2 = tops2[j]
        if t2.denominator != 1 or int(t2) % 2:
            return None
        top = int(t2) // 2
        m = p[j]
        if j in sys.auxiliary:
            f = qbinomial(top, m)
        else:
            f = qbinomial_ext(top - m, m)
        if f.is_zero():
            return QSeries.zero()
        if dual:
            f = f.invert_q()
        out = out * f
    return out


# -- region bounds ---------------------------------------------------------


def _box_for_finite(B, I, w) -> Optional[List[int]]:
    """Per-coordinate upper bounds on m >= 0 with every extended binomial nonzero.

    A binomial ``[n_j + m_j, m_j]'`` is nonzero only if ``n_j >= 0`` (that is
    ``(B m)_j <= w_j``) or its top is negative (``(I m)_j <= -2 - w_j``).  Each
    sign pattern is a polyhedron; an LP bounds every coordinate on it.
    Returns None when no m satisfies any pattern.
    """
    d = len(B)
    if d == 0:
        return []
    Bf = np.array([[float(x) for x in row] for row in B])
    If = np.array([[float(x) for x in row] for row in I])
    wf = np.array([float(x) for x in w])
    bounds = [-1] * d
    for pattern in itertools.product((0, 1), repeat=d):
        A_ub = np.array([Bf[j] if pattern[j] == 0 else If[j] for j in range(d)])
        b_ub = np.array([wf[j] if pattern[j] == 0 else -2 - wf[j] for j in range(d)])
        feas = linprog(np.zeros(d), A_ub=A_ub, b_ub=b_ub, bounds=[(0, None)] * d, method="highs")
        if feas.status == 2:
            continue
        for k in range(d):
            c = np.zeros(d)
            c[k] = -1.0
            res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(0, None)] * d, method="highs")
            if res.status == 3:
                raise IndefiniteForm(
                    f"coordinate {k + 1} is unbounded on the support of the binomials; the sum is not finite"
                )
            if res.status == 0:
                bounds[k] = max(bounds[k], math.floor(-res.fun + 1e-7) + 1)
    if all(x < 0 for x in bounds):
        return None
    return [max(x, 0) for x in bounds]


def _negative_tops_possible(sys: FermionicSystem, base_idx: List[int]) -> bool:
    """Can some base binomial top be negative for p >= 0 (LP relaxation)?"""
    d = sys.dim
    I = np.array([[float(x) for x in row] for row in sys.incidence])
    for j in base_idx:
        w = sys.u[j] + sys.v[j]
        res = linprog(I[j], bounds=[(0, None)] * d, method="highs")
        if res.status == 3 or (res.status == 0 and res.fun <= -2 - w + 1e-9):
            return True
    return False


# -- finite-L evaluation ----------------------------------------------------


def _finite_terms(sys: FermionicSystem, L: int):
    if sys.is_extended:
        raise FermionicError("fermi_eval needs a finite-L (base) system")
    d = sys.dim
    w = [sys.u[j] + sys.v[j] + (L if j == 0 else 0) for j in range(d)]
    box = _box_for_finite(sys.matrix, sys.incidence, w)
    if box is None:
        return
    for p in itertools.product(*(range(b + 1) for b in box)):
        if not _parity_ok(sys.parity, p, L):
            continue
        yield p, _tops(sys, p, L)


def _eval(sys: FermionicSystem, L: int):
    terms = []
    feasible = sys.dim == 0
    for p, tops2 in _finite_terms(sys, L):
        f = _binomial_product(sys, p, tops2)
        if f is None:
            continue
        feasible = True
        if f.is_zero():
            continue
        e = _quad(sys.matrix, p) / 4 + sys.a_sign * _dot(sys.linear, p) / 2
        terms.append(f.shift(e + sys.ground_at(L)))
    return (series_sum(terms) if terms else QSeries.zero()), feasible


def fermi_eval(sys: FermionicSystem, L: int, strict: bool = False) -> QSeries:
    """``q^{k(L)} sum_m q^{m.B.m/4 + a_sign A.m/2} prod [n_j + m_j, m_j]'``, exactly.

    If no parity-admissible m gives integral tops the sum is empty: 0 is
    returned, or InfeasibleParity raised when ``strict``.
    """
    out, feasible = _eval(sys, L)
    if strict and not feasible:
        raise InfeasibleParity(f"no admissible lattice point at L={L}")
    return out


def is_feasible(sys: FermionicSystem, L: int) -> bool:
    return _eval(sys, L)[1]


def fermi_eval_dual(sys: FermionicSystem, L: int) -> QSeries:
    """The dual form: exponent ``m.B.m/4 - L m_1/2 - a_sign A.m/2 - m.(u+v)/2`` and ground ``-k(L)``."""
    terms = []
    for p, tops2 in _finite_terms(sys, L):
        f = _binomial_product(sys, p, tops2)
        if f is None or f.is_zero():
            continue
        e = (
            _quad(sys.matrix, p) / 4
            - Fraction(L * (p[0] if p else 0), 2)
            - sys.a_sign * _dot(sys.linear, p) / 2
            - _dot([uu + vv for uu, vv in zip(sys.u, sys.v)], p) / 2
        )
        terms.append(f.shift(e - sys.ground_at(L)))
    return series_sum(terms) if terms else QSeries.zero()


# -- enlarged systems ---------------------------------------------------------


def _block(top_left, B, coupling_row, coupling_col):
    """Assemble ``[[top_left, C], [R, B]]`` where only the last top-left index couples to B."""
    h = len(top_left)
    d = len(B)
    M = [[Fraction(0)] * (h + d) for _ in range(h + d)]
    for i in range(h):
        for j in range(h):
            M[i][j] = Fraction(top_left[i][j])
    if d:
        M[h - 1][h] = Fraction(coupling_row)
        M[h][h - 1] = Fraction(coupling_col)
    for i in range(d):
        for j in range(d):
            M[h + i][h + j] = Fraction(B[i][j])
    return _fr_matrix(M)


def extend_system(sys: FermionicSystem, target: str) -> FermionicSystem:
    """The enlarged system for a superconformal flow target.

    The matrices are assembled exactly as printed, including the unequal
    couplings ``+1`` above and ``-1`` below the diagonal between m0 and m1 in
    the non-dual cases; only their symmetric part enters the exponent, while
    ``I = 2 - M`` supplies ``m0/2`` to the first binomial top.
    """
    if target not in TARGETS:
        raise UnknownTarget(f"unknown target {target!r}; expected one of {', '.join(TARGETS)}")
    if sys.is_extended:
        raise FermionicError("extend_system needs a base system")
    B, A, Q, u, v = sys.matrix, list(sys.linear), list(sys.parity), list(sys.u), list(sys.v)
    dual = target.endswith("_dual")
    n2 = target.startswith("n2")
    ramond = target in ("n1r", "n1r_dual", "n2r")
    c0, c1, c2 = sys.ground
    ground = (-c0, -c1, -c2) if dual else (c0, c1, c2)
    m0_parity = 1 if ramond and not n2 else 0
    Qb = [m0_parity if q == "L" else q for q in Q]

    if n2:
        tl = [[2, 0, -1], [0, 2, -1], [-1, -1, 2 if dual else 1]]
        M = _block(tl, B, -1 if dual else 1, -1)
        if dual:
            lin = [0, 0, 0] + [a - x - y for a, x, y in zip(A, u, v)]
        elif ramond:
            # expanding (-q)_{n-1}(-q)_n gives +(k1 - k2)/2 in the exponent
            lin = [-1, 1, 0] + A
        else:
            lin = [0, 0, 0] + A
        hu = [-1, 0, 0] if ramond else [0, 0, 0]
        return FermionicSystem(
            matrix=M,
            linear=tuple(Fraction(x) for x in lin),
            parity=tuple([None, None, 0] + Qb),
            u=tuple(hu + u),
            v=tuple(hu + v),
            ground=ground,
            distinguished=frozenset({2}),
            auxiliary=frozenset({0, 1}),
            a_sign=1 if dual else -1,
            scale=Fraction(2) if ramond else Fraction(1),
            zero_slice=ramond,
            target=target,
        )

    tl = [[2, -1], [-1, 2 if dual else 1]]
    M = _block(tl, B, -1 if dual else 1, -1)
    lin = [0, 0] + ([a - x - y for a, x, y in zip(A, u, v)] if dual else A)
    return FermionicSystem(
        matrix=M,
        linear=tuple(Fraction(x) for x in lin),
        parity=tuple([None, m0_parity] + Qb),
        u=tuple(([1, 0] if ramond else [0, 0]) + u),
        v=tuple([0, 0] + v),
        ground=ground,
        distinguished=frozenset({1}),
        auxiliary=frozenset({0}),
        a_sign=1 if dual else -1,
        scale=Fraction(1, 2) if ramond else Fraction(1),
        target=target,
    )


# -- L -> infinity sums ------------------------------------------------------


def _slice_lower_bound(sys: FermionicSystem, dist: int, base_idx, aux_idx):
    """A quadratic ``(a, b, c)`` with ``a x^2 + b x + c`` below every exponent in slice ``p_dist = x``.

    Auxiliary and base coordinates are relaxed to the reals and minimised out;
    this needs the base block to be positive definite.
    """
    M = sys.matrix
    S = [[(M[i][j] + M[j][i]) / 2 for j in range(sys.dim)] for i in range(sys.dim)]
    lin = [sys.a_sign * a / 2 for a in sys.linear]
    # exponent = 1/4 p.S.p + lin.p + ground(x); write the free part r = (aux, base)
    free = list(aux_idx) + list(base_idx)
    a = S[dist][dist] / 4 + sys.ground[2]
    b = lin[dist] + sys.ground[1]
    c = sys.ground[0]
    if not free:
        return a, b, c
    S_rr = np.array([[float(S[i][j]) / 4 for j in free] for i in free])
    try:
        np.linalg.cholesky(S_rr)
    except np.linalg.LinAlgError:
        raise IndefiniteForm("the form is not positive definite on the non-distinguished coordinates")
    inv = np.linalg.inv(S_rr)
    # gradient terms: (S[r][dist]/2) x + lin_r
    g1 = np.array([float(S[i][dist]) / 2 for i in free])
    g0 = np.array([float(lin[i]) for i in free])
    # min over r of r.S_rr.r + (g1 x + g0).r = -(g1 x + g0).inv.(g1 x + g0)/4
    a_f = float(a) - g1 @ inv @ g1 / 4
    b_f = float(b) - 2 * (g1 @ inv @ g0) / 4
    c_f = float(c) - g0 @ inv @ g0 / 4
    return a_f, b_f, c_f


def fermi_char(ext: FermionicSystem, order, budget: int = 2_000_000) -> QSeries:
    """The lattice sum of an enlarged system, exact through ``order``.

    The distinguished coordinate is the outer loop; each slice is finite, and a
    quadratic lower bound on the slice exponents certifies where to stop.
    """
    order = Fraction(order)
    if len(ext.distinguished) != 1:
        raise FermionicError("fermi_char needs exactly one distinguished coordinate")
    (dist,) = tuple(ext.distinguished)
    aux_idx = sorted(ext.auxiliary)
    base_idx = [j for j in range(ext.dim) if j != dist and j not in ext.auxiliary]
    I = ext.incidence
    for j in aux_idx:
        if any(I[j][k] for k in range(ext.dim) if k != dist and k != j) or ext.matrix[j][j] != 2:
            raise FermionicError("auxiliary rows may couple only to the distinguished coordinate")
    if _negative_tops_possible(ext, base_idx):
        raise IndefiniteForm("a base binomial top can turn negative; termination cannot be certified")
    a, b, c = _slice_lower_bound(ext, dist, base_idx, aux_idx)
    if a < -1e-12 or (abs(a) <= 1e-12 and b <= 1e-12):
        raise IndefiniteForm("the slice exponents do not grow with the distinguished coordinate")

    def slice_low(x):
        return a * x * x + b * x + c - 1e-9

    terms = []
    visited = 0
    x = 0
    while True:
        if slice_low(x) > float(order) and (2 * a * x + b) > 0:
            break
        if ext.parity[dist] is None or ext.parity[dist] == "L" or x % 2 == ext.parity[dist]:
            for p, f, e in _slice_points(ext, dist, x, aux_idx, base_idx, order):
                visited += 1
                if visited > budget:
                    raise IndefiniteForm(f"iteration budget {budget} exhausted")
                rec = reciprocal_pochhammer(SignedMonomial(1, 1), x, order - e)
                terms.append((f.shift(e) * rec).truncate(order))
        x += 1
    total = series_sum(terms, order) if terms else QSeries.zero(order)
    if ext.scale != 1:
        total = _scale(total, ext.scale)
    if ext.zero_slice:
        total = total + _zero_slice(ext, dist, aux_idx, base_idx, order)
    return total.truncate(order)


def _scale(f: QSeries, s: Fraction) -> QSeries:
    out = {}
    for e, cf in f.items():
        v = cf * s
        if v.denominator != 1:
            raise FermionicError(f"scaling by {s} leaves a non-integer coefficient at q^{e}")
        out[e] = int(v)
    return QSeries.from_exponents(out, f.valid_through)


def _exponent(ext: FermionicSystem, p, dist) -> Fraction:
    return (
        _quad(ext.matrix, p) / 4
        + ext.a_sign * _dot(ext.linear, p) / 2
        + ext.ground_at(p[dist])
    )


def _slice_points(ext, dist, x, aux_idx, base_idx, order):
    """Lattice points with ``p_dist = x``, their binomial products and exponents."""
    d = ext.dim
    I = ext.incidence
    # base coordinates: bounds from the finite-L analysis with the m0 coupling folded into w
    sub_B = [[ext.matrix[i][j] for j in base_idx] for i in base_idx]
    sub_I = [[I[i][j] for j in base_idx] for i in base_idx]
    w = [ext.u[i] + ext.v[i] + I[i][dist] * x for i in base_idx]
    box = _box_for_finite(sub_B, sub_I, w) if base_idx else []
    if box is None:
        return
    aux_tops = []
    for j in aux_idx:
        t2 = I[j][dist] * x + ext.u[j] + ext.v[j]
        if t2.denominator != 1 or int(t2) % 2 or t2 < 0:
            return
        aux_tops.append(int(t2) // 2)
    for base in itertools.product(*(range(bb + 1) for bb in box)):
        for aux in itertools.product(*(range(t + 1) for t in aux_tops)):
            p = [0] * d
            p[dist] = x
            for j, val in zip(aux_idx, aux):
                p[j] = val
            for j, val in zip(base_idx, base):
                p[j] = val
            if not _parity_ok(ext.parity, p, x):
                continue
            e = _exponent(ext, p, dist)
            if e > order:
                continue
            f = _binomial_product(ext, p, _tops(ext, p, None))
            if f is None or f.is_zero():
                continue
            yield tuple(p), f, e


def _zero_slice(ext, dist, aux_idx, base_idx, order) -> QSeries:
    """The p_dist = 0 slice with weight 1: auxiliary coordinates at 0, their binomials set to 1."""
    I = ext.incidence
    sub_B = [[ext.matrix[i][j] for j in base_idx] for i in base_idx]
    sub_I = [[I[i][j] for j in base_idx] for i in base_idx]
    w = [ext.u[i] + ext.v[i] for i in base_idx]
    box = _box_for_finite(sub_B, sub_I, w) if base_idx else []
    if box is None:
        return QSeries.zero(order)
    terms = []
    for base in itertools.product(*(range(bb + 1) for bb in box)):
        p = [0] * ext.dim
        for j, val in zip(base_idx, base):
            p[j] = val
        if not _parity_ok(ext.parity, p, 0):
            continue
        e = _exponent(ext, p, dist)
        if e > order:
            continue
        tops2 = _tops(ext, p, None)
        f = QSeries.one()
        ok = True
        for j in base_idx:
            t2 = tops2[j]
            if t2.denominator != 1 or int(t2) % 2:
                ok = False
                break
            f = f * qbinomial_ext(int(t2) // 2 - p[j], p[j])
        if ok and not f.is_zero():
            terms.append(f.shift(e).truncate(order))
    return series_sum(terms, order) if terms else QSeries.zero(order)


# -- expansion lemmas ---------------------------------------------------------


@dataclass
class LemmaReport:
    kind: str
    size: int
    equal: bool
    lhs: object
    rhs: object
    mismatch: Optional[tuple] = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "size": self.size,
            "equal": self.equal,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "mismatch": None if self.mismatch is None else [str(x) for x in self.mismatch],
        }


def expansion_lemma(kind: str, size: int) -> LemmaReport:
    """Expand both sides of a finite Pochhammer expansion and compare.

    * ``neg_q_half`` (size m0 even): ``(-q^{1/2})_{m0/2} = sum_k q^{(m0/2-k)^2/2} [m0/2, k]``
    * ``neg_q`` (size m0 odd): ``(-q)_{(m0-1)/2} = 1/2 sum_k q^{((m0+1)/2-k)((m0-1)/2-k)/2} [(m0+1)/2, k]``
    * ``x_n`` (size n >= 0): ``(x)_n = sum_k (-x)^{n-k} q^{(n-k)(n-k-1)/2} [n, k]``, x formal
    """
    if kind == "neg_q_half":
        if size < 0 or size % 2:
            raise BadParity(f"neg_q_half needs an even m0 >= 0, got {size}")
        h = size // 2
        lhs = pochhammer(SignedMonomial(-1, Fraction(1, 2)), h)
        rhs = series_sum([qbinomial(h, k).shift(Fraction((h - k) ** 2, 2)) for k in range(h + 1)])
    elif kind == "neg_q":
        if size < 0 or size % 2 == 0:
            raise BadParity(f"neg_q needs an odd m0 >= 1, got {size}")
        h = (size + 1) // 2
        lhs = pochhammer(SignedMonomial(-1, 1), h - 1)
        twice = series_sum([qbinomial(h, k).shift(Fraction((h - k) * (h - 1 - k), 2)) for k in range(h + 1)])
        rhs = _scale(twice, Fraction(1, 2))
    elif kind == "x_n":
        if size < 0:
            raise BadParity(f"x_n needs n >= 0, got {size}")
        n = size
        lhs = ZQSeries.one()
        for i in range(n):
            lhs = lhs.mul_linear(-1, 1, i)
        rhs = ZQSeries.zero()
        for k in range(n + 1):
            j = n - k
            rhs = rhs + ZQSeries.from_qseries(qbinomial(n, k).shift(Fraction(j * (j - 1), 2)) * ((-1) ** j), j)
        equal = lhs == rhs
        return LemmaReport(kind, size, equal, lhs, rhs, None if equal else ("z-coefficients differ",))
    else:
        raise FermionicError(f"unknown lemma {kind!r}; expected neg_q_half, neg_q or x_n")
    mm = first_mismatch(lhs, rhs)
    return LemmaReport(kind, size, mm is None, lhs, rhs, mm)


def inversion_check(n: int, m: int) -> bool:
    """``[n+m, m]'`` at ``q^-1`` equals ``q^{-nm} [n+m, m]'``."""
    f = qbinomial_ext(n, m)
    return f.invert_q() == f.shift(-n * m)


# -- discovery ------------------------------------------------------------------


@dataclass
class DiscoveryReport:
    searched: dict
    found: List[FermionicSystem] = field(default_factory=list)
    exhausted: bool = True
    checks: List[dict] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "searched": self.searched,
            "found": [system_to_json(s) for s in self.found],
            "exhausted": self.exhausted,
            "checks": self.checks,
            "notes": self.notes,
        }


def _fit_ground(points: List[Tuple[int, Fraction]]):
    """Exact polynomial of degree <= 2 through the points, or None.

    Fewer than three points give a lower-degree fit (constant for one, linear for two).
    """
    pts = sorted(points)
    if len(pts) == 1:
        return (pts[0][1], Fraction(0), Fraction(0))
    if len(pts) == 2:
        (x0, y0), (x1, y1) = pts
        c1 = (y1 - y0) / (x1 - x0)
        return (y0 - c1 * x0, c1, Fraction(0))
    (x0, y0), (x1, y1), (x2, y2) = pts[:3]
    d1 = (y1 - y0) / (x1 - x0)
    d2 = (y2 - y1) / (x2 - x1)
    c2 = (d2 - d1) / (x2 - x0)
    c1 = d1 - c2 * (x0 + x1)
    c0 = y0 - c1 * x0 - c2 * x0 * x0
    for x, y in pts[3:]:
        if c0 + c1 * x + c2 * x * x != y:
            return None
    return (c0, c1, c2)


def discover(model: ModelData, b: int, s: int, radius: int, Lmax: int, budget: int = 200_000) -> DiscoveryReport:
    """Search linear terms ``A`` (``2|A_i| <= radius``) and parities for an exact match.

    For every candidate, each admissible ``L <= Lmax`` (``L = b - s mod 2``)
    must give ``bose_poly(L) = q^{e_L} * (lattice sum)``; the shifts ``e_L``
    must then fit a polynomial of degree <= 2 with denominators dividing 8.
    """
    p, pp = model.p, model.p_prime
    from .minimal_model import find_label

    r = find_label(model, b).truncated
    find_label(model, s)
    d = model.dim
    Ls = [L for L in range(0, Lmax + 1) if (L - (b - s)) % 2 == 0]
    targets = {L: bose_poly(p, pp, r, s, b, L) for L in Ls}
    steps = [Fraction(k, 2) for k in range(-radius, radius + 1)]
    parities = (0, 1, None)
    report = DiscoveryReport(
        searched={
            "model": [p, pp],
            "b": b,
            "s": s,
            "r": r,
            "radius": radius,
            "Lmax": Lmax,
            "L_values": Ls,
            "linear_grid": [str(x) for x in steps],
            "parity_choices": ["0", "1", "free"],
            "dimension": d,
        }
    )
    report.notes.append("auxiliary k-coordinates of enlarged systems are parity-free")
    tested = 0
    for A in itertools.product(steps, repeat=d):
        for Q in itertools.product(parities, repeat=d):
            tested += 1
            if tested > budget:
                report.exhausted = False
                report.searched["candidates_tested"] = tested - 1
                return report
            sys = base_system(model, b, s, A, Q)
            shifts = []
            ok = True
            for L in Ls:
                S = fermi_eval(sys, L)
                T = targets[L]
                if S.is_zero() or T.is_zero():
                    if S.is_zero() and T.is_zero():
                        continue
                    ok = False
                    break
                e = T.ord() - S.ord()
                if S.shift(e) != T:
                    ok = False
                    break
                shifts.append((L, e))
            if not ok or not shifts:
                continue
            ground = _fit_ground(shifts)
            if ground is None or any(8 % c.denominator for c in ground):
                continue
            found = replace(sys, ground=ground)
            for L in Ls:
                report.checks.append(
                    {"candidate": len(report.found), "L": L, "match": fermi_eval(found, L) == targets[L]}
                )
            report.found.append(found)
    report.searched["candidates_tested"] = tested
    if Lmax == 0 or len(Ls) < 3:
        report.notes.append("fewer than three L values: the ground polynomial is underdetermined")
    return report


# -- configuration --------------------------------------------------------------


def system_to_json(sys: FermionicSystem) -> dict:
    return {
        "matrix": [[str(x) for x in row] for row in sys.matrix],
        "linear": [str(x) for x in sys.linear],
        "parity": ["free" if q is None else q for q in sys.parity],
        "u": list(sys.u),
        "v": list(sys.v),
        "ground": {"c0": str(sys.ground[0]), "c1": str(sys.ground[1]), "c2": str(sys.ground[2])},
        "distinguished": sorted(i + 1 for i in sys.distinguished),
        "auxiliary": sorted(i + 1 for i in sys.auxiliary),
        "a_sign": sys.a_sign,
        "scale": str(sys.scale),
        "zero_slice": sys.zero_slice,
        "target": sys.target,
    }


def system_from_json(data: dict) -> FermionicSystem:
    """Read a system from its JSON form; indices in ``distinguished`` are 1-based."""
    try:
        matrix = _fr_matrix(data["matrix"])
        d = len(matrix)
        parity = []
        for q in data.get("parity", ["free"] * d):
            if q == "free" or q is None:
                parity.append(None)
            elif q == "L":
                parity.append("L")
            else:
                parity.append(int(q))
        g = data.get("ground", {})
        return FermionicSystem(
            matrix=matrix,
            linear=tuple(Fraction(x) for x in data.get("linear", [0] * d)),
            parity=tuple(parity),
            u=tuple(int(x) for x in data.get("u", [0] * d)),
            v=tuple(int(x) for x in data.get("v", [0] * d)),
            ground=tuple(Fraction(g.get(k, 0)) for k in ("c0", "c1", "c2")),
            distinguished=frozenset(int(i) - 1 for i in data.get("distinguished", [])),
            auxiliary=frozenset(int(i) - 1 for i in data.get("auxiliary", [])),
            a_sign=int(data.get("a_sign", -1)),
            scale=Fraction(data.get("scale", 1)),
            zero_slice=bool(data.get("zero_slice", False)),
            target=data.get("target", "base"),
        )
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise FermionicError(f"bad system configuration: {exc}") from exc


def load_system(path: str) -> FermionicSystem:
    with open(path) as fh:
        return system_from_json(json.load(fh))
