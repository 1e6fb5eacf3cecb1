"""Exact truncated Laurent series in q with rational exponents.

A :class:`QSeries` stores integer coefficients on the exponent lattice
``(1/den) * Z`` together with a horizon ``valid_through``: every coefficient
of ``q**e`` with ``e <= valid_through`` is exact.  Finite Laurent polynomials
carry the horizon ``INF`` and are exact everywhere.

Division is only ever by series whose lowest coefficient is +1 or -1, so the
coefficients stay in Z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Tuple, Union

INF = math.inf

Rational = Union[int, Fraction]


class QSeriesError(ArithmeticError):
    pass


class LeadingCoefficientNotUnit(QSeriesError):
    pass


class PoleInNegativePochhammer(QSeriesError):
    pass


class NonconvergentProduct(QSeriesError):
    pass


class NegativeM(QSeriesError):
    pass


class NotAPolynomial(QSeriesError):
    pass


class TruncationError(QSeriesError):
    """A coefficient beyond ``valid_through`` was requested."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"exponent must be int, Fraction or str, got {type(x).__name__}")


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _min_valid(*vals):
    return min(vals)


@dataclass(frozen=True)
class SignedMonomial:
    """``sign * q**exponent``."""

    sign: int
    exponent: Fraction

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "exponent", _frac(self.exponent))

    def times_q(self, e: Rational) -> "SignedMonomial":
        return SignedMonomial(self.sign, self.exponent + _frac(e))

    def __mul__(self, other: "SignedMonomial") -> "SignedMonomial":
        return SignedMonomial(self.sign * other.sign, self.exponent + other.exponent)

    def inverse(self) -> "SignedMonomial":
        return SignedMonomial(self.sign, -self.exponent)

    def as_series(self) -> "QSeries":
        return QSeries.monomial(self.exponent, self.sign)


class QSeries:
    """Immutable truncated Laurent series ``sum c_e q**e``."""

    __slots__ = ("_den", "_terms", "_valid")

    def __init__(self, terms: Mapping[int, int] | None = None, den: int = 1, valid=INF):
        if den <= 0:
            raise ValueError("den must be positive")
        valid = valid if valid == INF else _frac(valid)
        clean: Dict[int, int] = {}
        if terms:
            for num, c in terms.items():
                if c and (valid == INF or Fraction(num, den) <= valid):
                    clean[num] = c
        self._den = den
        self._terms = clean
        self._valid = valid

    # -- construction -----------------------------------------------------

    @classmethod
    def from_exponents(cls, coeffs: Mapping[Rational, int], valid=INF) -> "QSeries":
        fr = {_frac(e): c for e, c in coeffs.items()}
        den = 1
        for e in fr:
            den = _lcm(den, e.denominator)
        terms: Dict[int, int] = {}
        for e, c in fr.items():
            n = e.numerator * (den // e.denominator)
            terms[n] = terms.get(n, 0) + c
        return cls(terms, den, valid)

    @classmethod
    def monomial(cls, exponent: Rational = 0, coeff: int = 1, valid=INF) -> "QSeries":
        e = _frac(exponent)
        return cls({e.numerator: coeff}, e.denominator, valid)

    @classmethod
    def one(cls) -> "QSeries":
        return cls({0: 1})

    @classmethod
    def zero(cls, valid=INF) -> "QSeries":
        return cls({}, 1, valid)

    # -- accessors --------------------------------------------------------

    @property
    def den(self) -> int:
        return self._den

    @property
    def valid_through(self):
        return self._valid

    @property
    def is_polynomial(self) -> bool:
        return self._valid == INF

    def is_zero(self) -> bool:
        return not self._terms

    def items(self) -> Iterator[Tuple[Fraction, int]]:
        """(exponent, coefficient) pairs in ascending exponent order."""
        d = self._den
        for n in sorted(self._terms):
            yield Fraction(n, d), self._terms[n]

    def as_dict(self) -> Dict[Fraction, int]:
        return dict(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def coeff(self, exponent: Rational) -> int:
        e = _frac(exponent)
        if self._valid != INF and e > self._valid:
            raise TruncationError(f"coefficient of q^{e} requested beyond horizon {self._valid}")
        if (e * self._den).denominator != 1:
            return 0
        return self._terms.get(int(e * self._den), 0)

    def ord(self):
        """Lowest exponent with a nonzero coefficient; ``INF`` for zero."""
        if not self._terms:
            return INF
        return Fraction(min(self._terms), self._den)

    def degree(self):
        if not self._terms:
            return -INF
        return Fraction(max(self._terms), self._den)

    def lower_bound(self):
        """A rigorous lower bound on the order of the underlying true series."""
        if self._terms:
            return self.ord()
        return self._valid

    # -- lattice handling --------------------------------------------------

    def refine(self, den: int) -> "QSeries":
        if den == self._den:
            return self
        if den % self._den:
            raise ValueError(f"{den} is not a multiple of {self._den}")
        k = den // self._den
        return QSeries({n * k: c for n, c in self._terms.items()}, den, self._valid)

    def normalize(self) -> "QSeries":
        """Return the same series on the coarsest lattice holding its exponents."""
        g = self._den
        for n in self._terms:
            g = math.gcd(g, n)
            if g == 1:
                return self
        if not self._terms:
            g = self._den
        return QSeries({n // g: c for n, c in self._terms.items()}, self._den // g, self._valid)

    def _common(self, other: "QSeries") -> Tuple["QSeries", "QSeries", int]:
        d = _lcm(self._den, other._den)
        return self.refine(d), other.refine(d), d

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "QSeries":
        return QSeries({n: -c for n, c in self._terms.items()}, self._den, self._valid)

    def __add__(self, other) -> "QSeries":
        other = _coerce(other)
        a, b, d = self._common(other)
        out = dict(a._terms)
        for n, c in b._terms.items():
            out[n] = out.get(n, 0) + c
        return QSeries(out, d, _min_valid(a._valid, b._valid)).normalize()

    __radd__ = __add__

    def __sub__(self, other) -> "QSeries":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "QSeries":
        return _coerce(other) - self

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, int):
            if other == 0:
                return QSeries.zero(self._valid)
            return QSeries({n: c * other for n, c in self._terms.items()}, self._den, self._valid)
        other = _coerce(other)
        a, b, d = self._common(other)
        valid = _min_valid(a._valid + b.lower_bound(), b._valid + a.lower_bound())
        if not a._terms or not b._terms:
            return QSeries.zero(valid)
        cut = INF if valid == INF else math.floor(valid * d)
        out: Dict[int, int] = {}
        bt = sorted(b._terms.items())
        for n1, c1 in a._terms.items():
            for n2, c2 in bt:
                n = n1 + n2
                if n > cut:
                    break
                out[n] = out.get(n, 0) + c1 * c2
        return QSeries(out, d, valid).normalize()

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "QSeries":
        if k < 0:
            raise ValueError("use reciprocal() for negative powers")
        result = QSeries.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, exponent: Rational) -> "QSeries":
        """Multiply by ``q**exponent``."""
        e = _frac(exponent)
        a = self.refine(_lcm(self._den, e.denominator))
        s = int(e * a._den)
        valid = a._valid if a._valid == INF else a._valid + e
        return QSeries({n + s: c for n, c in a._terms.items()}, a._den, valid).normalize()

    def truncate(self, order) -> "QSeries":
        """Forget everything above ``order``."""
        if order == INF:
            return self
        order = _frac(order)
        return QSeries(self._terms, self._den, _min_valid(self._valid, order))

    def with_valid(self, valid) -> "QSeries":
        return QSeries(self._terms, self._den, valid)

    def mul_binomial(self, c: int, exponent: Rational) -> "QSeries":
        """Multiply by ``(1 + c*q**exponent)`` without a full convolution."""
        return self + self.shift(exponent) * c

    def div_binomial(self, c: int, exponent: Rational, order) -> "QSeries":
        """Divide by ``(1 + c*q**exponent)`` (exponent > 0), exact through ``order``."""
        e = _frac(exponent)
        if e <= 0:
            raise ValueError("div_binomial needs a positive exponent")
        if c not in (1, -1):
            raise LeadingCoefficientNotUnit("division only by unit binomials")
        order = _frac(order) if order != INF else order
        valid = _min_valid(self._valid, order)
        if valid == INF:
            raise NotAPolynomial("an explicit truncation order is required")
        d = _lcm(self._den, e.denominator)
        a = self.refine(d)
        if not a._terms:
            return QSeries.zero(valid)
        step = int(e * d)
        lo = min(a._terms)
        hi = math.floor(valid * d)
        if hi < lo:
            return QSeries.zero(valid)
        # g = f - c q^e g, run along the dense lattice
        g = [0] * (hi - lo + 1)
        for i in range(hi - lo + 1):
            v = a._terms.get(lo + i, 0)
            if i >= step:
                v -= c * g[i - step]
            g[i] = v
        return QSeries({lo + i: v for i, v in enumerate(g)}, d, valid).normalize()

    def reciprocal(self, order) -> "QSeries":
        """``1/f`` exact through ``order``; the lowest coefficient must be +-1."""
        if not self._terms:
            raise LeadingCoefficientNotUnit("reciprocal of zero")
        lo = min(self._terms)
        lead = self._terms[lo]
        if lead not in (1, -1):
            raise LeadingCoefficientNotUnit(f"lowest coefficient {lead} is not +-1")
        d = self._den
        order = _frac(order)
        e0 = Fraction(lo, d)
        # 1/f = q^-e0 / (lead * (1 + h)); f's horizon limits the result to
        # valid_f - 2*e0 once q^-e0 is pulled out.
        valid = order
        if self._valid != INF:
            valid = min(valid, self._valid - 2 * e0)
        hi = math.floor((valid + e0) * d)  # dense length of the normalised series
        n = hi + 1
        if n <= 0:
            return QSeries.zero(valid)
        f = [0] * n
        for k, c in self._terms.items():
            i = k - lo
            if i < n:
                f[i] = c * lead
        g = [0] * n
        g[0] = 1
        nz = [(i, f[i]) for i in range(1, n) if f[i]]
        for k in range(1, n):
            s = 0
            for i, c in nz:
                if i > k:
                    break
                s += c * g[k - i]
            g[k] = -s
        return QSeries({k - lo: v * lead for k, v in enumerate(g)}, d, valid).normalize()

    def invert_q(self) -> "QSeries":
        """The substitution ``q -> 1/q``; only defined for polynomials."""
        if self._valid != INF:
            raise NotAPolynomial("q -> 1/q is only defined on finite Laurent polynomials")
        return QSeries({-n: c for n, c in self._terms.items()}, self._den)

    def subs_power(self, k: int) -> "QSeries":
        """The substitution ``q -> q**k`` for a positive integer k."""
        if k <= 0:
            raise ValueError("k must be positive")
        valid = self._valid if self._valid == INF else self._valid * k
        return QSeries({n * k: c for n, c in self._terms.items()}, self._den, valid).normalize()

    def at_one(self) -> int:
        """Sum of coefficients (evaluation at q=1); only for polynomials."""
        if self._valid != INF:
            raise NotAPolynomial("evaluation at q=1 needs a polynomial")
        return sum(self._terms.values())

    # -- comparison -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = QSeries.monomial(0, other) if other else QSeries.zero()
        if not isinstance(other, QSeries):
            return NotImplemented
        return self._valid == other._valid and self.as_dict() == other.as_dict()

    def __hash__(self):
        return hash((self._valid, tuple(self.items())))

    def agrees_with(self, other: "QSeries", through=None) -> bool:
        return first_mismatch(self, other, through) is None

    # -- rendering ----------------------------------------------------------

    def __repr__(self) -> str:
        v = "oo" if self._valid == INF else str(self._valid)
        return f"QSeries({self}, valid_through={v})"

    def __str__(self) -> str:
        return to_text(self)

    def to_json(self) -> dict:
        return {
            "den": self._den,
            "valid_through": "inf" if self._valid == INF else str(self._valid),
            "terms": [[str(n), str(c)] for n, c in sorted(self._terms.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "QSeries":
        v = data["valid_through"]
        valid = INF if v in ("inf", None) else Fraction(v)
        terms = {int(n): int(c) for n, c in data["terms"]}
        return cls(terms, int(data["den"]), valid)


def _coerce(x) -> QSeries:
    if isinstance(x, QSeries):
        return x
    if isinstance(x, int):
        return QSeries.monomial(0, x) if x else QSeries.zero()
    raise TypeError(f"cannot combine QSeries with {type(x).__name__}")


def _exp_text(e: Fraction) -> str:
    if e.denominator == 1:
        return str(e.numerator)
    return f"({e.numerator}/{e.denominator})"


def to_text(f: QSeries) -> str:
    parts = []
    for e, c in f.items():
        mag = abs(c)
        if e == 0:
            body = str(mag)
        else:
            qp = "q" if e == 1 else f"q^{_exp_text(e)}"
            body = qp if mag == 1 else f"{mag}*{qp}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    text = " ".join(parts) if parts else "0"
    if f.valid_through != INF:
        text += f" + O(q^{_exp_text(Fraction(f.valid_through))}+)"
    return text


def first_mismatch(f: QSeries, g: QSeries, through=None):
    """First exponent where f and g differ within their common horizon.

    Returns ``(exponent, coeff_f, coeff_g)`` or ``None``.
    """
    horizon = min(f.valid_through, g.valid_through)
    if through is not None:
        horizon = min(horizon, through)
    exps = set(f.as_dict()) | set(g.as_dict())
    fd, gd = f.as_dict(), g.as_dict()
    for e in sorted(exps):
        if horizon != INF and e > horizon:
            break
        a, b = fd.get(e, 0), gd.get(e, 0)
        if a != b:
            return e, a, b
    return None


def series_sum(items: Iterable[QSeries], valid=INF) -> QSeries:
    """Sum many series with one lattice refinement (faster than repeated +)."""
    den = 1
    items = list(items)
    for f in items:
        den = _lcm(den, f.den)
        valid = min(valid, f.valid_through)
    out: Dict[int, int] = {}
    for f in items:
        k = den // f.den
        for n, c in f._terms.items():
            m = n * k
            out[m] = out.get(m, 0) + c
    return QSeries(out, den, valid).normalize()


# -- Pochhammer symbols and q-binomials -------------------------------------


def pochhammer(a: SignedMonomial, n: int, order=INF) -> QSeries:
    """``(a; q)_n`` for ``a = sign*q**e``.

    For ``n >= 0`` the finite product.  For ``n < 0`` the reciprocal of
    ``prod_{k=1}^{-n} (1 - a q**-k)`` expanded through ``order``; a factor
    that vanishes identically raises :class:`PoleInNegativePochhammer`.
    """
    if n >= 0:
        f = QSeries.one()
        for k in range(n):
            f = f.mul_binomial(-a.sign, a.exponent + k)
        return f.truncate(order)
    denom = inverse_negative_pochhammer(a, -n)
    if order == INF:
        raise NotAPolynomial("(a)_n with n < 0 is an infinite series; give an order")
    return denom.reciprocal(order)


def inverse_negative_pochhammer(a: SignedMonomial, k: int) -> QSeries:
    """``1/(a; q)_{-k} = prod_{i=1}^{k} (1 - a q**-i)`` as a polynomial.

    Raises :class:`PoleInNegativePochhammer` when the product vanishes,
    i.e. when ``(a)_{-k}`` itself has a pole.
    """
    f = QSeries.one()
    for i in range(1, k + 1):
        e = a.exponent - i
        if e == 0 and a.sign == 1:
            raise PoleInNegativePochhammer(f"factor (1 - q^0) in ({a.sign}q^{a.exponent})_-{k}")
        f = f.mul_binomial(-a.sign, e)
    return f


def reciprocal_pochhammer(a: SignedMonomial, n: int, order) -> QSeries:
    """``1/(a; q)_n`` through ``order``, with ``1/(a)_n = 0`` at poles of ``(a)_n``.

    For negative n this is the finite product ``prod (1 - a q**-i)``, which
    is zero exactly when ``(a)_n`` has a pole; no exception is needed.
    """
    if n < 0:
        f = QSeries.one()
        for i in range(1, -n + 1):
            e = a.exponent - i
            if e == 0 and a.sign == 1:
                return QSeries.zero()
            f = f.mul_binomial(-a.sign, e)
        return f.truncate(order)
    f = QSeries.one().truncate(order)
    for k in range(n):
        e = a.exponent + k
        if e > 0:
            f = f.div_binomial(-a.sign, e, order)
        elif e == 0:
            if a.sign == 1:
                raise PoleInNegativePochhammer("1/(1 - q^0)")
            raise LeadingCoefficientNotUnit("factor (1 + q^0) = 2 is not invertible over Z")
        else:
            # 1/(1 - s q^e) = -s q^-e / (1 - s q^-e)
            f = f.shift(-e).div_binomial(-a.sign, -e, order) * (-a.sign)
    return f


def pochhammer_infinite(a: SignedMonomial, order) -> QSeries:
    """``(a; q)_oo`` exact through ``order``; needs a positive exponent."""
    if a.exponent <= 0:
        raise NonconvergentProduct(f"(a;q)_oo with a = {a.sign}q^{a.exponent} does not converge")
    order = _frac(order)
    f = QSeries.one().truncate(order)
    e = a.exponent
    while e <= order:
        f = f.mul_binomial(-a.sign, e)
        e += 1
    return f


def reciprocal_pochhammer_infinite(a: SignedMonomial, order) -> QSeries:
    """``1/(a; q)_oo`` exact through ``order``."""
    if a.exponent <= 0:
        raise NonconvergentProduct(f"1/(a;q)_oo with a = {a.sign}q^{a.exponent} does not converge")
    order = _frac(order)
    f = QSeries.one().truncate(order)
    e = a.exponent
    while e <= order:
        f = f.div_binomial(-a.sign, e, order)
        e += 1
    return f


_QBIN_CACHE: Dict[Tuple[int, int], QSeries] = {}


def qbinomial(n: int, j: int) -> QSeries:
    """Gaussian binomial ``[n, j]_q``; zero outside ``0 <= j <= n``."""
    if j < 0 or n < 0 or j > n:
        return QSeries.zero()
    j = min(j, n - j)
    hit = _QBIN_CACHE.get((n, j))
    if hit is not None:
        return hit
    deg = j * (n - j)
    # prod_{i=1}^{j} (1 - q^{n-j+i}) / (1 - q^i); each partial quotient is a polynomial
    poly = [1] + [0] * deg
    top = 0
    for i in range(1, j + 1):
        e = n - j + i
        for k in range(min(top + e, deg), e - 1, -1):
            poly[k] -= poly[k - e]
        top = min(top + e, deg + e)
        for k in range(i, deg + 1):
            poly[k] += poly[k - i]
    res = QSeries({k: c for k, c in enumerate(poly)})
    _QBIN_CACHE[(n, j)] = res
    return res


def qbinomial_ext(n: int, m: int) -> QSeries:
    """Extended binomial ``(q^{n+1})_m / (q)_m`` for any integer n and m >= 0.

    In the fermionic notation this is ``[n+m, m]'``; it is a Laurent
    polynomial, with negative exponents when ``n < -m``.
    """
    if m < 0:
        raise NegativeM(f"m = {m} < 0")
    if n >= 0:
        return qbinomial(n + m, m)
    if n + m >= 0:
        # a factor (1 - q^0) appears in (q^{n+1})_m
        return QSeries.zero()
    # n + m < 0: (q^{n+1})_m = prod_{i=0}^{m-1} (1 - q^{n+1+i}); all exponents < 0.
    # Pull q^{n+1+i} out of each factor: (1 - q^e) = -q^e (1 - q^-e).
    # The remaining product is (q^{-n-m})_m / (q)_m = [-n-1, m].
    shift = sum(n + 1 + i for i in range(m))
    return qbinomial(-n - 1, m).shift(shift) * ((-1) ** m)
