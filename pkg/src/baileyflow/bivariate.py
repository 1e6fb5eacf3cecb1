"""Finite Laurent polynomials in z with truncated q-series coefficients."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterator, Mapping, Tuple

from .qseries import INF, QSeries, _frac, first_mismatch, series_sum


class ZQSeries:
    """``sum_k z**k * c_k(q)`` with every ``c_k`` exact through one horizon.

    z-powers that are absent are zero through ``q_valid_through``.
    """

    __slots__ = ("_terms", "_valid")

    def __init__(self, terms: Mapping[int, QSeries] | None = None, valid=INF):
        if terms:
            for c in terms.values():
                valid = min(valid, c.valid_through)
        clean: Dict[int, QSeries] = {}
        if terms:
            for k, c in terms.items():
                c = c.truncate(valid)
                if not c.is_zero():
                    clean[k] = c
        self._terms = clean
        self._valid = valid

    @classmethod
    def from_qseries(cls, f: QSeries, zpow: int = 0) -> "ZQSeries":
        return cls({zpow: f}, f.valid_through)

    @classmethod
    def monomial(cls, zpow: int, qexp=0, coeff: int = 1) -> "ZQSeries":
        return cls({zpow: QSeries.monomial(qexp, coeff)})

    @classmethod
    def one(cls) -> "ZQSeries":
        return cls.monomial(0)

    @classmethod
    def zero(cls, valid=INF) -> "ZQSeries":
        return cls({}, valid)

    @property
    def q_valid_through(self):
        return self._valid

    @property
    def z_range(self) -> Tuple[int, int]:
        if not self._terms:
            return (0, 0)
        return min(self._terms), max(self._terms)

    def coeff(self, k: int) -> QSeries:
        return self._terms.get(k, QSeries.zero(self._valid))

    def items(self) -> Iterator[Tuple[int, QSeries]]:
        for k in sorted(self._terms):
            yield k, self._terms[k]

    def is_zero(self) -> bool:
        return not self._terms

    def lower_bound(self):
        """Lower bound on the q-order of every z-coefficient."""
        if not self._terms:
            return self._valid
        return min(c.ord() for c in self._terms.values())

    def truncate(self, order) -> "ZQSeries":
        return ZQSeries(self._terms, min(self._valid, order))

    # -- arithmetic -----------------------------------------------------------

    def __neg__(self) -> "ZQSeries":
        return ZQSeries({k: -c for k, c in self._terms.items()}, self._valid)

    def __add__(self, other) -> "ZQSeries":
        other = _zcoerce(other)
        valid = min(self._valid, other._valid)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out[k] + c if k in out else c
        return ZQSeries({k: c.truncate(valid) for k, c in out.items()}, valid)

    __radd__ = __add__

    def __sub__(self, other) -> "ZQSeries":
        return self + (-_zcoerce(other))

    def __mul__(self, other) -> "ZQSeries":
        if isinstance(other, int):
            if other == 0:
                return ZQSeries.zero(self._valid)
            return ZQSeries({k: c * other for k, c in self._terms.items()}, self._valid)
        if isinstance(other, QSeries):
            return self.mul_q(other)
        other = _zcoerce(other)
        valid = min(self._valid + other.lower_bound(), other._valid + self.lower_bound())
        buckets: Dict[int, list] = {}
        for k1, c1 in self._terms.items():
            c1t = c1.truncate(valid - other.lower_bound()) if valid != INF else c1
            for k2, c2 in other._terms.items():
                prod = (c1t * c2).truncate(valid)
                if not prod.is_zero():
                    buckets.setdefault(k1 + k2, []).append(prod)
        out = {k: series_sum(v) for k, v in buckets.items()}
        return ZQSeries(out, valid)

    __rmul__ = __mul__

    def mul_q(self, f: QSeries) -> "ZQSeries":
        """Multiply every z-coefficient by the q-series f."""
        valid = min(self._valid + f.lower_bound(), f.valid_through + self.lower_bound())
        return ZQSeries({k: (c * f).truncate(valid) for k, c in self._terms.items()}, valid)

    def shift_q(self, e) -> "ZQSeries":
        e = _frac(e)
        valid = self._valid if self._valid == INF else self._valid + e
        return ZQSeries({k: c.shift(e) for k, c in self._terms.items()}, valid)

    def shift_zpow(self, m: int) -> "ZQSeries":
        """Multiply by ``z**m``."""
        return ZQSeries({k + m: c for k, c in self._terms.items()}, self._valid)

    def mul_linear(self, c: int, zpow: int, qexp) -> "ZQSeries":
        """Multiply by ``(1 + c * z**zpow * q**qexp)``."""
        return self + (self.shift_zpow(zpow).shift_q(qexp) * c).truncate(self._valid)

    def div_linear(self, c: int, zpow: int, qexp, order=INF) -> "ZQSeries":
        """Divide by ``(1 + c * z**zpow * q**qexp)`` with ``qexp > 0``.

        The quotient is the geometric expansion in ``c z**zpow q**qexp``.
        """
        e = _frac(qexp)
        if c not in (1, -1):
            raise ValueError("only unit binomials can be inverted")
        if e <= 0:
            raise ValueError("div_linear needs a positive q-exponent; flip the factor first")
        valid = min(self._valid, order)
        if valid == INF:
            raise ValueError("an explicit order is required")
        if zpow == 0:
            return ZQSeries({k: f.div_binomial(c, e, valid) for k, f in self._terms.items()}, valid)
        if not self._terms:
            return ZQSeries.zero(valid)
        keys = sorted(self._terms, reverse=(zpow < 0))
        step = 1 if zpow > 0 else -1
        out: Dict[int, QSeries] = {}
        k = keys[0]
        prev = QSeries.zero(valid)
        last = keys[-1]
        # g_k = f_k - c q^e g_{k - zpow}
        while True:
            g = self._terms.get(k, QSeries.zero(valid)).truncate(valid)
            if not prev.is_zero():
                g = g - (prev.shift(e) * c).truncate(valid)
            if not g.is_zero():
                out[k] = g
            prev = g
            if (k - last) * step >= 0 and g.is_zero():
                break
            k += step
        return ZQSeries(out, valid)

    # -- substitutions ------------------------------------------------------

    def shift_z(self, halfsteps: int) -> "ZQSeries":
        """Substitute ``z -> z q**(halfsteps/2)``.

        The horizon drops by the most negative exponent shift over the
        z-range widened by one step on each side.
        """
        h = Fraction(halfsteps, 2)
        if not self._terms:
            return ZQSeries.zero(self._valid)
        lo, hi = self.z_range
        worst = min((lo - 1) * h, (hi + 1) * h, Fraction(0))
        valid = self._valid if self._valid == INF else self._valid + worst
        out = {k: c.shift(k * h).truncate(valid) for k, c in self._terms.items()}
        return ZQSeries(out, valid)

    def subs_z_monomial(self, qexp) -> QSeries:
        """Substitute ``z = q**qexp`` (an exact lattice sum)."""
        e = _frac(qexp)
        lo, hi = self.z_range
        worst = min(lo * e, hi * e, Fraction(0))
        valid = self._valid if self._valid == INF else self._valid + worst
        return series_sum([c.shift(k * e) for k, c in self._terms.items()], valid).truncate(valid)

    def invert_z(self) -> "ZQSeries":
        """Substitute ``z -> 1/z``."""
        return ZQSeries({-k: c for k, c in self._terms.items()}, self._valid)

    def set_z_one(self) -> QSeries:
        return series_sum(self._terms.values(), self._valid)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZQSeries):
            return NotImplemented
        return self._valid == other._valid and {k: c.as_dict() for k, c in self._terms.items()} == {
            k: c.as_dict() for k, c in other._terms.items()
        }

    def __repr__(self) -> str:
        return f"ZQSeries({self}, q_valid_through={self._valid})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        text = " + ".join(f"z^{k}*({_plain(c)})" for k, c in self.items())
        if self._valid != INF:
            text += f" + O(q^{self._valid}+)"
        return text

    def to_json(self) -> dict:
        return {
            "z_terms": [[k, c.to_json()] for k, c in self.items()],
            "q_valid_through": "inf" if self._valid == INF else str(self._valid),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ZQSeries":
        v = data["q_valid_through"]
        valid = INF if v == "inf" else Fraction(v)
        return cls({int(k): QSeries.from_json(c) for k, c in data["z_terms"]}, valid)


def _plain(c: QSeries) -> str:
    return str(QSeries.from_exponents(c.as_dict()))


def _zcoerce(x) -> ZQSeries:
    if isinstance(x, ZQSeries):
        return x
    if isinstance(x, QSeries):
        return ZQSeries.from_qseries(x)
    if isinstance(x, int):
        return ZQSeries.monomial(0, 0, x) if x else ZQSeries.zero()
    raise TypeError(f"cannot combine ZQSeries with {type(x).__name__}")


def z_first_mismatch(f: ZQSeries, g: ZQSeries, through=None):
    """First ``(zpow, exponent, coeff_f, coeff_g)`` where f and g differ."""
    horizon = min(f.q_valid_through, g.q_valid_through)
    if through is not None:
        horizon = min(horizon, through)
    keys = sorted(set(k for k, _ in f.items()) | set(k for k, _ in g.items()))
    best = None
    for k in keys:
        a = f.coeff(k).truncate(horizon)
        b = g.coeff(k).truncate(horizon)
        mm = first_mismatch(a, b)
        if mm is not None and (best is None or mm[0] < best[1]):
            best = (k, *mm)
    return best


def inverse_linear(zpow: int, qexp, order) -> ZQSeries:
    """``1/(1 + z**zpow q**qexp)`` expanded so that q-orders grow.

    A nonpositive q-exponent is handled by pulling ``z**zpow q**qexp`` out:
    ``1/(1+w) = w**-1 / (1 + w**-1)``.
    """
    e = _frac(qexp)
    if e > 0:
        return ZQSeries.one().truncate(order).div_linear(1, zpow, e, order)
    if e == 0:
        raise ZeroDivisionError("1/(1 + z^k) has no expansion in q; cancel it against a numerator")
    base = ZQSeries.monomial(-zpow, -e).truncate(order)
    return base.div_linear(1, -zpow, -e, order)
