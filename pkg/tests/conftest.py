"""Independent oracles built on plain dicts, shared by the test modules.

Nothing here imports the package's arithmetic: expected values come from
these naive routines or from hand-expanded literals.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction

import pytest

from baileyflow.qseries import QSeries


def S(terms, valid=None) -> QSeries:
    """Build a QSeries from ``{exponent: coeff}``."""
    f = QSeries.from_exponents({Fraction(e): c for e, c in terms.items()})
    return f if valid is None else f.truncate(valid)


def d_mul(a: dict, b: dict, order=None) -> dict:
    out = defaultdict(int)
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            if order is None or e <= order:
                out[e] += c1 * c2
    return {e: c for e, c in out.items() if c}


def d_geometric(sign: int, e, order) -> dict:
    """``1/(1 - sign*q^e)`` as a dict, for e > 0."""
    out = {}
    k = 0
    while k * e <= order:
        out[Fraction(k * e)] = sign**k
        k += 1
    return out


def d_qbinomial(n: int, k: int) -> dict:
    """Gaussian binomial by the Pascal rule ``[n,k] = [n-1,k-1] + q^k [n-1,k]``."""
    if k < 0 or k > n:
        return {}
    if k == 0 or k == n:
        return {Fraction(0): 1}
    out = defaultdict(int, d_qbinomial(n - 1, k - 1))
    for e, c in d_qbinomial(n - 1, k).items():
        out[e + k] += c
    return {e: c for e, c in out.items() if c}


def d_product(factors, order) -> dict:
    """Expand ``prod (1 + c q^e)`` over ``(c, e)`` pairs, dropping exponents above order."""
    out = {Fraction(0): 1}
    for c, e in factors:
        out = d_mul(out, {Fraction(0): 1, Fraction(e): c}, order)
    return out


def partitions(n: int) -> int:
    p = [1] + [0] * n
    for part in range(1, n + 1):
        for k in range(part, n + 1):
            p[k] += p[k - part]
    return p[n]


def as_dict(f: QSeries) -> dict:
    return dict(f.items())


# -- acceptance reporting --------------------------------------------------------

ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES
