"""Identity jobs: expand both sides of a registered identity and compare exactly.

A job names a registered identity, its parameters and an order.  Running it
yields a report whose status is ``pass`` only when every comparison agrees
through the common horizon.  Timings are kept apart from the rest of the
report so repeated runs serialise identically.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Callable, Dict, List, Optional

from . import bailey, fermionic, superconformal as sc
from .bivariate import ZQSeries, z_first_mismatch
from .minimal_model import ModelError, bose_poly, decompose, r_of_b
from .qseries import INF, QSeries, QSeriesError, first_mismatch


class ConfigError(ValueError):
    pass


class Skip(Exception):
    """Raised by an identity when its preconditions do not hold."""


@dataclass
class IdentityJob:
    name: str
    params: dict = field(default_factory=dict)
    order: int = 20
    expected: Optional[str] = None  # "exact-match" | "calibrated-match"; None picks the registry default

    def to_json(self) -> dict:
        return {"name": self.name, "params": self.params, "order": self.order, "expected": self.mode}

    @property
    def mode(self) -> str:
        return self.expected or REGISTRY[self.name].default_mode


@dataclass
class IdentityReport:
    job: IdentityJob
    status: str  # pass | fail | skipped
    shift: Optional[Fraction] = None
    first_mismatch: Optional[dict] = None
    terms_compared: int = 0
    checks: List[dict] = field(default_factory=list)
    reason: Optional[str] = None
    elapsed: float = 0.0

    def to_json(self) -> dict:
        """Everything except the elapsed time, which lives in the suite's timing block."""
        return {
            "job": self.job.to_json(),
            "identity": REGISTRY[self.job.name].anchor,
            "status": self.status,
            "shift": None if self.shift is None else str(self.shift),
            "first_mismatch": self.first_mismatch,
            "terms_compared": self.terms_compared,
            "checks": self.checks,
            "reason": self.reason,
        }


@dataclass
class Comparison:
    label: str
    lhs: object
    rhs: object
    positivity: bool = False  # audit both sides for negative coefficients


@dataclass(frozen=True)
class Identity:
    name: str
    anchor: str
    default_mode: str
    build: Callable[[dict, int], List[Comparison]]


REGISTRY: Dict[str, Identity] = {}


def register(name: str, anchor: str, default_mode: str = "calibrated-match"):
    def deco(fn):
        REGISTRY[name] = Identity(name, anchor, default_mode, fn)
        return fn

    return deco


def _need(params: dict, *keys):
    missing = [k for k in keys if k not in params]
    if missing:
        raise ConfigError(f"missing parameter(s): {', '.join(missing)}")
    return [params[k] for k in keys]


def _r_of(p, pp, b):
    return r_of_b(decompose(p, pp), b)


# -- registered identities ------------------------------------------------------


@register("bailey-pair", "beta summed from alpha equals the bosonic polynomial over (aq)_{2n}", "exact-match")
def _bailey_pair(params, order):
    p, pp, b, s = _need(params, "p", "pp", "b", "s")
    x = params.get("x", 0)
    nmax = params.get("nmax", 8)
    dual = params.get("dual", False)
    r = _r_of(p, pp, b)
    pair = bailey.mpp_pair(p, pp, r, s, b, x, dual)
    out = [
        Comparison(f"n={n}", bailey.beta_from_alpha(pair, n, order), pair.beta_bosonic(n, order))
        for n in range(nmax + 1)
    ]
    if not dual:
        same = bailey.families_equal(
            bailey.dualize_alpha(pair.alpha, pair.a_exp), bailey.alpha_mpp_dual(p, pp, r, s, b, x)
        )
        out.append(Comparison("dual alpha families", int(same), 1))
    return out


def _n1(params, order, dual, ramond):
    p, pp, b, s = _need(params, "p", "pp", "b", "s")
    if ((b - s) % 2 == 1) != ramond:
        raise Skip(f"b-s = {b - s} selects the {'R' if (b - s) % 2 else 'NS'} sector")
    r = _r_of(p, pp, b)
    if dual:
        P, PP, R, S = pp, 3 * pp - 2 * p, s, 3 * b - 2 * r
    else:
        P, PP, R, S = pp, 2 * p + pp, s, 2 * r + b
    lhs = sc.n1_flow_lhs(p, pp, b, s, dual, order)
    rhs = sc.n1_character(P, PP, R, S, order).body
    return [Comparison(f"SM({P},{PP}) labels ({R},{S})", lhs, rhs, positivity=True)]


@register("n1-ns", "N=1 NS flow: M(p,p') into SM(p',2p+p')")
def _n1_ns(params, order):
    return _n1(params, order, False, False)


@register("n1-r", "N=1 R flow: M(p,p') into SM(p',2p+p')")
def _n1_r(params, order):
    return _n1(params, order, False, True)


@register("n1-ns-dual", "N=1 NS flow of the dual pair: M(p,p') into SM(p',3p'-2p)")
def _n1_ns_dual(params, order):
    return _n1(params, order, True, False)


@register("n1-r-dual", "N=1 R flow of the dual pair: M(p,p') into SM(p',3p'-2p)")
def _n1_r_dual(params, order):
    return _n1(params, order, True, True)


@register("n2-vacuum-forms", "N=2 NS vacuum: embedding-diagram form equals the product form", "exact-match")
def _n2_forms(params, order):
    p, pp = _need(params, "p", "pp")
    a = sc.n2_ns_vacuum(p, pp, "embedding", order).body
    b = sc.n2_ns_vacuum(p, pp, "product", order).body
    return [Comparison("embedding vs product", a, b, positivity=True)]


@register("n2-z1", "N=2 NS vacuum at z=1 equals its single-variable formula", "exact-match")
def _n2_z1(params, order):
    p, pp = _need(params, "p", "pp")
    b = sc.n2_ns_vacuum(p, pp, "product", order).body.set_z_one()
    return [Comparison("z=1 formula vs product form at z=1", sc.vacuum3(p, pp, order), b, positivity=True)]


@register("n2-flow-ns", "N=2 NS flow: the vacuum character from M(p,p') with r=0, b=s=1")
def _n2_flow_ns(params, order):
    p, pp = _need(params, "p", "pp")
    lhs = sc.n2_flow_lhs(p, pp, "NS", order)
    rhs = sc.n2_ns_vacuum(p, pp, "product", order).body
    return [Comparison("flow sum vs vacuum body", lhs, rhs, positivity=True)]


@register("n2-flow-r", "N=2 R flow: the spectrally flowed vacuum from M(p,p') with r=0, b=s=1")
def _n2_flow_r(params, order):
    p, pp = _need(params, "p", "pp")
    lhs = sc.n2_flow_lhs(p, pp, "R", order)
    rhs = sc.n2_r_vacuum(p, pp, order).body
    return [Comparison("flow sum vs Ramond body", lhs, rhs, positivity=True)]


@register("spectral-flow-consistency", "half a unit of spectral flow takes the NS vacuum to the Ramond character", "exact-match")
def _spectral(params, order):
    p, pp = _need(params, "p", "pp")
    extra = params.get("extra", 7)
    flowed = sc.spectral_flow_half(sc.n2_ns_vacuum(p, pp, "product", order + extra))
    ram = sc.n2_r_vacuum(p, pp, order)
    if flowed.body.q_valid_through < order:
        raise Skip(f"flowed horizon {flowed.body.q_valid_through} is below {order}; raise 'extra'")
    return [
        Comparison("bodies", flowed.body.truncate(order), ram.body, positivity=True),
        Comparison("prefactor q", flowed.prefactor.q_exp, ram.prefactor.q_exp),
        Comparison("prefactor z", flowed.prefactor.z_exp, ram.prefactor.z_exp),
        Comparison("labels (h, Q)", tuple(flowed.labels), tuple(ram.labels)),
    ]


@register("expansion-lemmas", "finite Pochhammer expansions and the binomial inversion law", "exact-match")
def _lemmas(params, order):
    size = params.get("max_size", 20)
    inv = params.get("inversion_range", 10)
    out = []
    for m0 in range(0, size + 1, 2):
        rep = fermionic.expansion_lemma("neg_q_half", m0)
        out.append(Comparison(f"neg_q_half m0={m0}", rep.lhs, rep.rhs))
    for m0 in range(1, size + 1, 2):
        rep = fermionic.expansion_lemma("neg_q", m0)
        out.append(Comparison(f"neg_q m0={m0}", rep.lhs, rep.rhs))
    for n in range(size + 1):
        rep = fermionic.expansion_lemma("x_n", n)
        out.append(Comparison(f"x_n n={n}", rep.lhs, rep.rhs))
    bad = [(n, m) for n in range(-inv, inv + 1) for m in range(inv + 1) if not fermionic.inversion_check(n, m)]
    out.append(Comparison("binomial inversion failures", len(bad), 0))
    return out


def _discovered(params):
    p, pp, b, s = _need(params, "p", "pp", "b", "s")
    if "config" in params:
        return [fermionic.system_from_json(params["config"])], None
    rep = fermionic.discover(decompose(p, pp), b, s, params.get("radius", 4), params.get("lmax", 12))
    return rep.found, rep


@register("fermi-vs-bose", "fermionic lattice sum equals the bosonic polynomial for every probed L", "exact-match")
def _fermi_vs_bose(params, order):
    p, pp, b, s = _need(params, "p", "pp", "b", "s")
    systems, rep = _discovered(params)
    if not systems:
        raise Skip(f"search exhausted without a completion ({rep.searched.get('candidates_tested')} candidates)")
    r = _r_of(p, pp, b)
    lmax = params.get("lmax", 12)
    out = []
    for i, sys in enumerate(systems):
        for L in range(0, lmax + 1):
            if (L - (b - s)) % 2:
                continue
            out.append(Comparison(f"system {i} L={L}", fermionic.fermi_eval(sys, L), bose_poly(p, pp, r, s, b, L)))
    return out


@register("fermi-char-vs-closed-form", "enlarged fermionic sum equals the closed-form character")
def _fermi_char(params, order):
    p, pp, b, s = _need(params, "p", "pp", "b", "s")
    target = params.get("target", "n2ns")
    systems, rep = _discovered(params)
    if not systems:
        raise Skip(f"search exhausted without a completion ({rep.searched.get('candidates_tested')} candidates)")
    r = _r_of(p, pp, b)
    if target == "n2ns":
        ref = sc.n2_ns_vacuum(p, pp, "product", order).body.set_z_one()
    elif target == "n2r":
        ref = sc.n2_r_vacuum(p, pp, order).body.set_z_one()
    elif target in ("n1ns", "n1r"):
        ref = sc.n1_character(pp, 2 * p + pp, s, 2 * r + b, order).body
    elif target in ("n1ns_dual", "n1r_dual"):
        ref = sc.n1_character(pp, 3 * pp - 2 * p, s, 3 * b - 2 * r, order).body
    else:
        raise Skip(f"no closed form to compare with for target {target}")
    return [
        Comparison(f"system {i} {target}", fermionic.fermi_char(fermionic.extend_system(sys, target), order), ref, True)
        for i, sys in enumerate(systems)
    ]


# -- running ------------------------------------------------------------------


def _perturb(x, spec):
    """Test hook: add ``delta`` to the coefficient of ``q^exponent`` (z^0 for bivariate)."""
    e = Fraction(spec["exponent"])
    delta = int(spec.get("delta", 1))
    bump = QSeries.monomial(e, delta)
    if isinstance(x, ZQSeries):
        return x + ZQSeries.from_qseries(bump).truncate(x.q_valid_through)
    return x + bump.truncate(x.valid_through)


def _compare(c: Comparison, mode: str):
    """Returns (ok, shift, mismatch, terms)."""
    lhs, rhs = c.lhs, c.rhs
    if isinstance(lhs, QSeries) and isinstance(rhs, QSeries):
        shift = Fraction(0)
        if mode == "calibrated-match" and not lhs.is_zero() and not rhs.is_zero():
            shift = rhs.ord() - lhs.ord()
        moved = lhs.shift(shift)
        horizon = min(moved.valid_through, rhs.valid_through)
        mm = first_mismatch(moved, rhs)
        terms = sum(1 for e, _ in rhs.items() if horizon == INF or e <= horizon)
        if mm is None:
            return True, shift, None, terms
        return False, shift, {"exponent": str(mm[0]), "lhs": str(mm[1]), "rhs": str(mm[2])}, terms
    if isinstance(lhs, ZQSeries) and isinstance(rhs, ZQSeries):
        shift = Fraction(0)
        if mode == "calibrated-match" and not lhs.is_zero() and not rhs.is_zero():
            shift = rhs.lower_bound() - lhs.lower_bound()
        moved = lhs.shift_q(shift)
        mm = z_first_mismatch(moved, rhs)
        terms = sum(len(cf.as_dict()) for _, cf in rhs.items())
        if mm is None:
            return True, shift, None, terms
        k, e, a, b = mm
        return False, shift, {"zpow": k, "exponent": str(e), "lhs": str(a), "rhs": str(b)}, terms
    ok = lhs == rhs
    return ok, None, None if ok else {"lhs": str(lhs), "rhs": str(rhs)}, 1


def run_job(job: IdentityJob) -> IdentityReport:
    """Run one job; precondition failures become ``skipped`` with a reason."""
    if job.name not in REGISTRY:
        raise ConfigError(f"unknown identity {job.name!r}")
    t0 = time.perf_counter()
    try:
        comparisons = REGISTRY[job.name].build(dict(job.params), job.order)
    except Skip as exc:
        return IdentityReport(job, "skipped", reason=str(exc), elapsed=time.perf_counter() - t0)
    except ConfigError:
        raise
    except (ModelError, sc.CharacterError, bailey.BaileyError, fermionic.FermionicError, QSeriesError) as exc:
        return IdentityReport(job, "skipped", reason=f"{type(exc).__name__}: {exc}", elapsed=time.perf_counter() - t0)
    perturb = job.params.get("perturb")
    if perturb and comparisons:
        comparisons[0].lhs = _perturb(comparisons[0].lhs, perturb)
    status = "pass"
    shift = None
    mismatch = None
    terms = 0
    checks = []
    for c in comparisons:
        ok, sh, mm, n = _compare(c, job.mode)
        terms += n
        entry = {"label": c.label, "match": ok}
        if sh is not None:
            entry["shift"] = str(sh)
            if shift is None:
                shift = sh
        if mm is not None:
            entry["first_mismatch"] = mm
            if mismatch is None:
                mismatch = dict(mm, label=c.label)
        if c.positivity:
            for side, series in (("lhs", c.lhs), ("rhs", c.rhs)):
                w = sc.first_negative(series)
                if w is not None:
                    ok = False
                    entry.setdefault("negative", {})[side] = {"zpow": w[0], "exponent": str(w[1]), "coeff": str(w[2])}
            entry["nonnegative"] = "negative" not in entry
        if not ok:
            status = "fail"
        checks.append(entry)
    return IdentityReport(job, status, shift, mismatch, terms, checks, elapsed=time.perf_counter() - t0)


def parse_suite(data) -> tuple:
    """Validate a suite document; returns ``(jobs, workers)``."""
    if not isinstance(data, dict) or "jobs" not in data:
        raise ConfigError("suite must be an object with a 'jobs' list")
    if not isinstance(data["jobs"], list):
        raise ConfigError("'jobs' must be a list")
    jobs = []
    for i, raw in enumerate(data["jobs"]):
        where = f"jobs[{i}]"
        if not isinstance(raw, dict):
            raise ConfigError(f"{where}: expected an object")
        name = raw.get("name")
        if name not in REGISTRY:
            raise ConfigError(f"{where}.name: unknown identity {name!r}; known: {', '.join(sorted(REGISTRY))}")
        order = raw.get("order", 20)
        if not isinstance(order, int) or order < 1:
            raise ConfigError(f"{where}.order: must be an integer >= 1, got {order!r}")
        params = raw.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError(f"{where}.params: expected an object")
        expected = raw.get("expected")
        if expected not in (None, "exact-match", "calibrated-match"):
            raise ConfigError(f"{where}.expected: must be exact-match or calibrated-match, got {expected!r}")
        jobs.append(IdentityJob(name, params, order, expected))
    workers = data.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise ConfigError(f"workers: must be an integer >= 1, got {workers!r}")
    return jobs, workers


def load_suite(path: str) -> tuple:
    if path == "default":
        text = resources.files("baileyflow").joinpath("suites/default.json").read_text()
    else:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read suite {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_suite(data)


@dataclass
class SuiteResult:
    reports: List[IdentityReport]

    @property
    def exit_code(self) -> int:
        return 1 if any(r.status == "fail" for r in self.reports) else 0

    def summary(self) -> dict:
        counts = {"pass": 0, "fail": 0, "skipped": 0}
        for r in self.reports:
            counts[r.status] += 1
        return {"jobs": len(self.reports), **counts}

    def to_json(self) -> dict:
        return {
            "summary": self.summary(),
            "reports": [r.to_json() for r in self.reports],
            "timing": {"elapsed_seconds": [round(r.elapsed, 3) for r in self.reports]},
        }


def run_jobs(jobs: List[IdentityJob], workers: int = 1) -> SuiteResult:
    if workers <= 1 or len(jobs) <= 1:
        return SuiteResult([run_job(j) for j in jobs])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return SuiteResult(list(pool.map(run_job, jobs)))


def run_suite(config_path: str, workers: Optional[int] = None) -> SuiteResult:
    jobs, configured = load_suite(config_path)
    return run_jobs(jobs, workers or configured)
