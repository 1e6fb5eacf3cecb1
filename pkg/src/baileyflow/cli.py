"""Command line entry point: ``baileyflow <group> <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys

from . import bailey, fermionic, harness, superconformal as sc
from .minimal_model import ModelError, decompose, r_of_b, takahashi_list
from .qseries import QSeriesError, first_mismatch


def _emit(obj, as_json: bool, text: str):
    if as_json:
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        print(text)


def cmd_model_info(a):
    m = decompose(a.p, a.pp)
    lines = [
        f"M({m.p},{m.p_prime}): nu = {list(m.nu)}, n0 = {m.n0}, t = {list(m.t)}, dim = {m.dim}",
        f"y = {list(m.y)}, ybar = {list(m.ybar)}",
        "incidence:",
        *("  " + " ".join(str(x) for x in row) for row in m.incidence.tolist()),
        "Takahashi lengths (index, zone, length, truncated):",
        *(f"  {lab.index + 1:3d} {lab.zone:3d} {lab.value:5d} {lab.truncated:5d}" for lab in takahashi_list(m)),
    ]
    _emit(m.to_json(), a.json, "\n".join(lines))
    return 0


def cmd_bailey_verify(a):
    r = r_of_b(decompose(a.p, a.pp), a.b)
    pair = bailey.mpp_pair(a.p, a.pp, r, a.s, a.b, a.x, a.dual)
    rows = []
    for n in range(a.nmax + 1):
        lhs = bailey.beta_from_alpha(pair, n, a.order)
        rhs = pair.beta_bosonic(n, a.order)
        mm = first_mismatch(lhs, rhs)
        rows.append(
            {
                "n": n,
                "match": mm is None,
                "first_mismatch": None if mm is None else [str(x) for x in mm],
                "beta": str(rhs),
            }
        )
    ok = all(row["match"] for row in rows)
    text = "\n".join(
        f"n={row['n']}: {'ok' if row['match'] else 'MISMATCH at ' + str(row['first_mismatch'])}" for row in rows
    )
    text += f"\n{'all n agree' if ok else 'disagreement found'} through q^{a.order} (r = {r})"
    _emit({"r": r, "dual": a.dual, "order": a.order, "rows": rows, "match": ok}, a.json, text)
    return 0 if ok else 1


def _char_text(res):
    pf = res.prefactor
    return "\n".join(
        [
            f"sector {res.sector}, labels {tuple(str(x) for x in res.labels)}, c = {res.central_charge}",
            f"prefactor q^({pf.q_exp}) z^({pf.z_exp})",
            str(res.body),
        ]
    )


def cmd_char(a):
    if a.kind == "n1":
        res = sc.n1_character(a.p, a.pp, a.r, a.s, a.order)
    elif a.kind == "n2-ns":
        res = sc.n2_ns_vacuum(a.p, a.pp, a.form, a.order)
    else:
        res = sc.n2_r_vacuum(a.p, a.pp, a.order)
    if getattr(a, "z1", False):
        body = res.body.set_z_one()
        _emit({"prefactor": res.prefactor.to_json(), "body": body.to_json()}, a.json, str(body))
        return 0
    _emit(res.to_json(), a.json, _char_text(res))
    return 0


def cmd_fermi_eval(a):
    f = fermionic.fermi_eval(fermionic.load_system(a.config), a.L)
    _emit(f.to_json(), a.json, str(f))
    return 0


def cmd_fermi_char(a):
    ext = fermionic.extend_system(fermionic.load_system(a.config), a.target)
    f = fermionic.fermi_char(ext, a.order)
    _emit(f.to_json(), a.json, str(f))
    return 0


def cmd_fermi_discover(a):
    rep = fermionic.discover(decompose(a.p, a.pp), a.b, a.s, a.radius, a.lmax)
    lines = [f"candidates tested: {rep.searched.get('candidates_tested')}", f"found: {len(rep.found)}"]
    for i, s in enumerate(rep.found):
        lines.append(f"  [{i}] " + json.dumps(fermionic.system_to_json(s), sort_keys=True))
    if not rep.found:
        lines.append("no completion in the searched box")
    lines.extend(f"note: {n}" for n in rep.notes)
    _emit(rep.to_json(), a.json, "\n".join(lines))
    return 0


def cmd_verify(a):
    try:
        jobs, workers = harness.load_suite(a.suite)
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    result = harness.run_jobs(jobs, a.jobs or workers)
    for i, r in enumerate(result.reports):
        extra = ""
        if r.status == "fail" and r.first_mismatch:
            extra = f" first mismatch {r.first_mismatch}"
        elif r.status == "skipped":
            extra = f" ({r.reason})"
        print(f"[{i:02d}] {r.status.upper():7s} {r.job.name} {json.dumps(r.job.params, sort_keys=True)}{extra}")
    s = result.summary()
    print(f"{s['pass']} passed, {s['fail']} failed, {s['skipped']} skipped of {s['jobs']}")
    if a.json:
        with open(a.json, "w") as fh:
            json.dump(result.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return result.exit_code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="baileyflow", description=__doc__)
    top = ap.add_subparsers(dest="group", required=True)

    model = top.add_parser("model", help="minimal model data").add_subparsers(dest="cmd", required=True)
    mi = model.add_parser("info", help="continued fraction, incidence matrix and Takahashi lengths")
    mi.add_argument("--p", type=int, required=True)
    mi.add_argument("--pp", type=int, required=True)
    mi.add_argument("--json", action="store_true")
    mi.set_defaults(fn=cmd_model_info)

    bl = top.add_parser("bailey", help="Bailey pairs").add_subparsers(dest="cmd", required=True)
    bv = bl.add_parser("verify", help="check beta from alpha against the bosonic polynomials")
    for name in ("p", "pp", "b", "s"):
        bv.add_argument(f"--{name}", type=int, required=True)
    bv.add_argument("--x", type=int, default=0)
    bv.add_argument("--nmax", type=int, default=8)
    bv.add_argument("--order", type=int, default=30)
    bv.add_argument("--dual", action="store_true")
    bv.add_argument("--json", action="store_true")
    bv.set_defaults(fn=cmd_bailey_verify)

    ch = top.add_parser("char", help="closed-form characters").add_subparsers(dest="kind", required=True)
    c1 = ch.add_parser("n1", help="N=1 character")
    for name in ("p", "pp", "r", "s"):
        c1.add_argument(f"--{name}", type=int, required=True)
    c2 = ch.add_parser("n2-ns", help="N=2 NS vacuum character")
    c2.add_argument("--form", choices=("product", "embedding"), default="product")
    c2.add_argument("--z1", action="store_true", help="specialise z = 1")
    c3 = ch.add_parser("n2-r", help="N=2 Ramond character from the vacuum module")
    c3.add_argument("--z1", action="store_true", help="specialise z = 1")
    for sub in (c2, c3):
        sub.add_argument("--p", type=int, required=True)
        sub.add_argument("--pp", type=int, required=True)
    for sub in (c1, c2, c3):
        sub.add_argument("--order", type=int, default=25)
        sub.add_argument("--json", action="store_true")
        sub.set_defaults(fn=cmd_char)

    fm = top.add_parser("fermi", help="fermionic sums").add_subparsers(dest="cmd", required=True)
    fe = fm.add_parser("eval", help="finite-L fermionic polynomial")
    fe.add_argument("--config", required=True)
    fe.add_argument("--L", type=int, required=True)
    fe.set_defaults(fn=cmd_fermi_eval)
    fc = fm.add_parser("char", help="L -> infinity sum of an enlarged system")
    fc.add_argument("--config", required=True)
    fc.add_argument("--target", choices=fermionic.TARGETS, required=True)
    fc.add_argument("--order", type=int, default=20)
    fc.set_defaults(fn=cmd_fermi_char)
    fd = fm.add_parser("discover", help="search linear terms and parities")
    for name in ("p", "pp", "b", "s"):
        fd.add_argument(f"--{name}", type=int, required=True)
    fd.add_argument("--radius", type=int, default=4)
    fd.add_argument("--lmax", type=int, default=12)
    fd.set_defaults(fn=cmd_fermi_discover)
    for sub in (fe, fc, fd):
        sub.add_argument("--json", action="store_true")

    vf = top.add_parser("verify", help="run an identity suite")
    vf.add_argument("--suite", default="default", help="suite JSON path, or 'default' for the bundled suite")
    vf.add_argument("--jobs", type=int, default=None, help="worker threads (overrides the suite)")
    vf.add_argument("--json", metavar="OUT", default=None, help="write the full report here")
    vf.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ModelError, sc.CharacterError, bailey.BaileyError, fermionic.FermionicError, QSeriesError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
