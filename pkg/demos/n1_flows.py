"""Flowing Virasoro polynomial identities to N=1 superconformal characters.

Run with ``python3 demos/n1_flows.py``.
"""

from baileyflow import superconformal as sc
from baileyflow.bailey import calibrate

ORDER = 30

cases = [
    ((3, 5, 1, 1, False), (5, 11, 1, 1)),
    ((2, 3, 1, 1, False), (3, 7, 1, 1)),
    ((5, 7, 2, 1, False), (7, 17, 1, 4)),
    ((3, 5, 1, 1, True), (5, 9, 1, 3)),
    ((5, 7, 2, 1, True), (7, 11, 1, 4)),
]

for (p, pp, b, s, dual), target in cases:
    lhs = sc.n1_flow_lhs(p, pp, b, s, dual, ORDER)
    chi = sc.n1_character(*target, ORDER)
    rep = calibrate(lhs, chi.body)
    kind = "dual flow" if dual else "flow"
    print(f"M({p},{pp}) b={b} s={s} {kind} -> SM{target[:2]} ({target[2]},{target[3]}) {chi.sector}: "
          f"match={rep.match} shift={rep.shift} through q^{rep.horizon}")

chi = sc.n1_character(5, 11, 1, 1, 6)
print("\nSM(5,11) vacuum body:", chi.body)
print("central charge:", chi.central_charge)
