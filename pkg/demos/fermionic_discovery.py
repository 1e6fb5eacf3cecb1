"""Searching for fermionic sums that reproduce bosonic polynomials.

Run with ``python3 demos/fermionic_discovery.py``.
"""

from baileyflow import fermionic as fm
from baileyflow import superconformal as sc
from baileyflow.minimal_model import bose_poly, decompose
from baileyflow.qseries import first_mismatch

rep = fm.discover(decompose(2, 3), 1, 1, radius=4, Lmax=12)
print(f"M(2,3): {len(rep.found)} system(s) found, exhausted={rep.exhausted}")
sys = rep.found[0]
print("ground term (constant, L, L^2 coefficients):", ", ".join(str(x) for x in sys.ground))
for L in (0, 2, 4):
    print(f"  L={L}: fermionic {fm.fermi_eval(sys, L)}  bosonic {bose_poly(2, 3, 0, 1, 1, L)}")

ext = fm.extend_system(sys, "n2ns")
char = fm.fermi_char(ext, 10)
want = sc.n2_ns_vacuum(2, 3, "product", 10).body.set_z_one()
print("\nn2ns extension, L to infinity:", char.truncate(4))
print("equals the N=2 vacuum at z=1:", first_mismatch(char, want) is None)

big = fm.discover(decompose(3, 5), 1, 1, radius=4, Lmax=12)
print(f"\nM(3,5): found {len(big.found)}, exhausted={big.exhausted}, searched {big.searched}")
