"""Bailey pairs built from minimal-model bosonic polynomials.

Run with ``python3 demos/bailey_pairs.py``.
"""

from baileyflow import bailey
from baileyflow.minimal_model import decompose, r_of_b
from baileyflow.qseries import first_mismatch

# The unit pair: alpha_0 = 1 and nothing else. Sending both lemma
# parameters to infinity leaves sum q^{n^2}/(q)_n^2, the partition generating function.
lhs, rhs = bailey.lemma_sides(bailey.unit_pair(), "inf_inf", 12)
print("unit pair, both limits:", lhs)
print("partition numbers agree:", first_mismatch(lhs, rhs) is None)

# A pair from M(3,5) with b = s = 1.
p, pp, b, s = 3, 5, 1, 1
r = r_of_b(decompose(p, pp), b)
pair = bailey.mpp_pair(p, pp, r, s, b)
print(f"\nM({p},{pp}) pair, r = {r}")
for n in (-1, 0, 5):
    print(f"  alpha_{n} =", pair.alpha_at(n))
for n in range(4):
    beta = bailey.beta_from_alpha(pair, n, 12)
    same = first_mismatch(beta, pair.beta_bosonic(n, 12)) is None
    print(f"  beta_{n} = {beta}   equals bosonic form: {same}")

# Its dual, obtained by inverting q, against the closed-form dual family.
fams = bailey.alpha_mpp(p, pp, r, s, b, 0)
dual = bailey.dualize_alpha(fams, b - s)
print("\ndualised families equal the closed-form dual:",
      bailey.families_equal(dual, bailey.alpha_mpp_dual(p, pp, r, s, b, 0)))
