"""N=2 vacuum characters, their Bailey flows, and spectral flow to the Ramond sector.

Run with ``python3 demos/n2_spectral_flow.py``.
"""

from baileyflow import superconformal as sc
from baileyflow.bivariate import z_first_mismatch

p, pp, order = 3, 5, 12

emb = sc.n2_ns_vacuum(p, pp, "embedding", order)
prod = sc.n2_ns_vacuum(p, pp, "product", order)
print(f"c = {prod.central_charge}")
print("embedding and product forms agree:", z_first_mismatch(emb.body, prod.body) is None)
print("at z = 1:", prod.body.set_z_one().truncate(4))

ns = sc.n2_flow_lhs(p, pp, "NS", order)
print("NS Bailey flow reproduces the vacuum:", z_first_mismatch(ns, prod.body) is None)

# Half a unit of spectral flow needs a few extra orders, since shifting z costs q-horizon.
flowed = sc.spectral_flow_half(sc.n2_ns_vacuum(p, pp, "product", order + 7))
ram = sc.n2_r_vacuum(p, pp, order)
print("\nflowed prefactor:", flowed.prefactor, " Ramond prefactor:", ram.prefactor)
print("flowed body equals the Ramond body:", z_first_mismatch(flowed.body, ram.body, through=order) is None)
print("R Bailey flow reproduces it too:", z_first_mismatch(sc.n2_flow_lhs(p, pp, "R", order), ram.body) is None)
print("Ramond at z = 1:", ram.body.set_z_one().truncate(4))
