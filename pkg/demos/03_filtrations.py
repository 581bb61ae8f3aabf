"""Mod-ell filtrations and randomized checks of the filtration laws."""

import random

from qforms.filtration import filtration, random_form, sturm_precision, verify_filtration_props
from qforms.forms import eisenstein, theta
from qforms.operators import u_op
from qforms.series import series_mul, series_pow

ell = 5
p = sturm_precision(40)
t = theta(p, ell).series
e = eisenstein(ell - 1, p, ell).series

for label, f, k2 in [("E_4", e, 8), ("theta E_4", series_mul(t, e), 9),
                     ("theta^5", series_pow(t, 5), 5), ("theta^3 E_4^2", series_mul(series_pow(t, 3), e * e), 19)]:
    r = filtration(f, k2, ell)
    print(f"{label:14s} stated weight {k2}/2  filtration {r.omega}  chain {r.candidate_chain}")

# a random weight-12 form whose filtration really is 12, and the drop under U_5
rng = random.Random(1)
while True:
    f, _, _ = random_form(rng, ell, 24, ell * sturm_precision(24))
    if filtration(f, 24, ell).omega2 == 24:
        break
print("omega(f) =", filtration(f, 24, ell).omega, " omega(f|U_5) =", filtration(u_op(f, ell), 24, ell).omega)

rep = verify_filtration_props(ell, sample_count=30, seed=0)
for name, law in rep["laws"].items():
    print(f"{name:18s} checked {law['checked']:3d} failed {law['failed']}")
