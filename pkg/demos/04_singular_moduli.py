"""Traces of singular moduli: the quadratic-form oracle against the generating series."""

from qforms.forms import zagier_trace_form
from qforms.singular_moduli import reduced_forms, trace_oracle, trace_table

for d in (3, 4, 7, 8, 12, 15, 23):
    r = trace_oracle(d)
    forms = ", ".join(f"({q.a},{q.b},{q.c})" for q in reduced_forms(d))
    print(f"d={d:3d}  t={r.t:>14d}  h={r.class_count}  margin={r.max_rounding_error:.1e}  [{forms}]")

z = zagier_trace_form(40).series
print("generating series:", z.truncate(16))

tab = trace_table(2000, modulus=5)
print("t(d) mod 5 for d <= 40:", {d: t for d, t in tab.items() if d <= 40})
