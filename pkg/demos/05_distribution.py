"""Residue-class counts of t(d) modulo 5 and 7, and the Treneer-type split."""

from qforms.forms import theta, zagier_trace_form
from qforms.stats import residue_counts, trace_stream, treneer_split, well_distribution_scan

for ell in (5, 7):
    z = zagier_trace_form(20001, ell).series
    rep = residue_counts(trace_stream(z, 20000), ell, (2500, 5000, 10000, 20000))
    print(f"mod {ell}: counts at X=20000", {r: c[-1] for r, c in rep.counts.items()})
    print("        verdicts", rep.verdicts)

# theta is far from well distributed: residues 3 and 4 never occur
rep = well_distribution_scan(theta(50001).series, 5, 1)
print("theta mod 5 verdicts", rep.verdicts)

# sum over n prime to 5 of a(5 n) q^n, modulo 25
print(treneer_split(zagier_trace_form(400).series, 5, 1, 2).truncate(20))
