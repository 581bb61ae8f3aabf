"""Building q-expansions: theta, Eisenstein series, eta quotients and j."""

from qforms.forms import (EtaQuotientSpec, G_SPEC, eisenstein, eta_quotient, hauptmodul, jay,
                          ord_at_cusps_gamma04, theta, weight2_F)
from qforms.series import series_invert, series_pow

# theta and its square: the coefficients of theta^2 count representations as x^2 + y^2
th = theta(30).series
print("theta      ", th)
print("theta^2    ", series_pow(th, 2).truncate(12))

# the weight-2 generator of the graded ring on Gamma_0(4)
print("F          ", weight2_F(12).series)

# Eisenstein series, exact and reduced; E_{ell-1} collapses to 1 mod ell
print("E4         ", eisenstein(4, 5).series)
print("E6 mod 7   ", eisenstein(6, 40, 7).series)

# eta quotients on Gamma_0(4) and their orders at the three cusps
g = eta_quotient(G_SPEC, 10)
print("g          ", g.series, " k2 =", g.weight.k2)
print("cusp orders", {k: str(v) for k, v in ord_at_cusps_gamma04(G_SPEC).items()})
print("hauptmodul ", hauptmodul(6).series)
print("1^24       ", eta_quotient(EtaQuotientSpec.parse("1^24"), 5).series)

# j = E4^3 / Delta, and the partition function as 1 / prod(1 - q^n)
print("j          ", jay(3).series)
from qforms.forms import euler_product  # noqa: E402
print("partitions ", series_invert(euler_product(12)))
