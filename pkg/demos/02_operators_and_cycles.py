"""U_ell, V_ell, Theta and the eventual theta cycle of U_ell iterates."""

from qforms.forms import eisenstein, theta, zagier_trace_form
from qforms.operators import theta_cuspform_combination, theta_op, u_iterate, u_op, v_op
from qforms.series import series_mul, series_pow
from qforms.theta_cycle import detect_theta_limit, square_class_support

ell = 5
prec = 20 * ell ** 3
t = theta(prec, ell).series

# theta|U_ell and theta^ell agree mod ell; U_ell sends theta^ell back to theta
print("theta|U_5  ", u_op(t, ell).truncate(50))
print("theta^5    ", series_pow(t, ell).truncate(50))
print("V_5 theta  ", v_op(theta(8).series, 5))

# Theta(theta^3) and the cusp-form combination built from it
print("Theta(theta^3)", theta_op(series_pow(theta(6).series, 3)))
combo = theta_cuspform_combination(ell, 10)
print("combination x", combo.scale, combo.series)

# theta * E_4 begins the cycle at m = 0; the trace form (lambda = 1) never joins it
f = series_mul(t, eisenstein(ell - 1, prec, ell).series)
print(detect_theta_limit(f, ell, max_m=3, k2=2 * ell - 1).to_dict())
z = zagier_trace_form(prec, ell).series
rep = detect_theta_limit(z, ell, max_m=3, k2=3)
print("zagier converged:", rep.converged, "lambda congruent:", rep.lambda_congruent)

# square classes: one class for theta^5, many for the trace form after U_5
print("theta^5 classes", square_class_support(series_pow(t, ell)).classes)
zu = square_class_support(u_iterate(zagier_trace_form(2000 * ell, ell).series, ell, 1))
print("zagier|U_5 classes:", len(zu.classes), "stable:", zu.stable)
