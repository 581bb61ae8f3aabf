"""q-series arithmetic, modular forms on Gamma_0(4), mod-ell filtrations,
theta cycles and traces of singular moduli."""

from .errors import *  # noqa: F401,F403
from .series import QSeries, reduce_mod, series_add, series_equal_upto, series_invert, series_mul, series_pow
from .forms import (EtaQuotientSpec, HalfWeight, NamedForm, delta, eisenstein, eta_quotient,
                    hauptmodul, jay, ord_at_cusps_gamma04, theta, weight2_F, zagier_trace_form)
from .operators import theta_cuspform_combination, theta_op, u_iterate, u_op, v_op
from .filtration import FiltrationResult, filtration, is_congruent_to_weight, verify_filtration_props
from .theta_cycle import (check_weight_bounds, detect_theta_limit, square_class_support,
                          weight_congruence_check)
from .singular_moduli import reduced_forms, trace_oracle, trace_singular_moduli, trace_table
from .stats import residue_counts, treneer_split, well_distribution_scan

__version__ = "0.1.0"
