"""Hypothesis strategies for random q-series."""

from hypothesis import strategies as st

from qforms.series import QSeries

MODULI = (5, 7, 13, 25)


@st.composite
def series(draw, modulus=None, min_val=-3, max_val=3, max_len=30, coeff_bound=50, unit_lead=False):
    """Random QSeries; with ``modulus=None`` exact coefficients in [-bound, bound]."""
    v = draw(st.integers(min_val, max_val))
    n = draw(st.integers(1, max_len))
    if modulus is None:
        cs = draw(st.lists(st.integers(-coeff_bound, coeff_bound), min_size=n, max_size=n))
    else:
        cs = draw(st.lists(st.integers(0, modulus - 1), min_size=n, max_size=n))
    if unit_lead:
        if modulus is None:
            cs[0] = draw(st.sampled_from([1, -1]))
        else:
            cs[0] = draw(st.integers(1, modulus - 1).filter(lambda c: c % 5 and c % 7 and c % 13))
    return QSeries.from_list(cs, valuation=v, modulus=modulus)


@st.composite
def series_triple(draw, modulus=None):
    return draw(series(modulus)), draw(series(modulus)), draw(series(modulus))


moduli = st.sampled_from(MODULI)
