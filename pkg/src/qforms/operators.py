"""U_p, V_p and the theta operator q d/dq on q-series."""

from __future__ import annotations

from typing import Optional

from .errors import PrecisionExhausted
from .forms import HalfWeight, NamedForm, eisenstein, eisenstein_constant, sigma_table, theta
from .series import QSeries, series_mul, series_pow

__all__ = ["u_op", "v_op", "theta_op", "u_iterate", "theta_cuspform_combination"]


def _ceil_div(a, b):
    return -((-a) // b)


def u_op(f: QSeries, p: int) -> QSeries:
    """``sum a(n) q^n -> sum a(p n) q^n``."""
    if p < 1:
        raise ValueError("p must be positive")
    prec = _ceil_div(f.precision, p)
    return QSeries._raw({e // p: c for e, c in f.items() if e % p == 0}, prec, f.modulus)


def v_op(f: QSeries, p: int) -> QSeries:
    """``sum a(n) q^n -> sum a(n) q^{p n}``."""
    if p < 1:
        raise ValueError("p must be positive")
    prec = p * (f.precision - 1) + 1
    return QSeries._raw({e * p: c for e, c in f.items()}, prec, f.modulus)


def theta_op(f: QSeries) -> QSeries:
    """``sum a(n) q^n -> sum n a(n) q^n``."""
    return f.map_coefficients(lambda e, c: e * c)


def u_iterate(f: QSeries, ell: int, m: int) -> QSeries:
    """``f | U_{ell^m}`` read in one pass from the source coefficients.

    Raises :class:`PrecisionExhausted` if fewer than two coefficients of the
    result would be known.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if m == 0:
        return f
    step = ell ** m
    out = u_op(f, step)
    if out.precision < 2:
        raise PrecisionExhausted(
            f"U_{ell}^{m} of a series known to q^{f.precision} leaves precision {out.precision}")
    return out


def theta_cuspform_combination(ell: int, prec: int, modulus: Optional[int] = None) -> NamedForm:
    """``(ell-1) Theta(theta^3) E_{ell-1} - (3/2) Theta(E_{ell-1}) theta^3``.

    With ``modulus`` the combination itself is returned (the 1/2 is inverted in
    the residue ring).  Without it, the result is scaled by ``2 * D`` where D
    clears the denominator of E_{ell-1}, and ``scale`` records that factor.
    """
    if ell < 5:
        raise ValueError("ell must be a prime >= 5")
    k = ell - 1
    th3 = series_pow(theta(prec, modulus).series, 3)
    if modulus is not None:
        e = eisenstein(k, prec, modulus).series
        half = pow(2, -1, modulus)
        combo = (series_mul(theta_op(th3), e) * (ell - 1)
                 - series_mul(theta_op(e), th3) * (3 * half % modulus))
        return NamedForm(combo, HalfWeight(2 * (ell + 1) + 3), f"cusp-combination[{ell}]")
    den = eisenstein_constant(k).denominator
    # den * E_k has integer coefficients
    num = eisenstein_constant(k).numerator
    sig = sigma_table(k - 1, max(prec - 1, 0))
    e_scaled = QSeries({0: den, **{n: num * sig[n] for n in range(1, prec)}}, prec)
    combo = (series_mul(theta_op(th3), e_scaled) * (2 * (ell - 1))
             - series_mul(theta_op(e_scaled), th3) * 3)
    return NamedForm(combo, HalfWeight(2 * (ell + 1) + 3), f"cusp-combination[{ell}]", scale=2 * den)
