"""q-expansions of the named forms on Gamma_0(4) used throughout the package.

Builders return :class:`NamedForm` records (series + doubled weight + label).
All of them accept an optional ``modulus`` so that long expansions can be run
entirely in residue arithmetic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import Optional

from .errors import BadOffset, BadWeight, CrossCheckFailed, NonIntegral, QFormsError
from .series import QSeries, series_invert, series_mul, series_pow

__all__ = [
    "HalfWeight",
    "NamedForm",
    "EtaQuotientSpec",
    "theta",
    "theta_alt",
    "weight2_F",
    "bernoulli",
    "sigma_table",
    "eisenstein",
    "euler_product",
    "eta_quotient",
    "ord_at_cusps_gamma04",
    "delta",
    "jay",
    "hauptmodul",
    "zagier_trace_form",
    "G_SPEC",
    "HAUPTMODUL_SPEC",
]


@dataclass(frozen=True, order=True)
class HalfWeight:
    """Weight stored doubled: ``k2 = 2*weight``."""

    k2: int

    @property
    def weight(self) -> Fraction:
        return Fraction(self.k2, 2)

    @property
    def is_half_integral(self) -> bool:
        return self.k2 % 2 == 1

    @property
    def lam(self) -> int:
        """lambda in weight lambda + 1/2 (half-integral weights only)."""
        if not self.is_half_integral:
            raise BadWeight(f"weight {self.weight} is integral")
        return (self.k2 - 1) // 2

    def __str__(self):
        w = self.weight
        return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/2"


@dataclass(frozen=True)
class NamedForm:
    series: QSeries
    weight: HalfWeight
    label: str
    # the series equals ``scale`` times the form named by ``label``
    scale: int = 1
    flags: tuple = field(default=())

    @property
    def k2(self) -> int:
        return self.weight.k2


# ---------------------------------------------------------------------------
# theta functions and the weight-2 generator
# ---------------------------------------------------------------------------

def _theta_series(prec, modulus, alternating):
    coeffs = {0: 1} if prec > 0 else {}
    n = 1
    while n * n < prec:
        coeffs[n * n] = -2 if (alternating and n % 2) else 2
        n += 1
    return QSeries(coeffs, prec, modulus)


def theta(prec: int, modulus: Optional[int] = None) -> NamedForm:
    """Jacobi theta function ``sum_{n in Z} q^{n^2}``, weight 1/2."""
    return NamedForm(_theta_series(prec, modulus, False), HalfWeight(1), "theta")


def theta_alt(prec: int, modulus: Optional[int] = None) -> QSeries:
    """``sum_{n in Z} (-1)^n q^{n^2}``."""
    return _theta_series(prec, modulus, True)


def sigma_table(k: int, n_max: int) -> list:
    """``[sigma_k(0)=0, sigma_k(1), ..., sigma_k(n_max)]`` by a divisor sieve."""
    table = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        dk = d ** k
        for m in range(d, n_max + 1, d):
            table[m] += dk
    return table


def weight2_F(prec: int, modulus: Optional[int] = None) -> NamedForm:
    """``F = sum_{n odd} sigma_1(n) q^n``, the weight-2 generator on Gamma_0(4)."""
    sig = sigma_table(1, max(prec - 1, 0))
    coeffs = {n: sig[n] for n in range(1, prec, 2)}
    return NamedForm(QSeries(coeffs, prec, modulus), HalfWeight(4), "F")


# ---------------------------------------------------------------------------
# Eisenstein series
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """Bernoulli number B_k (B_1 = -1/2) from sum_{j<=k} C(k+1, j) B_j = 0."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return Fraction(1)
    if k > 1 and k % 2:
        return Fraction(0)
    s = sum(comb(k + 1, j) * bernoulli(j) for j in range(k))
    return -s / (k + 1)


def eisenstein_constant(k: int) -> Fraction:
    """The factor ``-2k/B_k`` multiplying sum sigma_{k-1}(n) q^n in E_k."""
    return Fraction(-2 * k) / bernoulli(k)


def _to_ring(c: Fraction, modulus, what):
    if modulus is None:
        if c.denominator != 1:
            raise NonIntegral(f"{what} has non-integral constant {c}")
        return c.numerator
    if gcd(c.denominator, modulus) != 1:
        raise NonIntegral(f"{what}: denominator {c.denominator} not invertible modulo {modulus}")
    return c.numerator * pow(c.denominator, -1, modulus) % modulus


def eisenstein(k: int, prec: int, modulus: Optional[int] = None) -> NamedForm:
    """Normalized level-one Eisenstein series E_k (k >= 4 even)."""
    if k < 4 or k % 2:
        raise BadWeight(f"E_k needs even k >= 4, got {k}")
    c = _to_ring(eisenstein_constant(k), modulus, f"E_{k}")
    sig = sigma_table(k - 1, max(prec - 1, 0))
    coeffs = {0: 1}
    for n in range(1, prec):
        coeffs[n] = c * sig[n]
    return NamedForm(QSeries(coeffs, prec, modulus), HalfWeight(2 * k), f"E{k}")


# ---------------------------------------------------------------------------
# eta quotients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EtaQuotientSpec:
    """``prod_delta eta(delta z)^{r_delta}`` as a tuple of ``(delta, r_delta)``."""

    factors: tuple

    def __post_init__(self):
        merged = {}
        for delta, r in self.factors:
            delta, r = int(delta), int(r)
            if delta < 1:
                raise QFormsError(f"eta scale must be positive, got {delta}")
            merged[delta] = merged.get(delta, 0) + r
        object.__setattr__(self, "factors", tuple(sorted((d, r) for d, r in merged.items() if r)))

    @classmethod
    def parse(cls, text: str) -> "EtaQuotientSpec":
        """Parse ``"1^8,4^16,2^-24"``."""
        factors = []
        for part in text.split(","):
            m = re.fullmatch(r"\s*(\d+)\^(-?\d+)\s*", part)
            if not m:
                raise QFormsError(f"bad eta factor {part!r}; expected delta^exp")
            factors.append((int(m.group(1)), int(m.group(2))))
        return cls(tuple(factors))

    @property
    def k2(self) -> int:
        return sum(r for _, r in self.factors)

    def offset_numerator(self) -> int:
        return sum(d * r for d, r in self.factors)

    @property
    def offset(self) -> int:
        num = self.offset_numerator()
        if num % 24:
            raise BadOffset(f"sum delta*r = {num} is not divisible by 24")
        return num // 24

    def __str__(self):
        return ",".join(f"{d}^{r}" for d, r in self.factors)


G_SPEC = EtaQuotientSpec(((1, 8), (4, 16), (2, -24)))
HAUPTMODUL_SPEC = EtaQuotientSpec(((1, 8), (4, -8)))


def euler_product(prec: int, step: int = 1, modulus: Optional[int] = None) -> QSeries:
    """``prod_{n>=1} (1 - q^{step*n})`` via the pentagonal number theorem."""
    coeffs = {0: 1}
    k = 1
    while True:
        e1 = step * k * (3 * k - 1) // 2
        if e1 >= prec:
            break
        sign = -1 if k % 2 else 1
        coeffs[e1] = sign
        e2 = step * k * (3 * k + 1) // 2
        if e2 < prec:
            coeffs[e2] = sign
        k += 1
    return QSeries(coeffs, prec, modulus)


def eta_quotient(spec: EtaQuotientSpec, prec: int, modulus: Optional[int] = None) -> NamedForm:
    """q-expansion of an eta quotient to absolute precision ``prec``."""
    offset = spec.offset
    rel = prec - offset
    if rel <= 0:
        return NamedForm(QSeries({}, prec, modulus), HalfWeight(spec.k2), f"eta[{spec}]")
    acc = QSeries.constant(1, rel, modulus)
    for delta, r in spec.factors:
        acc = series_mul(acc, series_pow(euler_product(rel, delta, modulus), r))
    return NamedForm(acc.shift(offset), HalfWeight(spec.k2), f"eta[{spec}]")


_GAMMA04_CUSPS = (("inf", 4), ("0", 1), ("1/2", 2))


def _ligozat_gamma04(spec):
    n = 4
    orders = {}
    for name, d in _GAMMA04_CUSPS:
        s = Fraction(0)
        for delta, r in spec.factors:
            s += Fraction(gcd(d, delta) ** 2 * r, gcd(d, n // d) * d * delta)
        orders[name] = Fraction(n, 24) * s
    return orders


_calibrated = False


def _calibrate_ligozat():
    # The cusp formula must reproduce the leading exponent read off the
    # expansion of g, and the valence sum (index 6, so k/2) for test quotients.
    global _calibrated
    if _calibrated:
        return
    g_orders = _ligozat_gamma04(G_SPEC)
    read_off = eta_quotient(G_SPEC, 8).series.valuation
    if g_orders["inf"] != read_off:
        raise CrossCheckFailed(f"cusp normalization gives ord_inf {g_orders['inf']}, expansion gives {read_off}")
    for spec in (G_SPEC, HAUPTMODUL_SPEC, EtaQuotientSpec(((2, 12),)), EtaQuotientSpec(((1, 24),))):
        total = sum(_ligozat_gamma04(spec).values())
        if total != Fraction(spec.k2, 4):
            raise CrossCheckFailed(f"valence sum {total} != {Fraction(spec.k2, 4)} for eta[{spec}]")
    _calibrated = True


def ord_at_cusps_gamma04(spec: EtaQuotientSpec) -> dict:
    """Orders (in local parameters) at the cusps ``inf``, ``0``, ``1/2`` of Gamma_0(4)."""
    spec.offset  # raises BadOffset
    if any(4 % delta for delta, _ in spec.factors):
        raise QFormsError(f"cusp bookkeeping needs every delta to divide 4: {spec}")
    _calibrate_ligozat()
    return _ligozat_gamma04(spec)


def hauptmodul(prec: int, modulus: Optional[int] = None) -> NamedForm:
    """``eta(z)^8 / eta(4z)^8 = q^-1 - 8 + 20q - ...``, weight 0."""
    form = eta_quotient(HAUPTMODUL_SPEC, prec, modulus)
    return NamedForm(form.series, form.weight, "hauptmodul")


# ---------------------------------------------------------------------------
# level one: Delta and j
# ---------------------------------------------------------------------------

def delta(prec: int, modulus: Optional[int] = None) -> NamedForm:
    """``Delta = (E4^3 - E6^2)/1728``."""
    if modulus is not None and gcd(modulus, 1728) != 1:
        exact = delta(prec).series
        return NamedForm(exact.reduce(modulus), HalfWeight(24), "Delta")
    e4 = eisenstein(4, prec, modulus).series
    e6 = eisenstein(6, prec, modulus).series
    d = (series_pow(e4, 3) - series_pow(e6, 2)).exact_div(1728)
    return NamedForm(d, HalfWeight(24), "Delta")


def jay(prec: int, modulus: Optional[int] = None) -> NamedForm:
    """Klein's j-invariant ``E4^3/Delta = q^-1 + 744 + 196884 q + ...``."""
    p = prec + 2
    if modulus is not None and gcd(modulus, 1728) != 1:
        return NamedForm(jay(prec).series.reduce(modulus), HalfWeight(0), "j")
    e4 = eisenstein(4, p, modulus).series
    j = series_mul(series_pow(e4, 3), series_invert(delta(p, modulus).series))
    return NamedForm(j.truncate(prec), HalfWeight(0), "j")


# ---------------------------------------------------------------------------
# weight 3/2 generating function of traces of singular moduli
# ---------------------------------------------------------------------------

def _dilate(s: QSeries, p: int, precision: int) -> QSeries:
    return QSeries({p * e: c for e, c in s.items()}, precision, s.modulus)


def _zagier_formula(prec, modulus):
    # theta_alt(z) E4(4z) / eta(4z)^6 ; eta(4z)^6 = q * prod(1 - q^{4n})^6
    inner = prec + 1
    rel = -(-inner // 4)
    e4 = eisenstein(4, rel, modulus).series
    etainv = series_pow(euler_product(rel, 1, modulus), -6)
    quarter = series_mul(e4, etainv)
    lifted = _dilate(quarter, 4, inner)
    return series_mul(theta_alt(inner, modulus), lifted).shift(-1)


@lru_cache(maxsize=8)
def _oracle_coefficients(d_max):
    from .singular_moduli import trace_oracle

    return {d: -trace_oracle(d).t for d in range(3, d_max + 1) if d % 4 in (0, 3)}


@lru_cache(maxsize=8)
def _formula_mismatch(d_max):
    """First d <= d_max where the formula disagrees with the oracle, else None."""
    exact = _zagier_formula(d_max + 1, None)
    oracle = _oracle_coefficients(d_max)
    if exact[-1] != 1 or exact[0] != -2:
        return 0
    for d in range(1, d_max + 1):
        if exact[d] != oracle.get(d, 0):
            return d
    return None


def zagier_trace_form(prec: int, modulus: Optional[int] = None, cross_check: bool = True,
                      fallback: bool = False, check_limit: int = 300) -> NamedForm:
    """``q^-1 - 2 - sum_{d>0} t(d) q^d``, weight 3/2.

    Built as ``theta_alt(z) E4(4z) / eta(4z)^6`` and checked against the
    quadratic-form trace oracle for all ``d <= check_limit``.  On mismatch
    this raises :class:`CrossCheckFailed` unless ``fallback`` is set, in which
    case the series is tabulated from the oracle and flagged.
    """
    if prec < 1:
        raise QFormsError("prec must be >= 1")
    flags = ()
    if cross_check:
        bad = _formula_mismatch(check_limit)
        if bad is not None:
            if not fallback:
                raise CrossCheckFailed(f"Zagier form formula disagrees with trace oracle at d={bad}", d=bad)
            from .singular_moduli import trace_oracle

            coeffs = {-1: 1, 0: -2}
            for d in range(3, prec):
                if d % 4 in (0, 3):
                    coeffs[d] = -trace_oracle(d).t
            return NamedForm(QSeries(coeffs, prec, modulus), HalfWeight(3), "zagier[oracle]",
                             flags=("formula-path-rejected",))
        flags = (f"oracle-checked<= {check_limit}",)
    return NamedForm(_zagier_formula(prec, modulus), HalfWeight(3), "zagier", flags=flags)

