"""Traces of singular moduli by brute force over reduced quadratic forms.

This is deliberately independent of the weight-3/2 generating function: it
enumerates SL_2(Z)-classes of positive definite forms of discriminant -d
(imprimitive ones included), evaluates J = j - 744 at each CM point with
mpmath, and rounds the stabilizer-weighted sum.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from math import ceil, isqrt, sqrt
from typing import Optional

import mpmath

from .errors import BadDiscriminant, CrossCheckFailed, RoundingGuard

__all__ = [
    "ReducedForm",
    "TraceResult",
    "reduced_forms",
    "reduce_form",
    "omega_q",
    "trace_singular_moduli",
    "trace_table",
    "J_TERMS",
]

J_TERMS = 100
ROUNDING_GUARD = 0.25


@dataclass(frozen=True, order=True)
class ReducedForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if self.discriminant >= 0 or a <= 0:
            return False
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True


@dataclass(frozen=True)
class TraceResult:
    d: int
    t: int
    class_count: int
    max_rounding_error: float


def _check_discriminant(d):
    if d <= 0 or d % 4 not in (0, 3):
        raise BadDiscriminant(f"d={d} must be positive with d = 0 or 3 (mod 4)")


def reduced_forms(d: int) -> list:
    """One reduced representative per SL_2(Z)-class of forms of discriminant -d."""
    _check_discriminant(d)
    forms = []
    bmax = isqrt(d // 3)
    for b in range(-bmax, bmax + 1):
        if (b - d) % 2:
            continue
        ac = (b * b + d) // 4
        a = max(abs(b), 1)
        while a * a <= ac:
            if ac % a == 0:
                f = ReducedForm(a, b, ac // a)
                if f.is_reduced():
                    forms.append(f)
            a += 1
    return sorted(forms)


def reduce_form(a: int, b: int, c: int) -> ReducedForm:
    """Reduce a positive definite form by the usual normalize/swap steps."""
    if b * b - 4 * a * c >= 0 or a <= 0:
        raise BadDiscriminant("form is not positive definite")
    while True:
        # normalize: -a < b <= a
        if not (-a < b <= a):
            k = (a - b) // (2 * a)
            b, c = b + 2 * k * a, a * k * k + b * k + c
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return ReducedForm(a, b, c)


def omega_q(f: ReducedForm) -> int:
    """Order of the stabilizer of the CM point in PSL_2(Z)."""
    if f.a == f.b == f.c:
        return 3
    if f.b == 0 and f.a == f.c:
        return 2
    return 1


@lru_cache(maxsize=1)
def _j_coefficients():
    from .forms import jay

    s = jay(J_TERMS - 1).series
    return tuple(s[n] for n in range(-1, J_TERMS - 1))


def default_bits(d: int) -> int:
    return ceil(4.54 * sqrt(d)) + 128


def _j_at(f: ReducedForm, coeffs):
    # alpha = (-b + i sqrt(d)) / (2a);  q = exp(2 pi i alpha)
    d = -f.discriminant
    alpha = mpmath.mpc(-f.b, mpmath.sqrt(d)) / (2 * f.a)
    q = mpmath.exp(2j * mpmath.pi * alpha)
    acc = mpmath.mpc(0)
    for c in reversed(coeffs[1:]):  # Horner over exponents 0..T-2
        acc = acc * q + c
    return acc + coeffs[0] / q


def trace_singular_moduli(d: int, bits: Optional[int] = None) -> TraceResult:
    """t(d) = sum over classes of J(alpha_Q)/omega_Q, rounded to an integer."""
    _check_discriminant(d)
    if bits is None:
        bits = default_bits(d)
    forms = reduced_forms(d)
    coeffs = _j_coefficients()
    with mpmath.workprec(bits):
        total = mpmath.mpc(0)
        for f in forms:
            # weight J/omega as (6/omega) J, divided by 6 at the end
            total += (6 // omega_q(f)) * (_j_at(f, coeffs) - 744)
        value = total / 6
        t = int(mpmath.nint(value.real))
        err = float(max(abs(value.real - t), abs(value.imag)))
    if err >= ROUNDING_GUARD:
        raise RoundingGuard(f"t({d}) not resolved at {bits} bits (distance {err})", d=d, error=err)
    return TraceResult(d=d, t=t, class_count=len(forms), max_rounding_error=err)


@lru_cache(maxsize=None)
def _trace_cached(d: int) -> TraceResult:
    bits = default_bits(d)
    for _ in range(4):
        try:
            return trace_singular_moduli(d, bits)
        except RoundingGuard:
            bits *= 2
    return trace_singular_moduli(d, bits)


def trace_oracle(d: int) -> TraceResult:
    """Oracle value for t(d), retrying with doubled precision on a rounding guard."""
    return _trace_cached(d)


def oracle_sample(d_max: int, check_all: bool = False) -> list:
    """Discriminants checked against the oracle: all d <= 300 plus every 500th d."""
    ds = [d for d in range(3, min(d_max, 300) + 1) if d % 4 in (0, 3)]
    if check_all:
        ds = [d for d in range(3, d_max + 1) if d % 4 in (0, 3)]
    else:
        ds += [d for d in range(500, d_max + 1, 500) if d % 4 in (0, 3)]
    return ds


def _oracle_t(d):
    return d, trace_oracle(d).t


def trace_table(d_max: int, modulus: Optional[int] = None, check_all: bool = False,
                jobs: int = 1) -> dict:
    """Map d -> t(d) (or t(d) mod ``modulus``) for valid d <= d_max.

    Values come from the weight-3/2 generating function; a deterministic
    sample is recomputed with the quadratic-form oracle.
    """
    from .forms import zagier_trace_form

    if d_max < 3:
        raise BadDiscriminant("d_max must be >= 3")
    series = zagier_trace_form(d_max + 1, modulus).series
    table = {}
    for d in range(3, d_max + 1):
        if d % 4 in (0, 3):
            t = -series[d]
            table[d] = t % modulus if modulus is not None else t
    sample = oracle_sample(d_max, check_all)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(_oracle_t, sample, chunksize=8))
    else:
        results = dict(map(_oracle_t, sample))
    for d in sample:
        t = results[d]
        if modulus is not None:
            t %= modulus
        if table[d] != t:
            raise CrossCheckFailed(f"trace table disagrees with oracle at d={d}", d=d)
    return table
