"""Square-class support, U_ell limit cycles, and the weight classification checks."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from math import isqrt
from typing import Optional

import numpy as np

from .errors import PrecisionExhausted, PrincipalPartNonzero
from .forms import theta
from .operators import u_op
from .series import QSeries, series_pow

__all__ = [
    "SquareClassReport",
    "CycleReport",
    "WeightBoundVerdict",
    "squarefree_parts",
    "square_class_support",
    "detect_theta_limit",
    "weight_congruence_check",
    "check_weight_bounds",
    "acr_class_check",
]


def squarefree_parts(n_max: int) -> np.ndarray:
    """Array ``s`` with ``s[n]`` the square-free part of ``n`` for ``0 <= n <= n_max``."""
    s = np.arange(n_max + 1, dtype=np.int64)
    for p in range(2, isqrt(n_max) + 1):
        pp = p * p
        idx = np.arange(pp, n_max + 1, pp)
        if idx.size == 0:
            break
        while idx.size:
            hit = idx[s[idx] % pp == 0]
            s[hit] //= pp
            idx = hit
    return s


def _is_squarefree(n: int) -> bool:
    return n > 0 and all(n % (p * p) for p in range(2, isqrt(n) + 1))


@dataclass(frozen=True)
class SquareClassReport:
    classes: tuple
    constant: int
    precision_window: int
    stable: bool
    modulus: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["classes"] = list(self.classes)
        d["caveat"] = "finite-window evidence; a finite expansion cannot prove square-class support"
        return d


def _classes(f: QSeries, window: int, sf: np.ndarray) -> set:
    return {int(sf[e]) for e, _ in f.items() if 0 < e < window}


def square_class_support(f: QSeries, ell: Optional[int] = None) -> SquareClassReport:
    """Square-free parts of the exponents carrying nonzero coefficients mod ell."""
    if ell is not None and f.modulus != ell:
        f = f.reduce(ell)
    if f.modulus is None:
        raise ValueError("square-class support is computed modulo ell; pass ell")
    if f.principal_part():
        raise PrincipalPartNonzero("principal part is nonzero modulo ell")
    window = f.precision
    sf = squarefree_parts(max(window - 1, 1))
    full = _classes(f, window, sf)
    quarter = _classes(f, window // 4, sf)
    return SquareClassReport(tuple(sorted(full)), f[0] if window > 0 else 0, window,
                             full == quarter, f.modulus)


@dataclass(frozen=True)
class CycleReport:
    converged: bool
    m_onset: Optional[int]
    limit_pair_verified: bool
    lambda_congruent: Optional[bool]
    coefficients_checked: int
    ell: int
    constant: int
    windows: tuple
    members: tuple  # per m: "theta", "theta^ell" or None
    theorem_violation: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["windows"] = list(self.windows)
        d["members"] = list(self.members)
        return d


def _match(it: QSeries, target: QSeries, window: int) -> bool:
    if it.principal_part():
        return False
    return {e: c for e, c in it.items() if e < window} == {e: c for e, c in target.items() if e < window}


def detect_theta_limit(f: QSeries, ell: int, max_m: int = 4, min_window: int = 20,
                       k2: Optional[int] = None) -> CycleReport:
    """Follow ``f | U_{ell^m} mod ell`` for ``m <= max_m`` and look for the pair
    ``{a(0) theta, a(0) theta^ell}``.

    Each iterate is read in a single pass from the source coefficients, so the
    window at step m is ``ceil(prec / ell^m)``.  ``k2`` (doubled weight of f)
    is optional and only feeds the ``lambda_congruent`` field.
    """
    if f.modulus != ell:
        f = f.reduce(ell)
    windows = [-((-f.precision) // ell ** m) for m in range(max_m + 1)]
    if windows[-1] < min_window:
        raise PrecisionExhausted(
            f"window at m={max_m} is {windows[-1]} < {min_window}; need source precision "
            f">= {min_window * ell ** max_m}")
    a0 = f[0]
    th = theta(windows[0], ell).series * a0
    th_ell = series_pow(theta(windows[0], ell).series, ell) * a0
    members = []
    for m in range(max_m + 1):
        it = u_op(f, ell ** m) if m else f
        w = windows[m]
        if a0 and _match(it, th, w):
            members.append("theta")
        elif a0 and _match(it, th_ell, w):
            members.append("theta^ell")
        else:
            members.append(None)
    onset = None
    for m in range(max_m + 1):
        if members[m] is None:
            continue
        tail = members[m:]
        if all(x is not None for x in tail) and all(tail[i] != tail[i + 1] for i in range(len(tail) - 1)):
            onset = m
            break
    converged = onset is not None and onset < max_m
    verified = converged and onset + 2 <= max_m
    lam_ok = None
    if k2 is not None and k2 % 2 == 1:
        lam_ok = weight_congruence_check((k2 - 1) // 2, ell)
    return CycleReport(
        converged=converged,
        m_onset=onset if converged else None,
        limit_pair_verified=verified,
        lambda_congruent=lam_ok,
        coefficients_checked=windows[-1],
        ell=ell,
        constant=a0,
        windows=tuple(windows),
        members=tuple(members),
        theorem_violation=bool(converged and lam_ok is False),
    )


def weight_congruence_check(lam: int, ell: int) -> bool:
    """lambda = 0 mod (ell-1)/2."""
    return lam % ((ell - 1) // 2) == 0


@dataclass(frozen=True)
class WeightBoundVerdict:
    case: int
    lam_bar: int
    iota: int
    lhs: int
    bound: Fraction
    allowed: bool

    def to_dict(self) -> dict:
        return {"case": self.case, "lam_bar": self.lam_bar, "iota": self.iota,
                "lhs": self.lhs, "bound": str(self.bound),
                "verdict": "allowed" if self.allowed else "forbidden"}


def check_weight_bounds(lam: int, ell: int, all_classes_divisible: bool) -> WeightBoundVerdict:
    """Weight bounds for square-class forms of weight lambda + 1/2 (lambda >= 2).

    With lambda = lam_bar + iota (ell-1), 0 <= lam_bar <= ell-2:
    case 1 (some class prime to ell):  lam_bar <= 2 iota + 1;
    case 2 (all divisible, lam_bar <= (ell-3)/2): lam_bar <= iota - (ell+1)/2;
    case 3 (all divisible, lam_bar >= (ell-1)/2): lam_bar <= iota + (ell-1)/2.
    """
    if lam < 2 or ell < 5:
        raise ValueError("bounds apply for lambda >= 2 and ell >= 5")
    iota, lam_bar = divmod(lam, ell - 1)
    if not all_classes_divisible:
        case, bound = 1, Fraction(2 * iota + 1)
    elif 2 * lam_bar <= ell - 3:
        case, bound = 2, Fraction(iota) - Fraction(ell + 1, 2)
    else:
        case, bound = 3, Fraction(iota) + Fraction(ell - 1, 2)
    return WeightBoundVerdict(case, lam_bar, iota, lam_bar, bound, lam_bar <= bound)


def acr_class_check(classes, ell: int) -> bool:
    """True iff every class lies in {1, 2, ell, 2 ell}."""
    allowed = {1, 2, ell, 2 * ell}
    classes = set(classes)
    for d in classes:
        if not _is_squarefree(d):
            raise ValueError(f"class {d} is not square-free")
    return classes <= allowed
