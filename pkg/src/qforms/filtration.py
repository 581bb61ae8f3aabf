"""Mod-ell filtrations on Gamma_0(4).

The graded ring of holomorphic forms on Gamma_0(4) (half-integral weights
with the theta multiplier included) is taken to be Z[theta, F] with theta of
weight 1/2 and F of weight 2.  Each monomial theta^a F^b starts with q^b, so
the monomials of a fixed weight are unitriangular and give a Z-basis of the
integral forms; this is re-verified (rank check) every time a basis is used.

Weights are doubled integers ``k2`` throughout.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import BasisMismatch, InsufficientPrecision, PrincipalPartNonzero, ZeroInput
from .forms import eisenstein, theta, weight2_F
from .operators import u_op
from .series import QSeries, series_mul, series_pow

__all__ = [
    "FiltrationResult",
    "graded_monomials",
    "graded_basis",
    "sturm_precision",
    "solve_mod_p",
    "rank_mod_p",
    "is_congruent_to_weight",
    "filtration",
    "minimal_weight",
    "random_form",
    "verify_filtration_props",
]


@dataclass(frozen=True)
class FiltrationResult:
    omega2: int
    witness: tuple  # ((a, b), coefficient) pairs for theta^a F^b
    checked_precision: int
    candidate_chain: tuple
    ell: int = 0

    @property
    def omega(self) -> Fraction:
        return Fraction(self.omega2, 2)

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "omega2": self.omega2,
            "omega": str(self.omega),
            "witness": [{"theta": a, "F": b, "coefficient": c} for (a, b), c in self.witness],
            "checked_precision": self.checked_precision,
            "candidate_chain": list(self.candidate_chain),
        }


# ---------------------------------------------------------------------------
# basis
# ---------------------------------------------------------------------------

def graded_monomials(k2: int) -> list:
    """Exponent pairs (a, b) with a + 4b = k2, ordered by b."""
    if k2 < 0:
        return []
    return [(k2 - 4 * b, b) for b in range(k2 // 4 + 1)]


@lru_cache(maxsize=4096)
def _theta_power(a, prec, modulus):
    return series_pow(theta(prec, modulus).series, a)


@lru_cache(maxsize=4096)
def _F_power(b, prec, modulus):
    return series_pow(weight2_F(prec, modulus).series, b)


@lru_cache(maxsize=8192)
def _monomial(a, b, prec, modulus):
    s = series_mul(_theta_power(a, prec, modulus), _F_power(b, prec, modulus))
    return s.truncate(prec)


def graded_basis(k2: int, prec: int, modulus: Optional[int] = None) -> list:
    """Expansions of all theta^a F^b of doubled weight ``k2`` to ``prec``."""
    return [_monomial(a, b, prec, modulus) for a, b in graded_monomials(k2)]


def sturm_precision(k2_max: int) -> int:
    """Coefficient count used for congruence tests up to doubled weight ``k2_max``."""
    return k2_max // 4 + 16


# ---------------------------------------------------------------------------
# linear algebra over F_p
# ---------------------------------------------------------------------------

def _row_reduce(mat: np.ndarray, p: int, ncols: int):
    """In-place reduced row echelon form on the first ``ncols`` columns."""
    rows = mat.shape[0]
    pivots = []
    r = 0
    for col in range(ncols):
        if r >= rows:
            break
        nz = np.nonzero(mat[r:, col])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            mat[[r, piv]] = mat[[piv, r]]
        inv = pow(int(mat[r, col]), -1, p)
        mat[r] = (mat[r] * inv) % p
        others = np.nonzero(mat[:, col])[0]
        others = others[others != r]
        if others.size:
            factors = mat[others, col].reshape(-1, 1)
            mat[others] = (mat[others] - factors * mat[r]) % p
        pivots.append(col)
        r += 1
    return pivots


def rank_mod_p(vectors: list, p: int) -> int:
    if not vectors:
        return 0
    mat = np.array(vectors, dtype=np.int64).T % p
    return len(_row_reduce(mat, p, mat.shape[1]))


def solve_mod_p(columns: list, target: list, p: int) -> Optional[list]:
    """Solve ``sum x_i columns[i] = target`` over F_p, or return None."""
    if not columns:
        return [] if not any(x % p for x in target) else None
    mat = np.array(list(columns) + [target], dtype=np.int64).T % p
    n = len(columns)
    pivots = _row_reduce(mat, p, n)
    # inconsistent iff some row is zero on the left but nonzero on the right
    left_zero = ~mat[:, :n].any(axis=1)
    if np.any(left_zero & (mat[:, n] != 0)):
        return None
    x = [0] * n
    for r, col in enumerate(pivots):
        x[col] = int(mat[r, n])
    return x


# ---------------------------------------------------------------------------
# membership and filtration
# ---------------------------------------------------------------------------

def _as_residue(f: QSeries, ell: Optional[int]) -> QSeries:
    if ell is None:
        ell = f.modulus
        if ell is None:
            raise ValueError("an exact series needs an explicit ell")
    if f.modulus != ell:
        f = f.reduce(ell)
    if any(e < 0 for e, _ in f.items()):
        raise PrincipalPartNonzero("filtration needs a holomorphic series (no principal part mod ell)")
    return f


def _witness_for(f: QSeries, k2: int, ell: int, prec: int):
    monos = graded_monomials(k2)
    if not monos:
        return None
    basis = graded_basis(k2, prec, ell)
    cols = [b.coefficients(0, prec) for b in basis]
    if rank_mod_p(cols, ell) != len(cols):
        raise BasisMismatch(f"theta/F monomials of doubled weight {k2} are dependent mod {ell} "
                            f"at precision {prec}")
    x = solve_mod_p(cols, f.coefficients(0, prec), ell)
    if x is None:
        return None
    return tuple((m, c) for m, c in zip(monos, x) if c)


def is_congruent_to_weight(f: QSeries, k2: int, ell: Optional[int] = None,
                           k2_f: Optional[int] = None) -> Optional[tuple]:
    """Witness coefficients expressing ``f mod ell`` in weight ``k2``, or None.

    The witness is checked against every known coefficient of ``f``, which
    must reach at least ``sturm_precision(max(k2, k2_f))``.
    """
    f = _as_residue(f, ell)
    ell = f.modulus
    need = sturm_precision(max(k2, k2 if k2_f is None else k2_f))
    if f.precision < need:
        raise InsufficientPrecision(f"membership test needs precision {need}, have {f.precision}")
    return _witness_for(f, k2, ell, f.precision)


def filtration(f: QSeries, k2: int, ell: Optional[int] = None) -> FiltrationResult:
    """Least doubled weight ``k2 - 2t(ell-1)`` at which ``f mod ell`` is modular."""
    f = _as_residue(f, ell)
    ell = f.modulus
    if f.is_zero():
        raise ZeroInput("the zero series has no filtration")
    need = sturm_precision(k2)
    if f.precision < need:
        raise InsufficientPrecision(f"filtration at doubled weight {k2} needs precision {need}, "
                                    f"have {f.precision}")
    step = 2 * (ell - 1)
    chain = tuple(k2 - t * step for t in range(k2 // step, -1, -1))
    for cand in chain:
        w = _witness_for(f, cand, ell, f.precision)
        if w is not None:
            return FiltrationResult(cand, w, f.precision, chain, ell)
    raise BasisMismatch(f"series is not congruent mod {ell} to any form of doubled weight {k2}")


def minimal_weight(f: QSeries, k2_max: int, ell: Optional[int] = None) -> Optional[FiltrationResult]:
    """Unrestricted scan: least doubled weight of the parity of ``k2_max`` carrying ``f``.

    Unlike :func:`filtration` this tests every weight, not only the chain
    ``k2_max mod 2(ell-1)``; it is used to check the congruence laws.
    """
    f = _as_residue(f, ell)
    ell = f.modulus
    if f.is_zero():
        raise ZeroInput("the zero series has no filtration")
    chain = tuple(range(k2_max % 2, k2_max + 1, 2))
    for cand in chain:
        w = _witness_for(f, cand, ell, f.precision)
        if w is not None:
            return FiltrationResult(cand, w, f.precision, chain, ell)
    return None


# ---------------------------------------------------------------------------
# randomized law checks
# ---------------------------------------------------------------------------

def random_form(rng: random.Random, ell: int, k2: int, prec: int, lift: int = 0):
    """Random nonzero F_ell-combination of weight-``k2`` monomials, times E_{ell-1}^lift.

    Returns ``(series, stated_k2, coefficients)``.
    """
    monos = graded_monomials(k2)
    while True:
        coeffs = [rng.randrange(ell) for _ in monos]
        if any(coeffs):
            break
    acc = QSeries({}, prec, ell)
    for c, s in zip(coeffs, graded_basis(k2, prec, ell)):
        if c:
            acc = acc + s * c
    if lift:
        acc = series_mul(acc, series_pow(eisenstein(ell - 1, prec, ell).series, lift))
    return acc, k2 + 2 * lift * (ell - 1), coeffs


@dataclass
class _LawTally:
    anchor: str
    checked: int = 0
    failures: list = field(default_factory=list)

    def record(self, ok: bool, **details):
        self.checked += 1
        if not ok and len(self.failures) < 5:
            self.failures.append(details)

    def to_dict(self):
        return {"anchor": self.anchor, "checked": self.checked,
                "failed": len(self.failures), "pass": not self.failures and self.checked > 0,
                "failures": self.failures}


def _describe(series: QSeries, k2, coeffs):
    return {"k2": k2, "monomial_coefficients": coeffs, "head": series.truncate(12).to_dict()}


def verify_filtration_props(ell: int, sample_count: int = 100, seed: int = 0) -> dict:
    """Randomized checks of the filtration laws at ``ell``; failures are report content."""
    if ell not in (5, 7):
        raise ValueError("law checks are calibrated for ell in {5, 7}")
    rng = random.Random(f"filtration-{ell}-{seed}")
    laws = {
        "theta_shift": _LawTally("omega(f theta^m) = omega(f) + m/2"),
        "power": _LawTally("omega(f^m) = m omega(f)"),
        "u_congruence": _LawTally("omega(f|U) - omega(f) = 0 mod (ell-1)/2"),
        "weight_congruence": _LawTally("lambda = omega(f) - 1/2 mod (ell-1)"),
        "u_bound": _LawTally("omega(f|U) <= ell + (omega(f)-1)/ell"),
        "descent": _LawTally("omega(f) > ell+1 implies omega(f|U) < omega(f)"),
    }
    prec = 128
    th = theta(prec, ell).series

    # law (1) fixed instance f = theta, m = 2
    w_theta = filtration(th, 1).omega2
    w_shift = filtration(series_pow(th, 3), 3).omega2
    laws["theta_shift"].record(w_shift == w_theta + 2, case="f=theta, m=2")

    while laws["theta_shift"].checked < sample_count + 1:
        k2 = rng.randrange(0, 25)
        f, k2s, co = random_form(rng, ell, k2, prec, lift=rng.randrange(2))
        m = rng.randrange(1, 7)
        w = filtration(f, k2s).omega2
        w_m = filtration(series_mul(f, series_pow(th, m)), k2s + m).omega2
        laws["theta_shift"].record(w_m == w + m, m=m, omega2=w, omega2_shifted=w_m,
                                   **_describe(f, k2s, co))

    while laws["power"].checked < sample_count:
        k2 = rng.randrange(1, 19)
        f, k2s, co = random_form(rng, ell, k2, prec, lift=rng.randrange(2))
        m = rng.randrange(2, 5)
        w = filtration(f, k2s).omega2
        w_m = filtration(series_pow(f, m), m * k2s).omega2
        laws["power"].record(w_m == m * w, m=m, omega2=w, omega2_power=w_m, **_describe(f, k2s, co))

    # half-integral weight: laws (3) and (4) through the unrestricted scan
    u_prec = 64
    src_prec = ell * u_prec
    while laws["u_congruence"].checked < sample_count:
        k2 = 2 * rng.randrange(0, 12) + 1
        f, k2s, co = random_form(rng, ell, k2, src_prec, lift=rng.randrange(2))
        g = u_op(f, ell)
        if g.is_zero():
            continue
        wf = minimal_weight(f, k2s)
        wg = minimal_weight(g, k2s + ell - 1)
        lam = (k2s - 1) // 2
        ok4 = wf is not None and (wf.omega2 - 1 - 2 * lam) % (2 * (ell - 1)) == 0
        laws["weight_congruence"].record(ok4, omega2=None if wf is None else wf.omega2,
                                         **_describe(f, k2s, co))
        ok3 = wf is not None and wg is not None and (wg.omega2 - wf.omega2) % (ell - 1) == 0
        laws["u_congruence"].record(ok3, omega2_f=None if wf is None else wf.omega2,
                                    omega2_fU=None if wg is None else wg.omega2,
                                    **_describe(f, k2s, co))

    # integral weight (trivial character): Jochnowitz bound and descent
    while laws["u_bound"].checked < sample_count or laws["descent"].checked < sample_count:
        k2 = 4 * rng.randrange(1, ell + 4)
        f, k2s, co = random_form(rng, ell, k2, src_prec, lift=rng.randrange(2))
        g = u_op(f, ell)
        wf = filtration(f, k2s).omega2
        if g.is_zero():
            continue
        wg = filtration(g, k2s).omega2
        if laws["u_bound"].checked < sample_count:
            # omega(f|U) <= ell + (omega(f) - 1)/ell, doubled and cleared of 1/ell
            laws["u_bound"].record(ell * wg <= 2 * ell * ell + wf - 2, omega2_f=wf, omega2_fU=wg,
                                   **_describe(f, k2s, co))
        if wf > 2 * (ell + 1) and laws["descent"].checked < sample_count:
            laws["descent"].record(wg < wf, omega2_f=wf, omega2_fU=wg, **_describe(f, k2s, co))

    report = {name: tally.to_dict() for name, tally in laws.items()}
    return {"ell": ell, "samples": sample_count, "seed": seed, "laws": report,
            "pass": all(v["pass"] for v in report.values())}
