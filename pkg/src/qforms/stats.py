"""Residue-class counting of coefficient streams and the Treneer-type split.

Verdicts here are finite-X evidence for an asymptotic lower bound, never a
proof: for ``r != 0`` the count is normalized by ``sqrt(X)/log X``, for
``r = 0`` by ``X``, and a class is *consistent* when its normalized count
stays at least half of its first nonzero value over the last three
checkpoints and is already nonzero by X = 5000.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import PrecisionExhausted, StreamTooShort
from .operators import u_iterate, u_op, v_op
from .series import QSeries

__all__ = [
    "DEFAULT_CHECKPOINTS",
    "DistributionReport",
    "residue_counts",
    "treneer_split",
    "treneer_split_two_path",
    "well_distribution_scan",
    "trace_stream",
]

DEFAULT_CHECKPOINTS = (2500, 5000, 10000, 20000, 50000)
NONZERO_DEADLINE = 5000
DECAY_FACTOR = 0.5
SURROGATE_NOTE = ("growth verdicts are finite-X surrogates for an ineffective lower bound "
                  "(evidence, not proof)")


@dataclass(frozen=True)
class DistributionReport:
    modulus: int
    checkpoints: tuple
    counts: dict        # r -> tuple of counts at each checkpoint
    normalized: dict    # r -> tuple of normalized values
    verdicts: dict      # r -> "consistent" | "inconsistent"

    def total(self, i: int) -> int:
        return sum(c[i] for c in self.counts.values())

    def to_dict(self) -> dict:
        return {
            "modulus": self.modulus,
            "checkpoints": list(self.checkpoints),
            "counts": {str(r): list(v) for r, v in self.counts.items()},
            "normalized": {str(r): [round(x, 12) for x in v] for r, v in self.normalized.items()},
            "verdicts": {str(r): v for r, v in self.verdicts.items()},
            "note": SURROGATE_NOTE,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["X", "r", "count", "normalized"])
        for i, x in enumerate(self.checkpoints):
            for r in sorted(self.counts):
                w.writerow([x, r, self.counts[r][i], repr(round(self.normalized[r][i], 12))])
        return buf.getvalue()


def _norm(r: int, count: int, x: int) -> float:
    if r == 0:
        return count / x
    return count / (math.sqrt(x) / math.log(x))


def _verdict(values: Sequence[float], early_count: int) -> str:
    if early_count == 0:
        return "inconsistent"
    first = next((v for v in values if v > 0), None)
    if first is None:
        return "inconsistent"
    tail = values[-3:]
    return "consistent" if all(v >= DECAY_FACTOR * first for v in tail) else "inconsistent"


def residue_counts(coeffs, modulus: int, checkpoints: Sequence[int]) -> DistributionReport:
    """Counts of ``#{0 <= n <= X : a(n) = r mod modulus}`` at each checkpoint X."""
    checkpoints = tuple(sorted(int(x) for x in checkpoints))
    if not checkpoints or checkpoints[0] < 2:
        raise ValueError("checkpoints must be >= 2")
    x_max = checkpoints[-1]
    if len(coeffs) < x_max + 1:
        raise StreamTooShort(f"stream has {len(coeffs)} terms, need {x_max + 1}")
    res = np.fromiter((int(c) % modulus for c in coeffs[:x_max + 1]), dtype=np.int64,
                      count=x_max + 1)
    table = np.stack([np.bincount(res[:x + 1], minlength=modulus) for x in checkpoints])
    early = np.bincount(res[:min(NONZERO_DEADLINE, x_max) + 1], minlength=modulus)
    counts, normalized, verdicts = {}, {}, {}
    for r in range(modulus):
        cs = tuple(int(v) for v in table[:, r])
        ns = tuple(_norm(r, c, x) for c, x in zip(cs, checkpoints))
        counts[r] = cs
        normalized[r] = ns
        verdicts[r] = _verdict(ns, int(early[r]))
    return DistributionReport(modulus, checkpoints, counts, normalized, verdicts)


def treneer_split(f: QSeries, ell: int, m: int, j: int) -> QSeries:
    """``sum_{n >= 1, ell !| n} a(ell^m n) q^n  mod ell^j`` by direct extraction."""
    if -((-f.precision) // ell ** (m + 1)) < 2:
        raise PrecisionExhausted(f"need ceil(prec / {ell}^{m + 1}) >= 2")
    mod = ell ** j
    g = u_op(f, ell ** m)
    if g.modulus != mod:
        g = g.reduce(mod)
    return QSeries({e: c for e, c in g.items() if e >= 1 and e % ell}, g.precision, mod)


def treneer_split_two_path(f: QSeries, ell: int, m: int, j: int) -> QSeries:
    """``f|U_{ell^m} - f|U_{ell^{m+1}}|V_ell  mod ell^j`` by composing the operators."""
    mod = ell ** j
    a = u_iterate(f, ell, m)
    b = v_op(u_iterate(f, ell, m + 1), ell)
    out = a - b
    return out if out.modulus == mod else out.reduce(mod)


def well_distribution_scan(f: QSeries, ell: int, j: int,
                           checkpoints: Sequence[int] = DEFAULT_CHECKPOINTS) -> DistributionReport:
    """Residue counts of the holomorphic-part coefficients of ``f`` modulo ``ell^j``."""
    mod = ell ** j
    cps = tuple(x for x in checkpoints if x < f.precision)
    if not cps:
        raise StreamTooShort(f"no checkpoint below precision {f.precision}")
    if f.modulus is not None and f.modulus % mod:
        raise ValueError(f"series modulus {f.modulus} is not divisible by {mod}")
    return residue_counts(f.coefficients(0, cps[-1] + 1), mod, cps)


def trace_stream(zagier: QSeries, x_max: Optional[int] = None) -> list:
    """``[t(0), ..., t(x_max)]`` read off the generating series (t = -coefficient).

    Non-discriminants contribute t(d) = 0; the constant term gives t(0) = 2.
    """
    if x_max is None:
        x_max = zagier.precision - 1
    m = zagier.modulus
    out = [-c for c in zagier.coefficients(0, x_max + 1)]
    return [c % m for c in out] if m is not None else out
