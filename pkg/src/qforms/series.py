"""Truncated Laurent series in q with exact or residue coefficients.

A :class:`QSeries` knows its coefficients on ``[valuation, precision)`` and
nothing beyond.  Every operation propagates precision conservatively, so a
coefficient reported inside the known range is never a guess.

Long dense products go through Kronecker substitution (pack the coefficient
vector into one big integer, multiply, unpack), which hands the heavy lifting
to CPython's Karatsuba multiplication and stays exact for big integers.
"""

from __future__ import annotations

import json
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

import numpy as np

from .errors import (
    BadModulus,
    InsufficientPrecision,
    ModulusMismatch,
    NonUnitLeading,
    QFormsError,
)

__all__ = [
    "QSeries",
    "series_add",
    "series_mul",
    "series_pow",
    "series_invert",
    "reduce_mod",
    "series_equal_upto",
]

# Products with at most this many term pairs always take the sparse loop.
_SPARSE_PAIR_LIMIT = 4096
# Sparse loop is also used when both sides are at most this dense ...
_SPARSE_DENSITY = 0.25
# ... unless the pair count makes the dense route clearly cheaper.
_SPARSE_PAIR_CAP = 400_000
_NAIVE_INVERSE_LIMIT = 48


# ---------------------------------------------------------------------------
# dense kernels on plain lists (index 0 = lowest exponent)
# ---------------------------------------------------------------------------

def _pack(coeffs, width):
    if width in (1, 2, 4):
        arr = np.asarray(coeffs, dtype=np.int64).astype("<u%d" % width)
        return int.from_bytes(arr.tobytes(), "little")
    return int.from_bytes(b"".join(c.to_bytes(width, "little") for c in coeffs), "little")


def _unpack(value, width, count):
    raw = value.to_bytes(count * width, "little")
    if width in (1, 2, 4):
        return np.frombuffer(raw, dtype="<u%d" % width).astype(np.int64).tolist()
    return [int.from_bytes(raw[i * width:(i + 1) * width], "little") for i in range(count)]


def _pack_signed(coeffs, width):
    if all(c >= 0 for c in coeffs):
        return _pack(coeffs, width)
    pos = [c if c > 0 else 0 for c in coeffs]
    neg = [-c if c < 0 else 0 for c in coeffs]
    return _pack(pos, width) - _pack(neg, width)


def _choose_width(bits):
    width = (bits + 7) // 8
    for w in (1, 2, 4):
        if width <= w:
            return w
    return width


def mul_dense(a, b, n=None, modulus=None):
    """First ``n`` coefficients of the product of two dense coefficient lists."""
    if not a or not b:
        return [0] * (n or 0)
    full = len(a) + len(b) - 1
    if n is None:
        n = full
    a = a[:n]
    b = b[:n]
    full = min(len(a) + len(b) - 1, n)
    if len(a) * len(b) <= 256:
        out = [0] * full
        for i, x in enumerate(a):
            if x:
                for j in range(min(len(b), full - i)):
                    out[i + j] += x * b[j]
    else:
        ma = max(abs(x) for x in a)
        mb = max(abs(x) for x in b)
        if ma == 0 or mb == 0:
            return [0] * n
        bound = min(len(a), len(b)) * ma * mb
        signed = any(x < 0 for x in a) or any(x < 0 for x in b)
        width = _choose_width(bound.bit_length() + (2 if signed else 1))
        total = len(a) + len(b) - 1
        prod = _pack_signed(a, width) * _pack_signed(b, width)
        if signed:
            half = 1 << (8 * width - 1)
            bias = int.from_bytes(half.to_bytes(width, "little") * total, "little")
            digits = _unpack(prod + bias, width, total)
            out = [d - half for d in digits[:full]]
        else:
            out = _unpack(prod, width, total)[:full]
    if modulus is not None:
        out = [x % modulus for x in out]
    if len(out) < n:
        out.extend([0] * (n - len(out)))
    return out


def _unit_inverse(c, modulus):
    if modulus is not None:
        try:
            return pow(c, -1, modulus)
        except ValueError:
            raise NonUnitLeading(f"leading coefficient {c} is not a unit modulo {modulus}") from None
    if c in (1, -1):
        return c
    raise NonUnitLeading(f"leading coefficient {c} is not a unit in Z")


def inv_dense(a, n, modulus=None):
    """First ``n`` coefficients of ``1/a`` for a dense list with unit ``a[0]``."""
    inv0 = _unit_inverse(a[0], modulus)
    if n <= _NAIVE_INVERSE_LIMIT:
        b = [inv0] + [0] * (n - 1)
        for k in range(1, n):
            s = 0
            for i in range(1, min(k, len(a) - 1) + 1):
                s += a[i] * b[k - i]
            s = -inv0 * s
            b[k] = s % modulus if modulus is not None else s
        return b
    # Newton iteration b <- b (2 - a b), doubling the known length each round.
    b = inv_dense(a, _NAIVE_INVERSE_LIMIT, modulus)
    k = _NAIVE_INVERSE_LIMIT
    while k < n:
        k = min(2 * k, n)
        e = mul_dense(a[:k], b, k, modulus)
        r = [-x for x in e]
        r[0] += 2
        if modulus is not None:
            r = [x % modulus for x in r]
        b = mul_dense(b, r, k, modulus)
    return b


# ---------------------------------------------------------------------------
# QSeries
# ---------------------------------------------------------------------------

def _ceil_div(a, b):
    return -((-a) // b)


class QSeries:
    """Truncated Laurent series ``sum c_n q^n`` known for ``n < precision``.

    Coefficients are Python integers; when ``modulus`` is set they are kept
    as canonical residues in ``[0, modulus)``.  Only nonzero coefficients are
    stored.  Instances are immutable.
    """

    __slots__ = ("_coeffs", "_precision", "_modulus")

    def __init__(self, coeffs: Optional[Mapping[int, int]] = None, precision: int = 0,
                 modulus: Optional[int] = None):
        if modulus is not None:
            modulus = int(modulus)
            if modulus < 1:
                raise BadModulus(f"modulus must be positive, got {modulus}")
        precision = int(precision)
        store = {}
        if coeffs:
            for e, c in coeffs.items():
                e = int(e)
                if e >= precision:
                    continue
                c = int(c)
                if modulus is not None:
                    c %= modulus
                if c:
                    store[e] = c
        self._coeffs = dict(sorted(store.items()))
        self._precision = precision
        self._modulus = modulus

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_list(cls, coeffs: Iterable[int], valuation: int = 0, precision: Optional[int] = None,
                  modulus: Optional[int] = None) -> "QSeries":
        coeffs = list(coeffs)
        if precision is None:
            precision = valuation + len(coeffs)
        return cls({valuation + i: c for i, c in enumerate(coeffs) if c}, precision, modulus)

    @classmethod
    def constant(cls, c: int, precision: int, modulus: Optional[int] = None) -> "QSeries":
        return cls({0: c}, precision, modulus)

    @classmethod
    def monomial(cls, exponent: int, precision: int, c: int = 1,
                 modulus: Optional[int] = None) -> "QSeries":
        return cls({exponent: c}, precision, modulus)

    @classmethod
    def _raw(cls, store, precision, modulus):
        # trusted fast path: store already sorted, reduced, nonzero, in range
        obj = cls.__new__(cls)
        obj._coeffs = store
        obj._precision = precision
        obj._modulus = modulus
        return obj

    # -- basic accessors --------------------------------------------------

    @property
    def precision(self) -> int:
        return self._precision

    @property
    def modulus(self) -> Optional[int]:
        return self._modulus

    @property
    def coeffs(self) -> Mapping[int, int]:
        return MappingProxyType(self._coeffs)

    @property
    def valuation(self) -> int:
        """Lowest exponent with a nonzero coefficient (``precision`` if none)."""
        for e in self._coeffs:
            return e
        return self._precision

    def is_zero(self) -> bool:
        return not self._coeffs

    def __getitem__(self, n: int) -> int:
        if n >= self._precision:
            raise InsufficientPrecision(f"coefficient of q^{n} unknown (precision {self._precision})")
        return self._coeffs.get(n, 0)

    def items(self):
        return self._coeffs.items()

    def coefficients(self, start: int = 0, stop: Optional[int] = None) -> list:
        """Dense list of coefficients for exponents ``start <= n < stop``."""
        if stop is None:
            stop = self._precision
        if stop > self._precision:
            raise InsufficientPrecision(f"need precision {stop}, have {self._precision}")
        out = [0] * max(stop - start, 0)
        for e, c in self._coeffs.items():
            if start <= e < stop:
                out[e - start] = c
        return out

    def principal_part(self) -> dict:
        return {e: c for e, c in self._coeffs.items() if e < 0}

    # -- structural helpers -----------------------------------------------

    def truncate(self, precision: int) -> "QSeries":
        if precision >= self._precision:
            return self
        return QSeries._raw({e: c for e, c in self._coeffs.items() if e < precision},
                            precision, self._modulus)

    def shift(self, k: int) -> "QSeries":
        """Multiply by ``q^k``."""
        return QSeries._raw({e + k: c for e, c in self._coeffs.items()},
                            self._precision + k, self._modulus)

    def map_coefficients(self, fn) -> "QSeries":
        """Apply ``fn(exponent, coefficient)`` to every stored coefficient."""
        return QSeries({e: fn(e, c) for e, c in self._coeffs.items()}, self._precision, self._modulus)

    def exact_div(self, k: int) -> "QSeries":
        """Divide every coefficient by the integer ``k`` (must divide exactly)."""
        if self._modulus is not None:
            return self * _unit_inverse(k % self._modulus, self._modulus)
        out = {}
        for e, c in self._coeffs.items():
            q, r = divmod(c, k)
            if r:
                raise QFormsError(f"{k} does not divide coefficient {c} of q^{e}")
            out[e] = q
        return QSeries._raw(out, self._precision, None)

    def reduce(self, m: int) -> "QSeries":
        return reduce_mod(self, m)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other):
        if self._modulus != other._modulus:
            raise ModulusMismatch(f"moduli differ: {self._modulus} vs {other._modulus}")

    def __add__(self, other):
        if isinstance(other, int):
            other = QSeries.constant(other, self._precision, self._modulus)
        if not isinstance(other, QSeries):
            return NotImplemented
        return series_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        if isinstance(other, int):
            other = QSeries.constant(other, self._precision, self._modulus)
        if not isinstance(other, QSeries):
            return NotImplemented
        return series_add(self, -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            k = int(other)
            m = self._modulus
            if m is not None:
                store = {e: c * k % m for e, c in self._coeffs.items()}
                store = {e: c for e, c in store.items() if c}
            else:
                store = {e: c * k for e, c in self._coeffs.items()} if k else {}
            return QSeries._raw(store, self._precision, m)
        if not isinstance(other, QSeries):
            return NotImplemented
        return series_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, m: int):
        return series_pow(self, m)

    def invert(self) -> "QSeries":
        return series_invert(self)

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (self._precision == other._precision and self._modulus == other._modulus
                and self._coeffs == other._coeffs)

    __hash__ = None

    def equal_upto(self, other: "QSeries", n: int) -> bool:
        return series_equal_upto(self, other, n)

    # -- display / serialization -------------------------------------------

    def __repr__(self):
        terms = []
        for e, c in list(self._coeffs.items())[:8]:
            if e == 0:
                terms.append(str(c))
            elif e == 1:
                terms.append(f"{c}*q")
            else:
                terms.append(f"{c}*q^{e}")
        if len(self._coeffs) > 8:
            terms.append("...")
        body = " + ".join(terms) if terms else "0"
        mod = f" (mod {self._modulus})" if self._modulus is not None else ""
        return f"{body} + O(q^{self._precision}){mod}"

    def to_dict(self) -> dict:
        return {
            "valuation": self.valuation,
            "precision": self._precision,
            "modulus": self._modulus,
            "coeffs": [[e, str(c)] for e, c in self._coeffs.items()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "QSeries":
        try:
            precision = int(data["precision"])
            modulus = data.get("modulus")
            coeffs = {int(e): int(c) for e, c in data["coeffs"]}
        except (KeyError, TypeError, ValueError) as exc:
            raise QFormsError(f"malformed QSeries document: {exc}") from None
        valuation = data.get("valuation")
        if valuation is not None and coeffs and min(coeffs) < int(valuation):
            raise QFormsError("stored exponent below declared valuation")
        if any(e >= precision for e in coeffs):
            raise QFormsError("stored exponent at or beyond precision")
        return cls(coeffs, precision, None if modulus is None else int(modulus))

    @classmethod
    def from_json(cls, text: str) -> "QSeries":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def series_add(a: QSeries, b: QSeries) -> QSeries:
    a._check(b)
    prec = min(a.precision, b.precision)
    m = a.modulus
    out = {e: c for e, c in a.items() if e < prec}
    for e, c in b.items():
        if e >= prec:
            break
        out[e] = out.get(e, 0) + c
    if m is not None:
        out = {e: c % m for e, c in out.items()}
    return QSeries._raw({e: out[e] for e in sorted(out) if out[e]}, prec, m)


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    a._check(b)
    m = a.modulus
    va, vb = a.valuation, b.valuation
    prec = min(a.precision + vb, b.precision + va)
    if a.is_zero() or b.is_zero():
        return QSeries._raw({}, prec, m)
    ta = [(e, c) for e, c in a.items() if e < prec - vb]
    tb = [(e, c) for e, c in b.items() if e < prec - va]
    pairs = len(ta) * len(tb)
    span_a = prec - vb - va
    span_b = prec - va - vb
    sparse = pairs <= _SPARSE_PAIR_LIMIT or (
        len(ta) <= _SPARSE_DENSITY * span_a and len(tb) <= _SPARSE_DENSITY * span_b
        and pairs <= _SPARSE_PAIR_CAP)
    if sparse:
        out = {}
        for ea, ca in ta:
            lim = prec - ea
            for eb, cb in tb:
                if eb >= lim:
                    break
                e = ea + eb
                out[e] = out.get(e, 0) + ca * cb
        if m is not None:
            out = {e: c % m for e, c in out.items()}
        return QSeries._raw({e: out[e] for e in sorted(out) if out[e]}, prec, m)
    n = prec - va - vb
    da = a.coefficients(va, min(a.precision, va + n))
    db = b.coefficients(vb, min(b.precision, vb + n))
    prod = mul_dense(da, db, n, m)
    base = va + vb
    return QSeries._raw({base + i: c for i, c in enumerate(prod) if c}, prec, m)


def series_invert(a: QSeries) -> QSeries:
    if a.is_zero():
        raise NonUnitLeading("cannot invert a series with no known nonzero coefficient")
    v = a.valuation
    rel = a.precision - v
    unit = a.coefficients(v, a.precision)
    inv = inv_dense(unit, rel, a.modulus)
    return QSeries._raw({i - v: c for i, c in enumerate(inv) if c}, a.precision - 2 * v, a.modulus)


def series_pow(a: QSeries, m: int) -> QSeries:
    m = int(m)
    if m < 0:
        return series_pow(series_invert(a), -m)
    if m == 0:
        # the empty product is exactly 1; report at least the input's range
        return QSeries.constant(1, max(a.precision, a.precision - a.valuation), a.modulus)
    result = None
    base = a
    while m:
        if m & 1:
            result = base if result is None else series_mul(result, base)
        m >>= 1
        if m:
            base = series_mul(base, base)
    return result


def reduce_mod(a: QSeries, m: int) -> QSeries:
    m = int(m)
    if m < 1:
        raise BadModulus(f"modulus must be positive, got {m}")
    if a.modulus is not None and a.modulus % m:
        raise BadModulus(f"{m} does not divide existing modulus {a.modulus}")
    store = {e: c % m for e, c in a.items()}
    return QSeries._raw({e: c for e, c in store.items() if c}, a.precision, m)


def series_equal_upto(a: QSeries, b: QSeries, n: int) -> bool:
    """True iff ``a`` and ``b`` agree on every exponent below ``n``."""
    a._check(b)
    if a.precision < n or b.precision < n:
        raise InsufficientPrecision(
            f"comparison to q^{n} needs both precisions >= {n} (have {a.precision}, {b.precision})")
    ca = {e: c for e, c in a.items() if e < n}
    cb = {e: c for e, c in b.items() if e < n}
    return ca == cb
