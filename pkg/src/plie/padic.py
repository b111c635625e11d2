"""Fixed absolute-precision arithmetic in Z_p and Q_p.

Every :class:`ZpInt` stands for ``residue + O(p^precision)``.  Norms are
never floats: they are carried as integer exponents (``|x| = p^-e``), with
``math.inf`` standing for the exponent of zero.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .errors import NotAUnit, NotDivisible, PrecisionExhausted, UsageError

INF = math.inf
DEFAULT_PRECISION = 24


@lru_cache(maxsize=None)
def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or p < 3 or not _is_prime(p):
        raise UsageError(f"prime must be an odd prime >= 3, got {p!r}")
    return p


def vp(n: int, p: int, cap: int | None = None) -> int | float:
    """p-adic valuation of an integer; ``INF`` for 0.

    With ``cap`` set, the count stops at ``cap`` (used for residues known
    modulo ``p**cap``).
    """
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
        if cap is not None and v >= cap:
            return INF
    return v


def vec_exponent(coords: Sequence[int], p: int, precision: int) -> int | float:
    """Max-norm exponent of a coordinate vector known mod ``p**precision``."""
    q = p**precision
    best: int | float = INF
    for c in coords:
        c %= q
        if c:
            e = vp(c, p)
            if e < best:
                best = e
    return best


@dataclass(frozen=True, order=True)
class NormExp:
    """Norm ``p**-exponent``; ``exponent`` is ``INF`` for zero.

    ``at_floor`` marks a zero that is only zero modulo the working
    precision, so a caller can tell stabilization from a true zero.
    """

    exponent: int | float
    at_floor: bool = field(default=False, compare=False)

    def __str__(self) -> str:
        if self.exponent == INF:
            return "inf(floor)" if self.at_floor else "inf"
        return str(self.exponent)


@dataclass(frozen=True)
class ZpInt:
    """Element of Z_p known modulo ``prime**precision``."""

    prime: int
    precision: int
    residue: int

    def __post_init__(self) -> None:
        check_prime(self.prime)
        if self.precision < 0:
            raise UsageError("precision must be non-negative")
        object.__setattr__(self, "residue", self.residue % self.prime**self.precision)

    @property
    def modulus(self) -> int:
        return self.prime**self.precision

    def _coerce(self, other: ZpInt | int) -> ZpInt:
        if isinstance(other, int):
            return ZpInt(self.prime, self.precision, other)
        if other.prime != self.prime:
            raise UsageError(f"prime mismatch: {self.prime} vs {other.prime}")
        return other

    def __add__(self, other: ZpInt | int) -> ZpInt:
        return zp_add(self, self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other: ZpInt | int) -> ZpInt:
        other = self._coerce(other)
        return zp_add(self, -other)

    def __rsub__(self, other: int) -> ZpInt:
        return self._coerce(other) - self

    def __neg__(self) -> ZpInt:
        return ZpInt(self.prime, self.precision, -self.residue)

    def __mul__(self, other: ZpInt | int) -> ZpInt:
        return zp_mul(self, self._coerce(other))

    __rmul__ = __mul__

    def digits(self) -> list[int]:
        """Base-p digits, least significant first, ``precision`` of them."""
        out = []
        r = self.residue
        for _ in range(self.precision):
            r, d = divmod(r, self.prime)
            out.append(d)
        return out

    def to_json(self) -> dict:
        return {"p": self.prime, "prec": self.precision, "residue": str(self.residue)}

    @classmethod
    def from_json(cls, obj: dict | str, p: int | None = None, prec: int | None = None) -> ZpInt:
        if isinstance(obj, str):
            obj = json.loads(obj)
        p = obj.get("p", p)
        prec = obj.get("prec", prec)
        if p is None or prec is None:
            raise UsageError("ZpInt JSON needs 'p' and 'prec' (or defaults)")
        return cls(int(p), int(prec), int(obj["residue"]))


def _same_prime(a: ZpInt, b: ZpInt) -> None:
    if a.prime != b.prime:
        raise UsageError(f"prime mismatch: {a.prime} vs {b.prime}")


def zp_add(a: ZpInt, b: ZpInt) -> ZpInt:
    _same_prime(a, b)
    return ZpInt(a.prime, min(a.precision, b.precision), a.residue + b.residue)


def zp_mul(a: ZpInt, b: ZpInt) -> ZpInt:
    _same_prime(a, b)
    return ZpInt(a.prime, min(a.precision, b.precision), a.residue * b.residue)


def zp_inv(a: ZpInt) -> ZpInt:
    if a.residue % a.prime == 0:
        raise NotAUnit(f"{a.residue} is divisible by {a.prime}")
    return ZpInt(a.prime, a.precision, pow(a.residue, -1, a.modulus))


def val(a: ZpInt) -> NormExp:
    if a.residue == 0:
        return NormExp(INF, at_floor=True)
    return NormExp(vp(a.residue, a.prime))


def div_pow_p(a: ZpInt, k: int) -> ZpInt:
    """Exact division by ``p**k``; the result loses ``k`` digits of precision."""
    if k < 0:
        raise UsageError("k must be non-negative")
    if k > a.precision:
        raise PrecisionExhausted(f"cannot divide by p^{k} at precision {a.precision}")
    pk = a.prime**k
    if a.residue % pk:
        raise NotDivisible(f"p^{k} does not divide {a.residue}")
    return ZpInt(a.prime, a.precision - k, a.residue // pk)


def make_rng(seed: int | str | random.Random) -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(seed)


def zp_random(p: int, N: int, rng_seed: int | str | random.Random, min_valuation: int = 0) -> ZpInt:
    """Uniform sample from ``p**min_valuation * Z_p`` at precision ``N``.

    An integer seed gives a fresh deterministic generator; passing a
    ``random.Random`` draws from it (and advances it).
    """
    if min_valuation > N:
        raise UsageError("min_valuation must be <= N")
    rng = make_rng(rng_seed)
    k = max(min_valuation, 0)
    return ZpInt(p, N, p**k * rng.randrange(p ** (N - k)))


@dataclass(frozen=True)
class QpScalar:
    """Q_p scalar ``p**valuation * unit``; the zero element has valuation ``INF``."""

    prime: int
    valuation: int | float
    unit: ZpInt
    rel_precision: int

    def __post_init__(self) -> None:
        if self.valuation == INF:
            return
        if self.unit.residue % self.prime == 0:
            raise NotAUnit("unit part of a nonzero QpScalar must be a unit")

    @classmethod
    def from_zp(cls, a: ZpInt) -> QpScalar:
        v = vp(a.residue, a.prime)
        if v == INF:
            return cls(a.prime, INF, ZpInt(a.prime, 0, 0), 0)
        rel = a.precision - v
        return cls(a.prime, v, ZpInt(a.prime, rel, a.residue // a.prime**v), rel)

    @classmethod
    def from_int(cls, p: int, n: int, rel_precision: int = DEFAULT_PRECISION) -> QpScalar:
        if n == 0:
            return cls(p, INF, ZpInt(p, 0, 0), 0)
        v = vp(n, p)
        return cls(p, v, ZpInt(p, rel_precision, n // p**v), rel_precision)

    @classmethod
    def p_power(cls, p: int, k: int, rel_precision: int = DEFAULT_PRECISION) -> QpScalar:
        return cls(p, k, ZpInt(p, rel_precision, 1), rel_precision)

    def is_zero(self) -> bool:
        return self.valuation == INF

    def norm(self) -> NormExp:
        return NormExp(self.valuation)

    def __mul__(self, other: QpScalar) -> QpScalar:
        if other.prime != self.prime:
            raise UsageError("prime mismatch")
        if self.is_zero() or other.is_zero():
            return QpScalar(self.prime, INF, ZpInt(self.prime, 0, 0), 0)
        u = self.unit * other.unit
        return QpScalar(self.prime, self.valuation + other.valuation, u, u.precision)

    def inverse(self) -> QpScalar:
        if self.is_zero():
            raise NotAUnit("zero has no inverse")
        return QpScalar(self.prime, -self.valuation, zp_inv(self.unit), self.rel_precision)

    def to_zp(self, precision: int) -> ZpInt:
        """Element of Z_p at absolute precision ``precision`` (needs valuation >= 0)."""
        if self.is_zero():
            return ZpInt(self.prime, precision, 0)
        if self.valuation < 0:
            raise NotDivisible("negative valuation is not in Z_p")
        prec = min(precision, self.valuation + self.rel_precision)
        return ZpInt(self.prime, prec, self.prime**self.valuation * self.unit.residue)

    def to_json(self) -> dict:
        v = None if self.is_zero() else self.valuation
        return {**self.unit.to_json(), "p": self.prime, "prec": self.rel_precision, "val": v}

    @classmethod
    def from_json(cls, obj: dict) -> QpScalar:
        p = int(obj["p"])
        if obj.get("val") is None:
            return cls(p, INF, ZpInt(p, 0, 0), 0)
        unit = ZpInt(p, int(obj["prec"]), int(obj["residue"]))
        return cls(p, int(obj["val"]), unit, unit.precision)


def matinv_mod(rows: Sequence[Sequence[int]], p: int, precision: int) -> list[list[int]]:
    """Inverse of a square integer matrix modulo ``p**precision``.

    Raises NotAUnit when the matrix is singular mod p.
    """
    q = p**precision
    n = len(rows)
    a = [[x % q for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] % p), None)
        if pivot is None:
            raise NotAUnit("matrix is singular modulo p")
        a[col], a[pivot] = a[pivot], a[col]
        inv = pow(a[col][col], -1, q)
        a[col] = [x * inv % q for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [(x - f * y) % q for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def rational_to_zp(num: int, den: int, p: int, precision: int) -> int:
    """Residue of ``num/den`` mod ``p**precision``; the reduced fraction must be p-integral."""
    g = math.gcd(num, den)
    num, den = num // g, den // g
    if den % p == 0:
        raise NotDivisible(f"{num}/{den} is not p-integral")
    q = p**precision
    return num * pow(den, -1, q) % q
