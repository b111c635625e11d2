"""Group models in chart coordinates on the ball ``{e(x) >= 1}`` of Q_p^d.

Three concrete models are provided:

* :class:`Multiplicative` -- ``1 + pZ_p`` with chart ``c <-> 1 + c``;
* :class:`GLCongruence` -- ``1 + pM_m(Z_p)`` with chart ``A <-> 1 + A``;
* :class:`Heisenberg` -- ``(a,b,c)*(a',b',c') = (a+a', b+b', c+c'+ab')``.

The models do their arithmetic on plain tuples of residues modulo a given
``q = p**P``; :class:`ChartVector` and the module-level functions wrap that
with precision bookkeeping and ball checks.  Norms are max-norms, reported
as integer exponents ``e(x)`` with ``|x| = p**-e(x)``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import OutOfChart, UsageError
from .padic import INF, NormExp, ZpInt, check_prime, make_rng, vec_exponent

Raw = tuple[int, ...]


@dataclass(frozen=True)
class ChartGroup:
    prime: int
    dim: int = field(init=False)
    radius_exponent: int = field(default=1, init=False)

    def __post_init__(self) -> None:
        check_prime(self.prime)

    @property
    def tag(self) -> str:
        raise NotImplementedError

    def mul_raw(self, x: Raw, y: Raw, q: int) -> Raw:
        raise NotImplementedError

    def inv_raw(self, x: Raw, q: int) -> Raw:
        raise NotImplementedError

    def zero(self, precision: int) -> ChartVector:
        return ChartVector(self.prime, precision, (0,) * self.dim)

    def vector(self, coords: Iterable[int], precision: int) -> ChartVector:
        v = ChartVector(self.prime, precision, tuple(coords))
        _check(self, v)
        return v


@dataclass(frozen=True)
class Multiplicative(ChartGroup):
    def __post_init__(self) -> None:
        super().__post_init__()
        object.__setattr__(self, "dim", 1)

    @property
    def tag(self) -> str:
        return "mult"

    def mul_raw(self, x: Raw, y: Raw, q: int) -> Raw:
        a, b = x[0], y[0]
        return ((a + b + a * b) % q,)

    def inv_raw(self, x: Raw, q: int) -> Raw:
        a = x[0]
        return (-a * pow(1 + a, -1, q) % q,)


@dataclass(frozen=True)
class GLCongruence(ChartGroup):
    """``1 + A`` with ``A`` an m x m matrix over pZ_p, stored row-major."""

    size: int = 2

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.size < 1:
            raise UsageError("matrix size must be >= 1")
        object.__setattr__(self, "dim", self.size * self.size)

    @property
    def tag(self) -> str:
        return f"gl:{self.size}"

    def _matmul(self, x: Raw, y: Raw) -> list[int]:
        m = self.size
        return [
            sum(x[i * m + k] * y[k * m + j] for k in range(m))
            for i in range(m)
            for j in range(m)
        ]

    def mul_raw(self, x: Raw, y: Raw, q: int) -> Raw:
        xy = self._matmul(x, y)
        return tuple((a + b + c) % q for a, b, c in zip(x, y, xy))

    def inv_raw(self, x: Raw, q: int) -> Raw:
        # (1+A)^-1 - 1 = -A (1+A)^-1; Newton X <- X(2 - (1+A)X) from X = 1 - A,
        # which is already correct mod p^2 since A = 0 mod p
        m = self.size
        eye = tuple(int(i == j) for i in range(m) for j in range(m))
        one_plus = tuple(a + b for a, b in zip(x, eye))
        X = tuple((b - a) % q for a, b in zip(x, eye))
        while True:
            R = tuple(v % q for v in self._matmul(one_plus, X))
            if R == eye:
                break
            X = tuple(v % q for v in self._matmul(X, tuple(2 * e - r for e, r in zip(eye, R))))
        return tuple(-v % q for v in self._matmul(x, X))


@dataclass(frozen=True)
class Heisenberg(ChartGroup):
    def __post_init__(self) -> None:
        super().__post_init__()
        object.__setattr__(self, "dim", 3)

    @property
    def tag(self) -> str:
        return "heis"

    def mul_raw(self, x: Raw, y: Raw, q: int) -> Raw:
        a, b, c = x
        a2, b2, c2 = y
        return ((a + a2) % q, (b + b2) % q, (c + c2 + a * b2) % q)

    def inv_raw(self, x: Raw, q: int) -> Raw:
        a, b, c = x
        return (-a % q, -b % q, (a * b - c) % q)


def parse_group(spec: str, p: int) -> ChartGroup:
    """``"mult"``, ``"heis"`` or ``"gl:<m>"``."""
    if spec == "mult":
        return Multiplicative(p)
    if spec == "heis":
        return Heisenberg(p)
    if spec.startswith("gl:"):
        try:
            m = int(spec[3:])
        except ValueError:
            raise UsageError(f"bad group spec {spec!r}") from None
        return GLCongruence(p, m)
    raise UsageError(f"unknown group {spec!r}; expected mult, heis or gl:<m>")


@dataclass(frozen=True)
class ChartVector:
    """Point of the chart ball: coordinates mod ``p**precision``, all divisible by p."""

    prime: int
    precision: int
    coords: Raw

    def __post_init__(self) -> None:
        q = self.prime**self.precision
        coords = tuple(int(c) % q for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if self.precision >= 1 and any(c % self.prime for c in coords):
            raise OutOfChart(f"coordinates {coords} not all divisible by {self.prime}")

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def modulus(self) -> int:
        return self.prime**self.precision

    @property
    def exponent(self) -> int | float:
        """``e(x)``: min coordinate valuation, ``INF`` if zero at this precision."""
        return vec_exponent(self.coords, self.prime, self.precision)

    def norm(self) -> NormExp:
        e = self.exponent
        return NormExp(e, at_floor=e == INF)

    @property
    def coords_zp(self) -> tuple[ZpInt, ...]:
        return tuple(ZpInt(self.prime, self.precision, c) for c in self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def reduce(self, precision: int) -> ChartVector:
        if precision > self.precision:
            raise UsageError("reduce() cannot raise precision; use lift()")
        return ChartVector(self.prime, precision, self.coords)

    def lift(self, precision: int) -> ChartVector:
        """Same residues read at a higher precision (explicit representative choice)."""
        return ChartVector(self.prime, precision, self.coords)

    def _other(self, other: ChartVector) -> int:
        if other.prime != self.prime or other.dim != self.dim:
            raise UsageError("prime or dimension mismatch")
        return min(self.precision, other.precision)

    def __add__(self, other: ChartVector) -> ChartVector:
        prec = self._other(other)
        return ChartVector(self.prime, prec, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: ChartVector) -> ChartVector:
        prec = self._other(other)
        return ChartVector(self.prime, prec, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> ChartVector:
        return ChartVector(self.prime, self.precision, tuple(-a for a in self.coords))

    def scale(self, z: ZpInt | int) -> ChartVector:
        if isinstance(z, int):
            return ChartVector(self.prime, self.precision, tuple(z * a for a in self.coords))
        if z.prime != self.prime:
            raise UsageError("prime mismatch")
        e = self.exponent
        prec = self.precision if e == INF else min(self.precision, z.precision + e)
        return ChartVector(self.prime, prec, tuple(z.residue * a for a in self.coords))

    def to_json(self, group: ChartGroup) -> dict:
        return {
            "group": group.tag,
            "p": self.prime,
            "prec": self.precision,
            "coords": [str(c) for c in self.coords],
        }


def vector_from_json(obj: dict | str, group: ChartGroup, precision: int | None = None) -> ChartVector:
    """Parse ChartVector JSON; ``p``/``prec``/``group`` default to the given ones."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if "group" in obj and obj["group"] != group.tag:
        raise UsageError(f"vector is for group {obj['group']}, expected {group.tag}")
    if int(obj.get("p", group.prime)) != group.prime:
        raise UsageError("prime mismatch")
    prec = int(obj.get("prec", precision if precision is not None else 0))
    if prec < 1:
        raise UsageError("vector JSON needs a precision")
    coords = [int(c) for c in obj["coords"]]
    if len(coords) != group.dim:
        raise UsageError(f"{group.tag} expects {group.dim} coordinates, got {len(coords)}")
    return ChartVector(group.prime, prec, tuple(coords))


def _check(G: ChartGroup, *vs: ChartVector) -> int:
    prec = None
    for v in vs:
        if v.prime != G.prime:
            raise UsageError(f"prime mismatch: vector {v.prime}, group {G.prime}")
        if v.dim != G.dim:
            raise UsageError(f"dimension mismatch: vector {v.dim}, group {G.dim}")
        prec = v.precision if prec is None else min(prec, v.precision)
    return prec


def mul(G: ChartGroup, x: ChartVector, y: ChartVector) -> ChartVector:
    prec = _check(G, x, y)
    return ChartVector(G.prime, prec, G.mul_raw(x.coords, y.coords, G.prime**prec))


def inv(G: ChartGroup, x: ChartVector) -> ChartVector:
    prec = _check(G, x)
    return ChartVector(G.prime, prec, G.inv_raw(x.coords, G.prime**prec))


def commutator(G: ChartGroup, x: ChartVector, y: ChartVector) -> ChartVector:
    """``x * y * x^-1 * y^-1``."""
    prec = _check(G, x, y)
    q = G.prime**prec
    xy = G.mul_raw(x.coords, y.coords, q)
    yx = G.mul_raw(y.coords, x.coords, q)
    return ChartVector(G.prime, prec, G.mul_raw(xy, G.inv_raw(yx, q), q))


def pow_raw(G: ChartGroup, x: Raw, n: int, q: int) -> Raw:
    if n < 0:
        x = G.inv_raw(x, q)
        n = -n
    result: Raw = (0,) * len(x)
    base = x
    while n:
        if n & 1:
            result = G.mul_raw(result, base, q)
        n >>= 1
        if n:
            base = G.mul_raw(base, base, q)
    return result


def power_int(G: ChartGroup, x: ChartVector, n: int) -> ChartVector:
    prec = _check(G, x)
    return ChartVector(G.prime, prec, pow_raw(G, x.coords, n, G.prime**prec))


def random_vector(
    G: ChartGroup,
    precision: int,
    rng: int | str | random.Random,
    min_exp: int = 1,
    max_exp: int | None = None,
) -> ChartVector:
    """Random chart vector whose exponent is at least a level drawn from [min_exp, max_exp].

    Drawing the level first spreads samples over several balls instead of
    piling them up at exponent ``min_exp``.
    """
    rng = make_rng(rng)
    p = G.prime
    hi = min(max_exp if max_exp is not None else min_exp + 3, precision)
    level = rng.randint(min(min_exp, hi), hi)
    scale = p**level
    span = p ** (precision - level)
    return ChartVector(p, precision, tuple(scale * rng.randrange(span) for _ in range(G.dim)))


# --- filtration audit ---------------------------------------------------------

CHECKS = ("coset", "inverse", "product", "commutator", "power")


@dataclass
class CheckInstance:
    check: str
    sample: int
    passed: bool
    lhs: int | float
    rhs: int | float
    floor: bool
    witness: dict | None = None

    def to_json(self) -> dict:
        out = {
            "check": self.check,
            "sample": self.sample,
            "passed": self.passed,
            "exponents": {"lhs": _jexp(self.lhs), "rhs": _jexp(self.rhs)},
            "floor": self.floor,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _jexp(e: int | float) -> int | None:
    return None if e == INF else int(e)


@dataclass
class FiltrationReport:
    group: str
    prime: int
    precision: int
    seed: int | str
    samples: int
    instances: list[CheckInstance]

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.instances)

    def summary(self) -> dict[str, tuple[int, int]]:
        """check name -> (passed, total)."""
        out = {c: (0, 0) for c in CHECKS}
        for i in self.instances:
            ok, tot = out[i.check]
            out[i.check] = (ok + i.passed, tot + 1)
        return out

    def failures(self) -> list[CheckInstance]:
        return [i for i in self.instances if not i.passed]

    def json_lines(self) -> list[str]:
        return [json.dumps(i.to_json(), sort_keys=True) for i in self.instances]


def sample_seed(seed: int | str, index: int) -> str:
    """Per-sample seed, so any failing sample can be replayed on its own."""
    return f"{seed}:{index}"


def audit_filtration(
    G: ChartGroup, sample_count: int, seed: int | str, precision: int = 24
) -> FiltrationReport:
    """Check the five filtration inequalities on exponents for random samples.

    For each sample ``x, y`` and ``n`` in ``[-p^3, p^3]``:

    * coset:      e(x*y) >= min(e(x), e(y)) and e(x*y - x - y) > min(e(x), e(y))
    * inverse:    e(x^-1 + x) >= 2 e(x)
    * product:    e(x*y - x - y) >= e(x) + e(y)
    * commutator: e([x, y]) >= e(x) + e(y)
    * power:      e(x^n - n x) >= 2 e(x)

    Sample 0 is always the pair (0, 0).  A difference that vanishes at the
    working precision passes with ``floor=True``.
    """
    p = G.prime
    q = p**precision
    instances: list[CheckInstance] = []

    def record(check: str, i: int, lhs, rhs, x, y=None, extra=None) -> None:
        ok = lhs >= rhs
        witness = None
        if not ok:
            witness = {"seed": sample_seed(seed, i), "x": x.to_json(G)}
            if y is not None:
                witness["y"] = y.to_json(G)
            if extra:
                witness.update(extra)
        instances.append(CheckInstance(check, i, ok, lhs, rhs, lhs == INF, witness))

    for i in range(sample_count):
        rng = random.Random(sample_seed(seed, i))
        if i == 0:
            x = y = G.zero(precision)
        else:
            x = random_vector(G, precision, rng, 1, 6)
            y = random_vector(G, precision, rng, 1, 6)
        n = rng.randint(-(p**3), p**3)
        ex, ey = x.exponent, y.exponent
        xy = mul(G, x, y)
        dev = (xy - x - y).exponent
        lo = min(ex, ey)
        # strict inequality means one more exponent step
        record("coset", i, min(xy.exponent, dev - 1 if dev != INF else INF), lo, x, y)
        record("inverse", i, (inv(G, x) + x).exponent, 2 * ex, x)
        record("product", i, dev, ex + ey, x, y)
        record("commutator", i, commutator(G, x, y).exponent, ex + ey, x, y)
        xn = ChartVector(p, precision, pow_raw(G, x.coords, n, q))
        record("power", i, (xn - x.scale(n)).exponent, 2 * ex, x, extra={"n": n})
    return FiltrationReport(G.tag, p, precision, seed, sample_count, instances)
