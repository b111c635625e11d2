"""Numeric probes for ultrametric calculus.

Every probe returns exponent tables instead of booleans; thresholds live
with the caller.  A table row ``(m, e)`` records the worst (smallest)
exponent seen at scale ``m``.  When every sampled difference vanished at
the working precision the row is marked ``at_floor`` and ``e`` is the
floor value, i.e. only a lower bound.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from .errors import OutOfChart, UsageError
from .explog import exp_chart, log_chart
from .groups import ChartGroup, ChartVector, Heisenberg, Multiplicative
from .padic import INF, QpScalar, ZpInt, make_rng, rational_to_zp, vec_exponent, vp
from .powermaps import pth_root, tau_p

Vec = tuple[int, ...]


@dataclass(frozen=True)
class ProbeFunction:
    """A named map on chart vectors (or on ZpInt, for curves)."""

    name: str
    fn: Callable
    dim: int

    def __call__(self, x):
        return self.fn(x)


def probe_tau_p(G: ChartGroup) -> ProbeFunction:
    return ProbeFunction(f"tau_p[{G.tag}]", lambda x: tau_p(G, x), G.dim)


def probe_root(G: ChartGroup) -> ProbeFunction:
    return ProbeFunction(f"pth_root[{G.tag}]", lambda x: pth_root(G, x).root, G.dim)


def probe_log(G: ChartGroup, M: int) -> ProbeFunction:
    return ProbeFunction(f"log[{G.tag}]", lambda x: log_chart(G, x.lift(max(x.precision, 2 * M)), M)[0], G.dim)


def probe_exp(G: ChartGroup, M: int) -> ProbeFunction:
    return ProbeFunction(f"exp[{G.tag}]", lambda x: exp_chart(G, x.lift(max(x.precision, 2 * M)), M)[0], G.dim)


def probe_identity(dim: int) -> ProbeFunction:
    return ProbeFunction("id", lambda x: x, dim)


@dataclass
class DecayRow:
    m: int
    exponent: int
    at_floor: bool


@dataclass
class DecayTable:
    name: str
    rows: list[DecayRow] = field(default_factory=list)

    def exponents(self) -> list[int]:
        return [r.exponent for r in self.rows]

    def increasing_to_floor(self) -> bool:
        """Strictly increasing over the rows before the first floor row, and
        every row after the first floor row also at the floor."""
        first = next((i for i, r in enumerate(self.rows) if r.at_floor), len(self.rows))
        head = self.exponents()[:first]
        return all(a < b for a, b in zip(head, head[1:])) and all(r.at_floor for r in self.rows[first:])

    def to_tsv(self) -> str:
        lines = ["m\tratio_exponent\tat_floor"]
        lines += [f"{r.m}\t{r.exponent}\t{int(r.at_floor)}" for r in self.rows]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"name": self.name, "rows": [{"m": r.m, "exponent": r.exponent, "at_floor": r.at_floor} for r in self.rows]}


def _vec_div_scalar(coords: Vec, t: QpScalar, prec: int) -> tuple[Vec, int]:
    p = t.prime
    v = int(t.valuation)
    if v > 0:
        pv = p**v
        if any(c % pv for c in coords):
            raise OutOfChart("difference not divisible by t")
        coords = tuple(c // pv for c in coords)
        prec -= v
    elif v < 0:
        coords = tuple(c * p**-v for c in coords)
    q = p**prec
    uinv = pow(t.unit.residue, -1, q)
    return tuple(c * uinv % q for c in coords), prec


def diff_quotient(f: ProbeFunction, x: ChartVector, y: ChartVector, t: QpScalar) -> ChartVector:
    """``t^-1 (f(x + t y) - f(x))``; dividing by ``t`` costs ``val(t)`` digits."""
    if t.is_zero():
        raise UsageError("t must be nonzero")
    p = x.prime
    if t.valuation >= 0:
        ty = y.scale(t.to_zp(y.precision))
    else:
        k = int(-t.valuation)
        pk = p**k
        if any(c % pk for c in y.coords):
            raise OutOfChart("x + t y leaves the chart ball")
        u = t.unit
        ty = ChartVector(p, y.precision - k, tuple(c // pk * u.residue for c in y.coords))
    fx = f(x)
    fxt = f(x + ty)
    diff = fxt - fx
    coords, prec = _vec_div_scalar(diff.coords, t, diff.precision)
    return ChartVector(p, prec, coords)


def _linear(A: Sequence[Sequence[int | Fraction]], v: Vec, p: int, prec: int) -> Vec:
    q = p**prec
    out = []
    for row in A:
        s = 0
        for a, c in zip(row, v):
            if isinstance(a, Fraction):
                a = rational_to_zp(a.numerator, a.denominator, p, prec)
            s += a * c
        out.append(s % q)
    return tuple(out)


def _unit_vector(rng: random.Random, p: int, dim: int, prec: int) -> Vec:
    """Random vector of exponent exactly 0."""
    while True:
        u = tuple(rng.randrange(p**prec) for _ in range(dim))
        if any(c % p for c in u):
            return u


def _pair_at_scale(x0: ChartVector, m: int, rng: random.Random) -> tuple[ChartVector, ChartVector]:
    p, prec, dim = x0.prime, x0.precision, x0.dim
    pm = p**m
    r = tuple(pm * rng.randrange(p ** max(prec - m, 0)) for _ in range(dim))
    y = ChartVector(p, prec, tuple(a + b for a, b in zip(x0.coords, r)))
    u = _unit_vector(rng, p, dim, prec)
    z = ChartVector(p, prec, tuple(a + pm * b for a, b in zip(y.coords, u)))
    return y, z


def strict_diff_probe(
    f: ProbeFunction,
    x0: ChartVector,
    A: Sequence[Sequence[int | Fraction]],
    m_max: int,
    samples: int,
    seed: int | str = 0,
) -> DecayTable:
    """Worst ``e(f(z) - f(y) - A(z - y)) - e(z - y)`` over pairs with ``e(z - y) = m``
    inside the ball of exponent ``m`` around ``x0``."""
    rng = make_rng(seed)
    p = x0.prime
    table = DecayTable(f"strict:{f.name}")
    for m in range(1, m_max + 1):
        worst: int | float = INF
        floor = None
        for _ in range(samples):
            y, z = _pair_at_scale(x0, m, rng)
            fy, fz = f(y), f(z)
            prec = min(fy.precision, fz.precision)
            lin = _linear(A, (z - y).coords, p, prec)
            e = vec_exponent([a - b - c for a, b, c in zip(fz.coords, fy.coords, lin)], p, prec)
            floor = prec - m if floor is None else min(floor, prec - m)
            worst = min(worst, e - m)
        at_floor = worst >= floor
        table.rows.append(DecayRow(m, int(floor if at_floor else worst), at_floor))
    return table


Coefficient = Callable[[ChartVector, ChartVector, int], Vec]


def taylor_probe(
    f: ProbeFunction,
    x0: ChartVector,
    coefficients: Sequence[Coefficient],
    k: int,
    m_max: int,
    samples: int,
    seed: int | str = 0,
) -> DecayTable:
    """Worst ``e(R(x, y)) - k e(y - x)`` per scale, where
    ``R(x, y) = f(y) - f(x) - sum_j a_j(x, y - x)``.

    ``coefficients[j-1](x, h, prec)`` evaluates the degree-j term at base
    point ``x`` on increment ``h`` as residues mod ``p**prec``.
    """
    if len(coefficients) != k:
        raise UsageError("need exactly k coefficient evaluators")
    rng = make_rng(seed)
    p = x0.prime
    table = DecayTable(f"taylor{k}:{f.name}")
    for m in range(1, m_max + 1):
        worst: int | float = INF
        floor = None
        for _ in range(samples):
            x, y = _pair_at_scale(x0, m, rng)
            fx, fy = f(x), f(y)
            prec = min(fx.precision, fy.precision)
            h = y - x
            r = [a - b for a, b in zip(fy.coords, fx.coords)]
            for a in coefficients:
                r = [ri - ci for ri, ci in zip(r, a(x, h, prec))]
            e = vec_exponent(r, p, prec)
            floor = prec - k * m if floor is None else min(floor, prec - k * m)
            worst = min(worst, e - k * m)
        at_floor = worst >= floor
        table.rows.append(DecayRow(m, int(floor if at_floor else worst), at_floor))
    return table


def exp_taylor_coefficients(G: ChartGroup, k: int, M: int) -> list[Coefficient]:
    """Taylor terms of ``exp`` on the multiplicative group from the exponential series.

    ``exp(x + h) - exp(x) = (1 + exp(x)) * sum_j h^j / j!``.
    """
    if not isinstance(G, Multiplicative):
        raise UsageError("series coefficients are only provided for the multiplicative group")
    p = G.prime

    def make(j: int) -> Coefficient:
        def a(x: ChartVector, h: ChartVector, prec: int) -> Vec:
            ex = exp_chart(G, x.lift(max(x.precision, 2 * M)), M)[0].coords[0]
            c = rational_to_zp(h.coords[0] ** j, factorial(j), p, prec)
            return ((1 + ex) * c % p**prec,)

        return a

    return [make(j) for j in range(1, k + 1)]


def heisenberg_tau_coefficients(G: Heisenberg) -> list[Coefficient]:
    """Exact first and second order terms of the p-th power map on the Heisenberg chart.

    ``(a, b, c)^p = (pa, pb, pc + p(p-1)/2 ab)``.
    """
    p = G.prime
    kappa = p * (p - 1) // 2

    def a1(x: ChartVector, h: ChartVector, prec: int) -> Vec:
        a, b, _ = x.coords
        ha, hb, hc = h.coords
        return (p * ha, p * hb, p * hc + kappa * (a * hb + ha * b))

    def a2(x: ChartVector, h: ChartVector, prec: int) -> Vec:
        ha, hb, _ = h.coords
        return (0, 0, kappa * ha * hb)

    return [a1, a2]


# --- multilinear perturbation -------------------------------------------------


@dataclass
class MultilinReport:
    passed: bool
    checked: int
    eps_exponent: int
    e_beta: int
    worst_margin: int | float
    failures: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checked": self.checked,
            "eps_exponent": self.eps_exponent,
            "e_beta": self.e_beta,
            "worst_margin": None if self.worst_margin == INF else self.worst_margin,
            "failures": self.failures,
        }


Multilinear = Callable[[Sequence[Vec], int], Vec]


def multilin_perturb_check(
    beta: Multilinear,
    n: int,
    eps_exponent: int,
    samples: int,
    seed: int | str = 0,
    *,
    p: int,
    dim: int,
    precision: int = 24,
    e_beta: int = 0,
    identical: bool = False,
) -> MultilinReport:
    """Check ``e(beta(u) - beta(v)) >= e_beta + eps`` when ``e(u_i - v_i) >= eps``.

    ``u_i`` range over Z_p^dim (exponent >= 0).  ``beta(vectors, q)``
    returns residues mod ``q``.  With ``identical=True`` the pairs coincide.
    """
    rng = make_rng(seed)
    q = p**precision
    worst: int | float = INF
    failures = []
    for s in range(samples):
        u = [tuple(rng.randrange(q) for _ in range(dim)) for _ in range(n)]
        if identical:
            v = list(u)
        else:
            v = [tuple((c + p**eps_exponent * rng.randrange(q)) % q for c in ui) for ui in u]
        d = [a - b for a, b in zip(beta(u, q), beta(v, q))]
        e = vec_exponent(d, p, precision)
        margin = e - (e_beta + eps_exponent)
        worst = min(worst, margin)
        if margin < 0:
            failures.append({"sample": s, "u": [list(map(str, x)) for x in u], "v": [list(map(str, x)) for x in v]})
    return MultilinReport(not failures, samples, eps_exponent, e_beta, worst, failures)


def matrix_product_bilinear(m: int) -> Multilinear:
    """``(U, V) -> U V`` on row-major m x m matrices."""

    def beta(vs: Sequence[Vec], q: int) -> Vec:
        U, V = vs
        return tuple(
            sum(U[i * m + k] * V[k * m + j] for k in range(m)) % q for i in range(m) for j in range(m)
        )

    return beta


# --- the digit-reindexing curve -----------------------------------------------


def default_k_map(j: int) -> int:
    return j * j + j


def _check_k_map(k_map: Callable[[int], int], upto: int) -> None:
    prev = -1
    for j in range(upto + 1):
        k = k_map(j)
        if k <= prev or k < j:
            raise UsageError("k_map must be strictly increasing with k_map(j) >= j")
        prev = k


def schikhof_curve(k_map: Callable[[int], int], x: ZpInt, precision: int | None = None) -> ZpInt:
    """Send ``sum a_j p^j`` to ``sum a_j p^(k_map(j))``, truncated mod ``p**precision``.

    Smooth and injective, yet its derivative vanishes everywhere.
    """
    N = x.precision if precision is None else precision
    _check_k_map(k_map, x.precision)
    if N > k_map(x.precision):
        raise UsageError(f"input mod p^{x.precision} fixes the output only mod p^{k_map(x.precision)}")
    p = x.prime
    out = 0
    for j, a in enumerate(x.digits()):
        k = k_map(j)
        if k >= N:
            break
        out += a * p**k
    return ZpInt(p, N, out)


def curve_probe(
    k_map: Callable[[int], int], p: int, precision: int, m_max: int, samples: int, seed: int | str = 0
) -> DecayTable:
    """Worst ``e(gamma(x) - gamma(y)) - m`` over pairs with ``e(x - y) = m``."""
    rng = make_rng(seed)
    table = DecayTable("curve")
    for m in range(1, m_max + 1):
        worst: int | float = INF
        for _ in range(samples):
            x = ZpInt(p, precision, rng.randrange(p**precision))
            u = _unit_vector(rng, p, 1, precision)[0]
            y = ZpInt(p, precision, x.residue + p**m * u)
            d = (schikhof_curve(k_map, x) - schikhof_curve(k_map, y)).residue
            worst = min(worst, vp(d, p) - m)
        floor = precision - m
        at_floor = worst >= floor
        table.rows.append(DecayRow(m, int(floor if at_floor else worst), at_floor))
    return table


def curve_injectivity(
    k_map: Callable[[int], int],
    p: int,
    precision: int,
    count: int,
    distinct_digits: int | None = None,
    seed: int | str = 0,
) -> tuple[int, int]:
    """Map ``count`` inputs distinct mod ``p**distinct_digits``; return (inputs, distinct outputs).

    ``distinct_digits`` defaults to the least ``k >= 4`` with ``p**k >= count``.
    Input digit ``j`` lands at position ``k_map(j)``, so outputs are read
    mod ``p**k_map(distinct_digits)``, which the inputs determine exactly.
    """
    rng = make_rng(seed)
    if distinct_digits is None:
        distinct_digits = 4
        while p**distinct_digits < count:
            distinct_digits += 1
    if distinct_digits > precision:
        raise UsageError("inputs must be known to at least distinct_digits digits")
    space = p**distinct_digits
    if count > space:
        raise UsageError("more samples than residue classes")
    out_prec = k_map(distinct_digits)
    classes = rng.sample(range(space), count)
    outs = set()
    for c in classes:
        hi = rng.randrange(p ** (precision - distinct_digits))
        x = ZpInt(p, precision, c + space * hi)
        outs.add(schikhof_curve(k_map, x, out_prec).residue)
    return count, len(outs)
