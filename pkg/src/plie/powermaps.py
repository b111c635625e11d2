"""The p-th power map, its inverse, and p-adic powers ``x**z`` for z in Z_p."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NonContraction, OutOfDomain, UsageError
from .groups import ChartGroup, ChartVector, _check, pow_raw
from .padic import INF, ZpInt, vec_exponent


def tau_p(G: ChartGroup, x: ChartVector) -> ChartVector:
    prec = _check(G, x)
    return ChartVector(G.prime, prec, pow_raw(G, x.coords, G.prime, G.prime**prec))


@dataclass
class PthRootResult:
    root: ChartVector
    iterations: int
    residuals: list[int | float] = field(default_factory=list)


def pth_root_raw(G: ChartGroup, x: tuple[int, ...], precision: int) -> tuple[tuple[int, ...], int, list]:
    """Solve ``y**p = x`` for ``x`` known mod ``p**precision``.

    Fixed point of ``y <- y + (x - y**p) / p`` from ``y = x / p``.  Returns
    the root mod ``p**(precision - 1)``, the iteration count and the
    residual exponents.  Raises :class:`NonContraction` if a residual
    fails to gain at least one digit.
    """
    p = G.prime
    q = p**precision
    q1 = q // p
    y = tuple(c // p for c in x)
    residuals: list[int | float] = []
    last: int | float = -1
    for it in range(1, precision + 2):
        # y is only known mod p^(P-1), but y**p mod p^P does not depend on the lift
        r = tuple((a - b) % q for a, b in zip(x, pow_raw(G, y, p, q)))
        e = vec_exponent(r, p, precision)
        residuals.append(e)
        if e == INF:
            return y, it, residuals
        if e <= last:
            raise NonContraction(f"residual exponent stalled at {e} (previous {last})")
        last = e
        y = tuple((a + b // p) % q1 for a, b in zip(y, r))
    raise NonContraction("no convergence within precision+1 iterations")


def pth_root(G: ChartGroup, x: ChartVector) -> PthRootResult:
    """The unique ``y`` in the chart ball with ``y**p = x``; needs ``e(x) >= 2``.

    The root is known to one digit less than ``x``.
    """
    prec = _check(G, x)
    if x.exponent < 2:
        raise OutOfDomain(f"p-th root needs e(x) >= 2, got e(x) = {x.exponent}")
    y, its, residuals = pth_root_raw(G, x.coords, prec)
    return PthRootResult(ChartVector(G.prime, prec - 1, y), its, residuals)


def iterated_root_raw(G: ChartGroup, x: tuple[int, ...], precision: int, n: int) -> tuple[int, ...]:
    for k in range(n):
        assert vec_exponent(x, G.prime, precision - k) >= 2, "root outside p*V"
        x, _, _ = pth_root_raw(G, x, precision - k)
    return x


@dataclass
class PowerInfo:
    result: ChartVector
    cutoff: int
    result_precision: int


def power_padic_info(G: ChartGroup, x: ChartVector, z: ZpInt, order: str = "ascending") -> PowerInfo:
    """``x**z`` as the digit product of ``(x**(p**i))**z_i``.

    Factors with ``e(x) + i >= N`` are the identity at precision ``N`` and
    are skipped; ``cutoff`` is the first skipped index.  Digits of ``z``
    beyond its own precision count as 0, so the result precision is
    ``min(N, e(x) + z.precision)``.
    """
    N = _check(G, x)
    if z.prime != G.prime:
        raise UsageError("prime mismatch")
    if order not in ("ascending", "descending"):
        raise UsageError("order must be 'ascending' or 'descending'")
    p = G.prime
    q = p**N
    ex = x.exponent
    cutoff = 0 if ex == INF else max(0, N - int(ex))
    digits = z.digits()
    factors = []
    t = x.coords
    for i in range(cutoff):
        d = digits[i] if i < len(digits) else 0
        if d:
            factors.append(pow_raw(G, t, d, q))
        t = pow_raw(G, t, p, q)
    if order == "descending":
        factors.reverse()
    acc = (0,) * G.dim
    for f in factors:
        acc = G.mul_raw(acc, f, q)
    out_prec = N if ex == INF else min(N, int(ex) + z.precision)
    return PowerInfo(ChartVector(p, out_prec, acc), cutoff, out_prec)


def power_padic(G: ChartGroup, x: ChartVector, z: ZpInt, order: str = "ascending") -> ChartVector:
    return power_padic_info(G, x, z, order).result
