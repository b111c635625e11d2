"""Logarithm and exponential as explicit limits, with convergence traces.

* ``log x = lim p**-n * x**(p**n)``
* ``exp v = lim g**n(p**n v)`` where ``g`` is the p-th root map
* Trotter: ``x + y = lim log((exp(p**n x) exp(p**n y)) ** (p**-n))``
* second-kind coordinates ``psi(z) = exp(z_1 p^(j+1) e_1) * ... * exp(z_d p^(j+1) e_d)``

Working precision must be at least twice the target: stabilizing the
limits costs up to ``M`` digits of the ``N`` available.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .errors import ConvergenceFailure, NonContraction, NotAUnit, OutOfDomain, SingularBasis, UsageError
from .groups import ChartGroup, ChartVector, _check, mul, inv, pow_raw
from .padic import INF, ZpInt, matinv_mod, vec_exponent
from .powermaps import iterated_root_raw, power_padic


@dataclass
class ConvergenceReport:
    """Trace of a limit computation.

    ``steps[k] = (n, e(t_n - t_(n-1)))`` with distances capped at the target
    ``M`` (the floor).  ``out_precision = working_precision - stabilized_at``
    is the precision of the accepted term.
    """

    working_precision: int
    target: int
    steps: list[tuple[int, int]] = field(default_factory=list)
    stabilized_at: int | None = None
    out_precision: int | None = None

    def distances(self) -> list[int]:
        return [d for _, d in self.steps]

    def is_monotone(self, start: int = 1) -> bool:
        """Distances nondecreasing from step index ``start`` on.

        The default skips the first difference ``t_1 - t_0``: for p = 3 two
        leading terms of equal size can cancel there.
        """
        d = self.distances()[start:]
        return all(a <= b for a, b in zip(d, d[1:]))

    def to_json(self) -> dict:
        return {
            "steps": [{"n": n, "distance_exponent": d} for n, d in self.steps],
            "stabilized_at": self.stabilized_at,
            "out_precision": self.out_precision,
            "working_precision": self.working_precision,
            "target": self.target,
        }

    def to_tsv(self) -> str:
        return "n\tdistance_exponent\n" + "".join(f"{n}\t{d}\n" for n, d in self.steps)


def _capped_distance(a: tuple[int, ...], b: tuple[int, ...], p: int, M: int) -> int:
    e = vec_exponent([x - y for x, y in zip(a, b)], p, M)
    return M if e == INF else int(e)


def _run_limit(G: ChartGroup, N: int, M: int, term) -> tuple[ChartVector, ConvergenceReport]:
    """Drive ``term(n) -> coords`` (valid mod p^(N-n)) until two consecutive
    distances sit at the floor ``M``."""
    if N < 2 * M:
        raise UsageError(f"working precision {N} must be >= 2 * target {M}")
    report = ConvergenceReport(N, M)
    prev = term(0)
    at_floor = 0
    for n in range(1, N - M + 1):
        cur = term(n)
        d = _capped_distance(cur, prev, G.prime, M)
        report.steps.append((n, d))
        at_floor = at_floor + 1 if d >= M else 0
        prev = cur
        if at_floor >= 2:
            report.stabilized_at = n
            report.out_precision = N - n
            return ChartVector(G.prime, M, cur), report
    raise ConvergenceFailure(f"no stabilization mod p^{M} within {N - M} steps")


def log_chart(G: ChartGroup, x: ChartVector, M: int) -> tuple[ChartVector, ConvergenceReport]:
    N = _check(G, x)
    p = G.prime
    q = p**N
    powers = [x.coords]

    def term(n: int) -> tuple[int, ...]:
        while len(powers) <= n:
            powers.append(pow_raw(G, powers[-1], p, q))
        pn = p**n
        t = powers[n]
        assert all(c % pn == 0 for c in t), "x**(p**n) not divisible by p**n"
        return tuple(c // pn for c in t)

    return _run_limit(G, N, M, term)


def exp_chart(G: ChartGroup, v: ChartVector, M: int) -> tuple[ChartVector, ConvergenceReport]:
    N = _check(G, v)
    p = G.prime
    q = p**N

    def term(n: int) -> tuple[int, ...]:
        scaled = tuple(p**n * c % q for c in v.coords)
        return iterated_root_raw(G, scaled, N, n)

    return _run_limit(G, N, M, term)


def one_param(G: ChartGroup, v: ChartVector, z: ZpInt, M: int) -> ChartVector:
    """``exp(z v)``."""
    return exp_chart(G, v.scale(z), M)[0]


# --- Trotter sum formula ------------------------------------------------------


@dataclass
class TrotterTrace:
    """Distances ``e(t_n - (x + y))`` capped at the target ``M``."""

    target: int
    working_precision: int
    steps: list[tuple[int, int]] = field(default_factory=list)
    stabilized_at: int | None = None

    def to_json(self) -> dict:
        return {
            "steps": [{"n": n, "distance_exponent": d} for n, d in self.steps],
            "stabilized_at": self.stabilized_at,
            "out_precision": self.target,
            "working_precision": self.working_precision,
        }

    def to_tsv(self) -> str:
        return "n\tdistance_exponent\n" + "".join(f"{n}\t{d}\n" for n, d in self.steps)


def trotter_term(G: ChartGroup, x: ChartVector, y: ChartVector, n: int, M: int) -> ChartVector:
    """``log((exp(p^n x) exp(p^n y)) ** (p^-n))`` mod ``p^M``.

    The inputs' residues are taken as exact representatives and lifted to
    the working precision this needs.
    """
    p = G.prime
    m_exp = 2 * M + n
    W = 2 * m_exp
    xs = x.lift(W).scale(p**n)
    ys = y.lift(W).scale(p**n)
    a, _ = exp_chart(G, xs, m_exp)
    b, _ = exp_chart(G, ys, m_exp)
    w = mul(G, a, b)
    assert w.exponent >= n + 1, "product not in the image of tau_p^n"
    root = iterated_root_raw(G, w.coords, m_exp, n)
    t, _ = log_chart(G, ChartVector(p, 2 * M, root), M)
    return t


def trotter_sum(
    G: ChartGroup, x: ChartVector, y: ChartVector, n_max: int, M: int
) -> tuple[ChartVector, TrotterTrace]:
    _check(G, x, y)
    target = (x + y).reduce(min(M, x.precision, y.precision))
    M = target.precision
    trace = TrotterTrace(M, 2 * (2 * M + n_max))
    t = None
    for n in range(1, n_max + 1):
        t = trotter_term(G, x, y, n, M)
        d = _capped_distance(t.coords, target.coords, G.prime, M)
        trace.steps.append((n, d))
        if d >= M and trace.stabilized_at is None:
            trace.stabilized_at = n
    if t is None:
        raise UsageError("n_max must be >= 1")
    return t, trace


# --- coordinates of the second kind -------------------------------------------


def _basis_matrix(basis: Sequence[Sequence[int]], p: int, d: int) -> list[list[int]]:
    """Matrix whose columns are the basis vectors."""
    if len(basis) != d or any(len(b) != d for b in basis):
        raise UsageError(f"basis must be {d} vectors of length {d}")
    return [[int(basis[i][r]) for i in range(d)] for r in range(d)]


def check_basis(basis: Sequence[Sequence[int]], p: int, d: int) -> list[list[int]]:
    B = _basis_matrix(basis, p, d)
    try:
        matinv_mod(B, p, 1)
    except NotAUnit:
        raise SingularBasis("basis is not invertible modulo p") from None
    return B


def standard_basis(d: int) -> list[tuple[int, ...]]:
    return [tuple(int(i == k) for k in range(d)) for i in range(d)]


@lru_cache(maxsize=256)
def _generators(G: ChartGroup, basis: tuple[tuple[int, ...], ...], j: int, M: int) -> tuple[ChartVector, ...]:
    p = G.prime
    gens = []
    for e in basis:
        v = ChartVector(p, 2 * M, tuple(p ** (j + 1) * c for c in e))
        gens.append(exp_chart(G, v, M)[0])
    return tuple(gens)


def second_kind(
    G: ChartGroup,
    basis: Sequence[Sequence[int]],
    j: int,
    z: Sequence[ZpInt],
    M: int,
    literal: bool = False,
) -> ChartVector:
    """``psi(z)`` mod ``p^M``.

    The basis vectors are unit-norm integer vectors (invertible mod p).
    By default each factor is evaluated as ``exp(p^(j+1) e_i) ** z_i``,
    which equals ``exp(z_i p^(j+1) e_i)`` by the one-parameter law and lets
    the d exponentials be computed once; ``literal=True`` evaluates
    ``one_param`` directly.
    """
    if j < 0:
        raise UsageError("j must be >= 0")
    p = G.prime
    check_basis(basis, p, G.dim)
    if len(z) != G.dim:
        raise UsageError(f"need {G.dim} scalars")
    acc = G.zero(M)
    if literal:
        for e, zi in zip(basis, z):
            v = ChartVector(p, 2 * M, tuple(p ** (j + 1) * c for c in e))
            acc = mul(G, acc, one_param(G, v, _lift_zp(zi, 2 * M), M))
        return acc.reduce(M)
    gens = _generators(G, tuple(tuple(int(c) for c in e) for e in basis), j, M)
    for g, zi in zip(gens, z):
        acc = mul(G, acc, power_padic(G, g, zi))
    return acc.reduce(min(acc.precision, M))


def _lift_zp(z: ZpInt, precision: int) -> ZpInt:
    return ZpInt(z.prime, max(precision, z.precision), z.residue)


@dataclass
class InverseTrace:
    iterations: int
    residuals: list[int | float]


def second_kind_inverse(
    G: ChartGroup,
    basis: Sequence[Sequence[int]],
    j: int,
    g: ChartVector,
    M: int,
    trace: InverseTrace | None = None,
) -> list[ZpInt]:
    """The unique ``z`` with ``psi(z) = g`` mod ``p^M``; ``z`` is returned mod ``p^(M-j-1)``.

    Refines ``z <- z + p^-(j+1) B^-1 coords(psi(z)^-1 * g)`` where ``B`` has
    the basis vectors as columns; each step gains at least one digit.
    """
    N = _check(G, g)
    if N < M:
        raise UsageError(f"target precision {N} below M = {M}")
    p = G.prime
    s = j + 1
    if g.exponent < s:
        raise OutOfDomain(f"target needs e(g) >= {s}, got {g.exponent}")
    B = check_basis(basis, p, G.dim)
    out_prec = M - s
    if out_prec < 1:
        raise UsageError("M must exceed j + 1")
    Binv = matinv_mod(B, p, out_prec)
    qz = p**out_prec
    g = g.reduce(M)
    z = [0] * G.dim
    residuals: list[int | float] = []
    last: int | float = -1
    for it in range(1, M + 2):
        zz = [ZpInt(p, out_prec, c) for c in z]
        h = mul(G, inv(G, second_kind(G, basis, j, zz, M)), g)
        e = h.exponent
        residuals.append(e)
        if e == INF:
            if trace is not None:
                trace.iterations, trace.residuals = it, residuals
            return zz
        if e <= last:
            raise NonContraction(f"residual exponent stalled at {e}")
        last = e
        ps = p**s
        assert all(c % ps == 0 for c in h.coords)
        hs = [c // ps for c in h.coords]
        delta = [sum(Binv[r][k] * hs[k] for k in range(G.dim)) for r in range(G.dim)]
        z = [(a + b) % qz for a, b in zip(z, delta)]
    raise NonContraction("second-kind inverse did not converge")
