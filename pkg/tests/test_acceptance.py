"""Exit criteria at desk scale: p in {3, 5, 7}, N = 24, M = 10, fixed seeds.

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import random

import pytest

from conftest import all_groups
from oracles import exp_series, heis_exp, heis_log, matrix_exp_series, matrix_mercator, mercator
from plie.calculus import (
    curve_injectivity,
    curve_probe,
    default_k_map,
    exp_taylor_coefficients,
    probe_exp,
    probe_tau_p,
    strict_diff_probe,
    taylor_probe,
)
from plie.explog import exp_chart, log_chart, second_kind, second_kind_inverse, standard_basis, trotter_sum
from plie.groups import GLCongruence, Heisenberg, Multiplicative, audit_filtration, inv, mul, random_vector
from plie.lazard import audit_L1, audit_L2, audit_L3, replay_certificate
from plie.padic import INF, zp_random
from plie.powermaps import power_padic, tau_p

PRIMES = (3, 5, 7)
N, M = 24, 10
SEED = 20240601

pytestmark = pytest.mark.acceptance


def crit(number, title):
    return pytest.mark.criterion(number, title)


def rng_for(*parts):
    return random.Random(":".join(map(str, (SEED, *parts))))


def series_oracle(G, x, which):
    p = G.prime
    if isinstance(G, Multiplicative):
        fn = mercator if which == "log" else exp_series
        return (fn(x.coords[0], p, M),)
    if isinstance(G, GLCongruence):
        fn = matrix_mercator if which == "log" else matrix_exp_series
        return fn(x.coords, G.size, p, M)
    return (heis_log if which == "log" else heis_exp)(x.coords, p, M)


# ---------------------------------------------------------------------------


@crit(1, "log agrees with Mercator / matrix-Mercator series mod p^10")
@pytest.mark.parametrize("p", PRIMES)
@pytest.mark.parametrize("tag", ["mult", "gl2"])
def test_c01_log_oracle(p, tag):
    G = Multiplicative(p) if tag == "mult" else GLCongruence(p, 2)
    rng = rng_for(1, p, tag)
    for _ in range(200):
        x = random_vector(G, N, rng)
        assert log_chart(G, x, M)[0].coords == series_oracle(G, x, "log")


@crit(2, "exp agrees with the exponential series mod p^10")
@pytest.mark.parametrize("p", PRIMES)
@pytest.mark.parametrize("tag", ["mult", "gl2"])
def test_c02_exp_oracle(p, tag):
    G = Multiplicative(p) if tag == "mult" else GLCongruence(p, 2)
    rng = rng_for(2, p, tag)
    for _ in range(200):
        v = random_vector(G, N, rng)
        assert exp_chart(G, v, M)[0].coords == series_oracle(G, v, "exp")


REPORTS: list[tuple[int, object]] = []


@crit(3, "exp(log x) = x and log(exp v) = v mod p^10, all groups")
@pytest.mark.parametrize("p", PRIMES)
def test_c03_inverse_pair(p):
    for G in all_groups(p):
        rng = rng_for(3, p, G.tag)
        for _ in range(200):
            x = random_vector(G, N, rng)
            lx, r1 = log_chart(G, x, M)
            back, r2 = exp_chart(G, lx.lift(N), M)
            assert back == x.reduce(M)
            v = random_vector(G, N, rng)
            ev, r3 = exp_chart(G, v, M)
            again, r4 = log_chart(G, ev.lift(N), M)
            assert again == v.reduce(M)
            REPORTS.extend((p, r) for r in (r1, r2, r3, r4))


def _capped(e):
    return e if e < M else INF


@crit(4, "isometries: log, exp, inverse preserve e; tau_p raises e by one")
@pytest.mark.parametrize("p", PRIMES)
def test_c04_isometries(p):
    for G in all_groups(p):
        rng = rng_for(4, p, G.tag)
        for _ in range(200):
            x = random_vector(G, N, rng, 1, 6)
            e = x.exponent
            assert log_chart(G, x, M)[0].exponent == _capped(e)
            assert exp_chart(G, x, M)[0].exponent == _capped(e)
            assert inv(G, x).exponent == e
            assert tau_p(G, x).exponent == e + 1


@crit(5, "filtration audit: five exponent inequalities plus e(x^z - z x) >= 2 e(x)")
@pytest.mark.parametrize("p", PRIMES)
def test_c05_filtration(p):
    for G in all_groups(p):
        rep = audit_filtration(G, 500, SEED, N)
        assert rep.passed, [c.to_json() for c in rep.failures()[:3]]
        assert all(total == 500 for total, _ in rep.summary().values())
        rng = rng_for(5, p, G.tag)
        for _ in range(500):
            x = random_vector(G, N, rng)
            z = zp_random(p, N, rng)
            assert (power_padic(G, x, z) - x.scale(z)).exponent >= 2 * x.exponent


@crit(6, "one-parameter homomorphism exact; log(x^z) = z log(x) mod p^9")
@pytest.mark.parametrize("p", PRIMES)
def test_c06_one_parameter(p):
    for G in all_groups(p):
        rng = rng_for(6, p, G.tag)
        for _ in range(200):
            x = random_vector(G, N, rng)
            z1, z2 = zp_random(p, N, rng), zp_random(p, N, rng)
            assert power_padic(G, x, z1 + z2) == mul(G, power_padic(G, x, z1), power_padic(G, x, z2))
            lhs = log_chart(G, power_padic(G, x, z1), M)[0].reduce(9)
            rhs = log_chart(G, x, M)[0].scale(z1).reduce(9)
            assert lhs == rhs


@crit(7, "Trotter on Heisenberg: distance >= n + min(e(x), e(y)) up to the floor; t_8 = x + y mod p^9")
@pytest.mark.parametrize("p", PRIMES)
def test_c07_trotter(p):
    H = Heisenberg(p)
    rng = rng_for(7, p)
    pairs = 34 if p != 7 else 32  # 100 pairs over the three primes
    for _ in range(pairs):
        x, y = random_vector(H, N, rng), random_vector(H, N, rng)
        lo = min(x.exponent, y.exponent)
        t8, trace = trotter_sum(H, x, y, 8, M)
        assert [n for n, _ in trace.steps] == list(range(1, 9))
        # distances are measured mod p^M, so M is the largest observable value
        assert all(d >= min(n + lo, M) for n, d in trace.steps), trace.steps
        assert t8.reduce(9) == (x + y).reduce(9)


@crit(8, "second-kind round trip mod p^(M-j-1), j in {0, 1}")
@pytest.mark.parametrize("p", PRIMES)
@pytest.mark.parametrize("j", [0, 1])
def test_c08_second_kind(p, j):
    for G in all_groups(p):
        basis = standard_basis(G.dim)
        rng = rng_for(8, p, j, G.tag)
        for _ in range(100):
            z = [zp_random(p, M - j - 1, rng) for _ in range(G.dim)]
            assert second_kind_inverse(G, basis, j, second_kind(G, basis, j, z, M), M) == z


@crit(9, "Lazard L1 (depth 6), L2 (100 targets), L3 (100 pairs) pass and replay")
@pytest.mark.parametrize("p", PRIMES)
def test_c09_lazard(p):
    for G in all_groups(p):
        certs = [audit_L1(G, 6, 100, SEED, N), audit_L2(G, None, M, 100, SEED), audit_L3(G, 100, SEED, N)]
        for cert in certs:
            assert cert.verdict == "pass", (G.tag, cert.condition, cert.failures[:1])
            assert replay_certificate(cert.to_json())


@crit(10, "calculus probes: strict tau_p, Taylor exp, Schikhof curve")
@pytest.mark.parametrize("p", PRIMES)
def test_c10_probes(p):
    for G in all_groups(p):
        A = [[p * int(i == k) for k in range(G.dim)] for i in range(G.dim)]
        table = strict_diff_probe(probe_tau_p(G), G.zero(N), A, 8, 20, SEED)
        assert [r.m for r in table.rows] == list(range(1, 9))
        assert all(r.exponent >= r.m + 1 for r in table.rows), table.to_tsv()
    G = Multiplicative(p)
    # working precision 2 * 20 leaves room for eight scales of second-order decay
    taylor = taylor_probe(probe_exp(G, 20), G.zero(40), exp_taylor_coefficients(G, 2, 20), 2, 8, 10, SEED)
    assert taylor.increasing_to_floor(), taylor.to_tsv()
    assert not taylor.rows[0].at_floor
    n, distinct = curve_injectivity(default_k_map, p, N, 1000, seed=SEED)
    assert n == distinct == 1000
    ex = curve_probe(default_k_map, p, 40, 5, 20, SEED).exponents()
    gaps = [b - a for a, b in zip(ex, ex[1:])]
    assert all(g1 < g2 for g1, g2 in zip(gaps, gaps[1:])), ex


@crit(11, "convergence accounting: N_out = N - n*, monotone distances, n* <= M at N = 2M + 4")
def test_c11_convergence_accounting():
    assert N == 2 * M + 4
    if not REPORTS:
        for p in PRIMES:
            for G in all_groups(p):
                rng = rng_for(11, p, G.tag)
                for _ in range(50):
                    x = random_vector(G, N, rng)
                    REPORTS.append((p, log_chart(G, x, M)[1]))
                    REPORTS.append((p, exp_chart(G, x, M)[1]))
    assert len(REPORTS) >= 450
    for p, rep in REPORTS:
        assert rep.working_precision == N
        assert rep.out_precision == N - rep.stabilized_at
        assert rep.stabilized_at <= M
        assert rep.distances()[-1] == M
        # nondecreasing from the second step on; for p = 3 the first step can cancel
        assert rep.is_monotone(start=1), rep.steps
        if p > 3:
            assert rep.is_monotone(start=0), rep.steps
