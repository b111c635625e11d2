import random
from fractions import Fraction

import pytest

from plie.calculus import (
    ProbeFunction,
    curve_injectivity,
    curve_probe,
    default_k_map,
    diff_quotient,
    exp_taylor_coefficients,
    heisenberg_tau_coefficients,
    matrix_product_bilinear,
    multilin_perturb_check,
    probe_exp,
    probe_identity,
    probe_log,
    probe_tau_p,
    schikhof_curve,
    strict_diff_probe,
    taylor_probe,
)
from plie.errors import UsageError
from plie.groups import GLCongruence, Heisenberg, Multiplicative, random_vector
from plie.padic import QpScalar, ZpInt


def test_diff_quotient_identity_and_linear():
    G = Heisenberg(5)
    rng = random.Random(0)
    x, y = random_vector(G, 16, rng), random_vector(G, 16, rng)
    for t in (QpScalar.from_int(5, 1, 16), QpScalar.from_int(5, 3, 16), QpScalar.from_int(5, 25, 16)):
        q = diff_quotient(probe_identity(3), x, y, t)
        assert q == y.reduce(q.precision)
    scale7 = ProbeFunction("7x", lambda v: v.scale(7), 3)
    q = diff_quotient(scale7, x, y, QpScalar.from_int(5, 10, 16))
    assert q == y.scale(7).reduce(q.precision)
    with pytest.raises(UsageError):
        diff_quotient(probe_identity(3), x, y, QpScalar.from_int(5, 0))


def test_diff_quotient_tau_binomial():
    p, N = 5, 16
    G = Multiplicative(p)
    rng = random.Random(3)
    for _ in range(20):
        x, y = random_vector(G, N, rng), random_vector(G, N, rng)
        t = rng.choice([1, 2, 5, 10, 25])
        a, b = x.coords[0], y.coords[0]
        exact = ((1 + a + t * b) ** p - (1 + a) ** p) // t
        got = diff_quotient(probe_tau_p(G), x, y, QpScalar.from_int(p, t, N))
        assert got.coords[0] == exact % p**got.precision
        assert (got - y.scale(p).reduce(got.precision)).exponent >= 1 + min(x.exponent, y.exponent)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_strict_tau(p):
    for G in (Multiplicative(p), GLCongruence(p, 2), Heisenberg(p)):
        A = [[p * int(i == j) for j in range(G.dim)] for i in range(G.dim)]
        table = strict_diff_probe(probe_tau_p(G), G.zero(24), A, 8, 10, seed=1)
        assert [r.m for r in table.rows] == list(range(1, 9))
        assert all(r.exponent >= r.m + 1 for r in table.rows)


def test_strict_identity_at_floor():
    G = Heisenberg(5)
    A = [[int(i == j) for j in range(3)] for i in range(3)]
    table = strict_diff_probe(probe_identity(3), G.zero(20), A, 5, 5)
    assert all(r.at_floor for r in table.rows)


def test_strict_log_increasing():
    G = Multiplicative(5)
    table = strict_diff_probe(probe_log(G, 12), G.vector([5], 24), [[Fraction(1, 6)]], 6, 5, seed=2)
    assert table.increasing_to_floor()


def test_taylor_linear_at_floor():
    G = GLCongruence(5, 2)
    scale3 = ProbeFunction("3x", lambda v: v.scale(3), 4)
    table = taylor_probe(scale3, G.zero(16), [lambda x, h, prec: h.scale(3).coords], 1, 6, 5)
    assert all(r.at_floor for r in table.rows)
    with pytest.raises(UsageError):
        taylor_probe(scale3, G.zero(16), [], 1, 6, 5)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_taylor_exp(p):
    G = Multiplicative(p)
    table = taylor_probe(probe_exp(G, 20), G.zero(40), exp_taylor_coefficients(G, 2, 20), 2, 8, 5, seed=4)
    assert table.increasing_to_floor()
    assert not table.rows[0].at_floor


def test_taylor_heisenberg_tau():
    G = Heisenberg(5)
    table = taylor_probe(probe_tau_p(G), G.zero(24), heisenberg_tau_coefficients(G), 2, 6, 10)
    assert table.increasing_to_floor()


def test_table_serialization():
    G = Multiplicative(5)
    table = strict_diff_probe(probe_tau_p(G), G.zero(12), [[5]], 3, 3)
    assert table.to_tsv().splitlines()[0] == "m\tratio_exponent\tat_floor"
    assert [row["m"] for row in table.to_json()["rows"]] == [1, 2, 3]


def test_multilin():
    rep = multilin_perturb_check(matrix_product_bilinear(2), 2, 3, 500, 0, p=5, dim=4)
    assert rep.passed and rep.worst_margin >= 0
    same = multilin_perturb_check(matrix_product_bilinear(2), 2, 3, 20, 0, p=5, dim=4, identical=True)
    assert same.worst_margin == float("inf")

    def linear(vs, q):
        return tuple(7 * c % q for c in vs[0])

    assert multilin_perturb_check(linear, 1, 4, 50, 1, p=7, dim=2).passed


def test_curve_examples():
    p, N = 5, 20
    assert schikhof_curve(default_k_map, ZpInt(p, N, 0)).residue == 0
    assert schikhof_curve(default_k_map, ZpInt(p, N, 11)).residue == 51
    with pytest.raises(UsageError):
        schikhof_curve(lambda j: 5 - j, ZpInt(p, N, 3))


def test_curve_injective_and_flat():
    n, distinct = curve_injectivity(default_k_map, 5, 24, 1000)
    assert n == distinct == 1000
    ex = curve_probe(default_k_map, 5, 40, 4, 10).exponents()
    assert ex == [m * m for m in range(1, 5)]


def test_curve_precision_accounting():
    # five digits survive truncation at N = 24 for p = 3; the probe reads enough output digits anyway
    assert curve_injectivity(default_k_map, 3, 24, 1000) == (1000, 1000)
    with pytest.raises(UsageError):
        schikhof_curve(default_k_map, ZpInt(3, 2, 1), precision=7)
