"""Compact invariant suite run by ``plie selftest``."""

from __future__ import annotations

import random
from typing import Callable, Iterator

from .calculus import curve_injectivity, curve_probe, default_k_map, probe_tau_p, strict_diff_probe
from .explog import exp_chart, log_chart, second_kind, second_kind_inverse, standard_basis, trotter_sum
from .groups import ChartGroup, GLCongruence, Heisenberg, Multiplicative, inv, mul, random_vector
from .groups import audit_filtration
from .lazard import audit_L1, audit_L2, audit_L3, replay_certificate
from .padic import zp_random
from .powermaps import power_padic, pth_root, tau_p


def _groups(p: int) -> list[ChartGroup]:
    return [Multiplicative(p), GLCongruence(p, 2), Heisenberg(p)]


def _all(pred: Callable[[random.Random], bool], n: int, seed: str) -> bool:
    return all(pred(random.Random(f"{seed}:{i}")) for i in range(n))


def run_selftest(p: int, prec: int, seed: int | str, samples: int = 20) -> Iterator[tuple[str, bool]]:
    M = min(10, (prec - 4) // 2)
    for G in _groups(p):
        t = G.tag

        yield f"{t}:filtration", audit_filtration(G, samples * 5, seed, prec).passed

        def isometry(rng):
            x = random_vector(G, prec, rng)
            return inv(G, x).exponent == x.exponent and tau_p(G, x).exponent == x.exponent + 1

        yield f"{t}:isometry", _all(isometry, samples, f"{seed}:{t}:iso")

        def root_trip(rng):
            x = random_vector(G, prec, rng)
            return pth_root(G, tau_p(G, x)).root == x.reduce(prec - 1)

        yield f"{t}:pth_root", _all(root_trip, samples, f"{seed}:{t}:root")

        def hom(rng):
            x = random_vector(G, prec, rng)
            z1, z2 = zp_random(p, prec, rng), zp_random(p, prec, rng)
            return power_padic(G, x, z1 + z2) == mul(G, power_padic(G, x, z1), power_padic(G, x, z2))

        yield f"{t}:one_param_hom", _all(hom, samples, f"{seed}:{t}:hom")

        def pair(rng):
            x = random_vector(G, 2 * M + 4, rng)
            lx, rep = log_chart(G, x, M)
            ex, rep2 = exp_chart(G, lx.lift(2 * M + 4), M)
            return ex == x.reduce(M) and rep.stabilized_at <= M and rep2.stabilized_at <= M

        yield f"{t}:exp_log", _all(pair, max(samples // 2, 1), f"{seed}:{t}:pair")

        basis = standard_basis(G.dim)

        def psi(rng):
            z = [zp_random(p, M - 1, rng) for _ in range(G.dim)]
            return second_kind_inverse(G, basis, 0, second_kind(G, basis, 0, z, M), M) == z

        yield f"{t}:second_kind", _all(psi, 3, f"{seed}:{t}:psi")

        for cert in (audit_L1(G, 4, samples, seed, prec), audit_L2(G, None, M, 5, seed), audit_L3(G, samples, seed, prec)):
            yield f"{t}:lazard_{cert.condition}", cert.verdict == "pass" and replay_certificate(cert)

        A = [[p * int(i == j) for j in range(G.dim)] for i in range(G.dim)]
        table = strict_diff_probe(probe_tau_p(G), G.zero(prec), A, 6, 5, seed)
        yield f"{t}:strict_tau", all(r.exponent >= r.m + 1 for r in table.rows)

    H = Heisenberg(p)

    def trot(rng):
        x, y = random_vector(H, prec, rng), random_vector(H, prec, rng)
        s, tr = trotter_sum(H, x, y, 4, M)
        lo = min(x.exponent, y.exponent)
        return all(d >= min(n + lo, M) for n, d in tr.steps)

    yield "heis:trotter", _all(trot, 3, f"{seed}:trotter")
    n, distinct = curve_injectivity(default_k_map, p, prec, 200, seed=seed)
    yield "curve:injective", n == distinct
    ex = curve_probe(default_k_map, p, prec, 3, 5, seed).exponents()
    yield "curve:decay", all(a < b for a, b in zip(ex, ex[1:]))
