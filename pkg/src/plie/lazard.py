"""Sampled audits of Lazard's conditions L1-L3 with replayable certificates.

L1 (pro-p):       at every level j, ``x*y = x + y`` modulo the next level,
                  so each layer quotient is the additive group F_p^d.
L2 (fin. gen.):   every target in the level-(j+1) ball is written as
                  ``prod exp(p^(j+1) e_i) ** z_i`` via second-kind coordinates.
L3 (commutators): ``[u, v]`` for ``u, v`` in a level-``s`` ball is a
                  ``p**2``-th power of an element of that ball.

L3 needs ``s >= 2``: commutators of level-1 elements only reach exponent
2, while ``p**2``-th powers of the level-1 ball start at exponent 3.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Sequence

from .errors import PadicError
from .explog import second_kind, second_kind_inverse, standard_basis
from .groups import ChartGroup, ChartVector, commutator, mul, parse_group, power_int, random_vector, sample_seed
from .padic import INF, ZpInt
from .powermaps import pth_root


@dataclass
class LazardCertificate:
    group: str
    prime: int
    precision: int
    condition: str
    seed: int | str
    params: dict
    replay: list[dict] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "pass" if not self.failures else "fail"

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "p": self.prime,
            "prec": self.precision,
            "condition": self.condition,
            "seed": self.seed,
            "params": self.params,
            "verdict": self.verdict,
            "replay": self.replay,
            "failures": self.failures,
        }

    @classmethod
    def from_json(cls, obj: dict | str) -> LazardCertificate:
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(
            obj["group"], int(obj["p"]), int(obj["prec"]), obj["condition"], obj["seed"],
            obj.get("params", {}), list(obj.get("replay", [])), list(obj.get("failures", [])),
        )


def _cv(G: ChartGroup, v: ChartVector) -> list[str]:
    return [str(c) for c in v.coords]


def _vec(G: ChartGroup, coords: Sequence[str], prec: int) -> ChartVector:
    return ChartVector(G.prime, prec, tuple(int(c) for c in coords))


def audit_L1(G: ChartGroup, depth_j_max: int, samples: int, seed: int | str = 0, precision: int = 24) -> LazardCertificate:
    cert = LazardCertificate(G.tag, G.prime, precision, "L1", seed, {"depth": depth_j_max, "samples": samples})
    for j in range(1, depth_j_max + 1):
        for i in range(samples):
            rng = random.Random(sample_seed(f"{seed}:L1:{j}", i))
            if i == 0:
                x = y = G.zero(precision)
            else:
                x = random_vector(G, precision, rng, j, j + 2)
                y = random_vector(G, precision, rng, j, j + 2)
            e = (mul(G, x, y) - x - y).exponent
            item = {"level": j, "x": _cv(G, x), "y": _cv(G, y), "exponent": None if e == INF else e}
            cert.replay.append(item)
            if e < j + 1:
                cert.failures.append(item)
    return cert


def audit_L2(
    G: ChartGroup,
    basis: Sequence[Sequence[int]] | None = None,
    precision: int = 10,
    targets: int = 100,
    seed: int | str = 0,
    j: int = 0,
) -> LazardCertificate:
    """``precision`` is the target precision M of the second-kind coordinates."""
    basis = [tuple(b) for b in (basis or standard_basis(G.dim))]
    M = precision
    cert = LazardCertificate(
        G.tag, G.prime, M, "L2", seed,
        {"level": j, "targets": targets, "basis": [list(b) for b in basis]},
    )
    for i in range(targets):
        rng = random.Random(sample_seed(f"{seed}:L2", i))
        g = G.zero(M) if i == 0 else random_vector(G, M, rng, j + 1, j + 3)
        item = {"g": _cv(G, g)}
        try:
            z = second_kind_inverse(G, basis, j, g, M)
            item["z"] = [str(c.residue) for c in z]
            item["z_prec"] = z[0].precision
            ok = second_kind(G, basis, j, z, M) == g
        except PadicError as exc:
            item["error"] = str(exc)
            ok = False
        cert.replay.append(item)
        if not ok:
            cert.failures.append(item)
    return cert


def audit_L3(G: ChartGroup, samples: int, seed: int | str = 0, precision: int = 24, level: int = 2) -> LazardCertificate:
    """Witness ``w`` with ``w**(p**2) = [u, v]`` exactly at ``precision``.

    The root is known mod ``p**(precision - 2)``; raising its residues to
    the ``p**2``-th power reproduces the commutator mod ``p**precision``.
    """
    p = G.prime
    cert = LazardCertificate(G.tag, p, precision, "L3", seed, {"level": level, "samples": samples})
    for i in range(samples):
        rng = random.Random(sample_seed(f"{seed}:L3", i))
        if i == 0:
            u = v = G.zero(precision)
        else:
            u = random_vector(G, precision, rng, level, level + 2)
            v = random_vector(G, precision, rng, level, level + 2)
        c = commutator(G, u, v)
        item = {"u": _cv(G, u), "v": _cv(G, v), "c": _cv(G, c)}
        ok = c.exponent >= u.exponent + v.exponent and c.exponent >= level + 2
        try:
            r1 = pth_root(G, c).root
            w = pth_root(G, r1.lift(precision - 1)).root
            item["witness"] = _cv(G, w)
            item["witness_prec"] = w.precision
            ok = ok and w.exponent >= level and _p2_power(G, w, precision) == c
        except PadicError as exc:
            item["error"] = str(exc)
            ok = False
        cert.replay.append(item)
        if not ok:
            cert.failures.append(item)
    return cert


def _p2_power(G: ChartGroup, w: ChartVector, precision: int) -> ChartVector:
    wl = w.lift(precision)
    return power_int(G, power_int(G, wl, G.prime), G.prime)


def replay_certificate(cert: LazardCertificate | dict | str) -> bool:
    """Re-check every recorded instance through the public operations."""
    if not isinstance(cert, LazardCertificate):
        cert = LazardCertificate.from_json(cert)
    G = parse_group(cert.group, cert.prime)
    N = cert.precision
    for item in cert.replay:
        if cert.condition == "L1":
            x, y = _vec(G, item["x"], N), _vec(G, item["y"], N)
            if (mul(G, x, y) - x - y).exponent < item["level"] + 1:
                return False
        elif cert.condition == "L2":
            if "z" not in item:
                return False
            basis = [tuple(b) for b in cert.params["basis"]]
            z = [ZpInt(G.prime, int(item["z_prec"]), int(c)) for c in item["z"]]
            if second_kind(G, basis, cert.params["level"], z, N) != _vec(G, item["g"], N):
                return False
        elif cert.condition == "L3":
            if "witness" not in item:
                return False
            w = _vec(G, item["witness"], int(item["witness_prec"]))
            if w.exponent < cert.params["level"]:
                return False
            if _p2_power(G, w, N) != _vec(G, item["c"], N):
                return False
        else:
            return False
    return True
