import json

import pytest

from conftest import all_groups
from plie.groups import GLCongruence, Multiplicative
from plie.lazard import LazardCertificate, audit_L1, audit_L2, audit_L3, replay_certificate


@pytest.mark.parametrize("p", [3, 5])
def test_certificates_pass_and_replay(p):
    for G in all_groups(p):
        for cert in (audit_L1(G, 6, 20, seed=1), audit_L2(G, targets=20, seed=1), audit_L3(G, 20, seed=1)):
            assert cert.verdict == "pass", (G.tag, cert.condition, cert.failures[:1])
            assert replay_certificate(json.dumps(cert.to_json()))


def test_vacuous_and_abelian_cases():
    G = Multiplicative(5)
    l1 = audit_L1(G, 2, 3)
    assert l1.replay[0]["exponent"] is None
    l2 = audit_L2(G, [(1,)], targets=3)
    assert l2.replay[0]["z"] == ["0"]
    l3 = audit_L3(G, 10)
    assert all(set(item["c"]) == {"0"} and set(item["witness"]) == {"0"} for item in l3.replay)


def test_l3_needs_level_two():
    cert = audit_L3(GLCongruence(5, 2), 30, seed=0, level=1)
    assert cert.verdict == "fail"


def test_replay_detects_tampering():
    G = GLCongruence(3, 2)
    for cert in (audit_L1(G, 3, 5, seed=2), audit_L2(G, targets=5, seed=2), audit_L3(G, 5, seed=2)):
        obj = cert.to_json()
        item = obj["replay"][1]
        key = {"L1": "y", "L2": "g", "L3": "c"}[cert.condition]
        item[key] = [str(int(item[key][0]) + 3), *item[key][1:]]
        if cert.condition == "L1":
            item["level"] = 20
        assert not replay_certificate(obj)


def test_certificate_json_round_trip():
    cert = audit_L2(GLCongruence(5, 2), targets=3, seed="abc")
    again = LazardCertificate.from_json(json.dumps(cert.to_json()))
    assert again.to_json() == cert.to_json()
    assert again.to_json()["verdict"] == "pass"
