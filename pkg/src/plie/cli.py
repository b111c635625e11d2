"""``plie`` command line.

Exit codes: 0 success, 1 domain error, 2 verification failure, 3 usage error.
Data goes to stdout (or ``--out``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .calculus import (
    curve_injectivity,
    curve_probe,
    default_k_map,
    exp_taylor_coefficients,
    heisenberg_tau_coefficients,
    matrix_product_bilinear,
    multilin_perturb_check,
    probe_exp,
    probe_tau_p,
    strict_diff_probe,
    taylor_probe,
)
from .errors import PadicError, UsageError
from .explog import exp_chart, log_chart, second_kind, second_kind_inverse, standard_basis, trotter_sum
from .groups import Heisenberg, Multiplicative, audit_filtration, parse_group, vector_from_json
from .lazard import audit_L1, audit_L2, audit_L3, replay_certificate
from .padic import ZpInt, check_prime
from .powermaps import power_padic_info, pth_root
from .selftest import run_selftest

EXIT_OK, EXIT_DOMAIN, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class VerificationFailed(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--p", type=int, required=True, help="odd prime")
    c.add_argument("--prec", type=int, default=24, help="working precision N")
    c.add_argument("--group", default="mult", help="mult | gl:<m> | heis")
    c.add_argument("--seed", default="0")
    c.add_argument("--samples", type=int, default=100)
    c.add_argument("--target-prec", type=int, default=10, dest="target_prec")
    c.add_argument("--n-max", type=int, default=8, dest="n_max")
    c.add_argument("--out")
    c.add_argument("--table", action="store_true", help="emit convergence traces as TSV")
    return c


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plie", description="p-adic chart-group numerics")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common()
    for name in ("log", "exp", "root"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--x", required=True, help="ChartVector JSON")
    sp = sub.add_parser("pow", parents=[common])
    sp.add_argument("--x", required=True)
    sp.add_argument("--z", required=True, help="ZpInt JSON")
    sp = sub.add_parser("trotter", parents=[common])
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp = sub.add_parser("psi", parents=[common])
    sp.add_argument("--z", required=True, help="JSON list of decimal strings or ZpInt objects")
    sp.add_argument("--j", type=int, default=0)
    sp = sub.add_parser("psi-inv", parents=[common])
    sp.add_argument("--x", required=True)
    sp.add_argument("--j", type=int, default=0)
    sub.add_parser("audit-filtration", parents=[common])
    sp = sub.add_parser("lazard", parents=[common])
    sp.add_argument("--condition", required=True, choices=["l1", "l2", "l3"])
    sp.add_argument("--depth", type=int, default=6)
    sp.add_argument("--level", type=int, default=None, help="ball level (L2: j, default 0; L3: default 2)")
    sp = sub.add_parser("probe", parents=[common])
    sp.add_argument("kind", choices=["strict", "taylor", "multilin", "curve"])
    sp.add_argument("--m-max", type=int, default=8, dest="m_max")
    sp.add_argument("--eps", type=int, default=3)
    sub.add_parser("selftest", parents=[common])
    return parser


def _seed(s: str) -> int | str:
    try:
        return int(s)
    except ValueError:
        return s


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _zp_list(raw: str, p: int, prec: int) -> list[ZpInt]:
    items = json.loads(raw)
    out = []
    for it in items:
        if isinstance(it, dict):
            out.append(ZpInt.from_json(it, p, prec))
        else:
            out.append(ZpInt(p, prec, int(it)))
    return out


def _dispatch(args) -> None:
    p = check_prime(args.p)
    if args.prec < 4:
        raise UsageError("--prec must be >= 4")
    G = parse_group(args.group, p)
    N, M, seed = args.prec, args.target_prec, _seed(args.seed)
    cmd = args.command

    def vec(raw: str):
        return vector_from_json(raw, G, N)

    if cmd in ("log", "exp"):
        x = vec(args.x)
        fn = log_chart if cmd == "log" else exp_chart
        res, rep = fn(G, x, M)
        if args.table:
            _emit(args, rep.to_tsv())
        else:
            _emit(args, _dump({"result": res.to_json(G), "report": rep.to_json()}))
    elif cmd == "root":
        r = pth_root(G, vec(args.x))
        _emit(args, _dump({
            "result": r.root.to_json(G),
            "iterations": r.iterations,
            "residuals": [None if e == float("inf") else e for e in r.residuals],
        }))
    elif cmd == "pow":
        z = ZpInt.from_json(args.z, p, N)
        info = power_padic_info(G, vec(args.x), z)
        _emit(args, _dump({
            "result": info.result.to_json(G),
            "provenance": {"cutoff": info.cutoff, "result_precision": info.result_precision},
        }))
    elif cmd == "trotter":
        t, tr = trotter_sum(G, vec(args.x), vec(args.y), args.n_max, M)
        if args.table:
            _emit(args, tr.to_tsv())
        else:
            _emit(args, _dump({"result": t.to_json(G), "report": tr.to_json()}))
    elif cmd == "psi":
        z = _zp_list(args.z, p, M - args.j - 1)
        g = second_kind(G, standard_basis(G.dim), args.j, z, M)
        _emit(args, _dump({"result": g.to_json(G), "j": args.j}))
    elif cmd == "psi-inv":
        z = second_kind_inverse(G, standard_basis(G.dim), args.j, vec(args.x), M)
        _emit(args, _dump({"result": [c.to_json() for c in z], "j": args.j}))
    elif cmd == "audit-filtration":
        rep = audit_filtration(G, args.samples, seed, N)
        _emit(args, "\n".join(rep.json_lines()))
        if not rep.passed:
            raise VerificationFailed(f"{len(rep.failures())} filtration checks failed")
    elif cmd == "lazard":
        if args.condition == "l1":
            cert = audit_L1(G, args.depth, args.samples, seed, N)
        elif args.condition == "l2":
            cert = audit_L2(G, None, M, args.samples, seed, j=args.level or 0)
        else:
            cert = audit_L3(G, args.samples, seed, N, level=args.level if args.level is not None else 2)
        _emit(args, _dump(cert.to_json()))
        if cert.verdict != "pass" or not replay_certificate(cert):
            raise VerificationFailed(f"Lazard {args.condition} certificate failed")
    elif cmd == "probe":
        _probe(args, G, N, M, seed)
    elif cmd == "selftest":
        ok = True
        lines = []
        for name, passed in run_selftest(p, N, seed, samples=min(args.samples, 20)):
            ok &= passed
            lines.append(_dump({"check": name, "passed": passed}))
            print(("PASS " if passed else "FAIL ") + name, file=sys.stderr)
        _emit(args, "\n".join(lines))
        if not ok:
            raise VerificationFailed("selftest failed")


def _probe(args, G, N: int, M: int, seed) -> None:
    p = G.prime
    kind = args.kind
    if kind == "strict":
        A = [[p * int(i == j) for j in range(G.dim)] for i in range(G.dim)]
        table = strict_diff_probe(probe_tau_p(G), G.zero(N), A, args.m_max, args.samples, seed)
        ok = all(r.exponent >= r.m + 1 for r in table.rows)
    elif kind == "taylor":
        if isinstance(G, Multiplicative):
            table = taylor_probe(probe_exp(G, N), G.zero(2 * N), exp_taylor_coefficients(G, 2, N), 2,
                                 args.m_max, args.samples, seed)
        elif isinstance(G, Heisenberg):
            table = taylor_probe(probe_tau_p(G), G.zero(N), heisenberg_tau_coefficients(G), 2,
                                 args.m_max, args.samples, seed)
        else:
            raise UsageError("taylor probe supports mult (exp) and heis (tau_p)")
        ok = table.increasing_to_floor()
    elif kind == "multilin":
        rep = multilin_perturb_check(matrix_product_bilinear(2), 2, args.eps, args.samples, seed, p=p, dim=4,
                                     precision=N)
        _emit(args, _dump(rep.to_json()))
        if not rep.passed:
            raise VerificationFailed("multilinear bound violated")
        return
    else:
        table = curve_probe(default_k_map, p, N, args.m_max, args.samples, seed)
        n, distinct = curve_injectivity(default_k_map, p, N, min(args.samples, p**N), seed=seed)
        ex = [r.exponent for r in table.rows if not r.at_floor]
        ok = n == distinct and all(a < b for a, b in zip(ex, ex[1:]))
    if args.table:
        _emit(args, table.to_tsv())
    else:
        _emit(args, _dump(table.to_json()))
    if not ok:
        raise VerificationFailed(f"{kind} probe below threshold")


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        _dispatch(args)
    except UsageError as exc:
        print(f"plie: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationFailed as exc:
        print(f"plie: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except PadicError as exc:
        print(f"plie: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"plie: usage error: bad input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    sys.exit(run())
