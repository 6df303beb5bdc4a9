"""Command-line interface: ``qbundle <command> [options]``.

Every command prints JSON (``nf`` prints plain text unless ``--json``). Checking
commands exit with status 0 iff every check passed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import bundle as bd
from . import galois as gl
from . import oper
from .hopf import NoSolution, iota
from .ncpoly import AlgebraParams, ParseError
from .rewrite import (
    BUILTIN,
    _cap_for,
    basis_words,
    critical_pairs,
    unresolved_pairs,
    load_presentation,
)

DEFAULT_N = 128
DEFAULT_M = 64


@dataclass(frozen=True)
class RunConfig:
    algebra: str = "s3"
    params: AlgebraParams = AlgebraParams()
    degree: int | None = None
    max_winding: int = 3
    N: int = DEFAULT_N
    M: int = DEFAULT_M
    out: str | None = None
    json: bool = False

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        params = AlgebraParams(Fraction(ns.p), Fraction(ns.q))
        N = ns.N
        # the widest relation (sphere, length 6) must fit inside the window
        M = ns.M if ns.M is not None else min(DEFAULT_M, N - 6)
        if not N > M >= 2:
            raise ValueError(f"need N > M >= 2, got N={N}, M={M}")
        return cls(ns.algebra, params, ns.degree, ns.max_winding, N, M, ns.out, ns.json)


def _report(name: str, checks: list[dict]) -> dict:
    ok = all(c["status"] == "pass" for c in checks)
    return {"suite": name, "status": "pass" if ok else "fail", "checks": checks}


def _check(check: str, instance: str, degree, ok: bool, witness=None, **details) -> dict:
    return bd.CheckReport(check, instance, degree, ok, witness, details).to_dict()


# suites ------------------------------------------------------------------------


def suite_bundle(cfg: RunConfig) -> dict:
    d = cfg.degree or 4
    B = bd.hopf_bundle(cfg.params)
    out = [
        bd.check_covering(B.base_covering(), d).to_dict(),
        bd.check_completeness(B.base_covering(), d).to_dict(),
        bd.check_cocycle(B.transition).to_dict(),
        bd.check_trivialization(B, 0).to_dict(),
        bd.check_trivialization(B, 1).to_dict(),
        bd.check_completeness(B.total_covering(), min(d, 3)).to_dict(),
    ]
    for k in range(1, d + 1):
        r, n = B.rank_of_image(k), B.basis_count(k)
        out.append(
            _check("rank_of_image", "s3", k, r == n, None if r == n else f"rank {r} != {n}", rank=r, basis=n)
        )
    return _report("bundle", out)


def suite_galois(cfg: RunConfig) -> dict:
    N = cfg.max_winding
    P = load_presentation("s3", cfg.params)
    l = gl.StrongConnection(P)
    out = [gl.verify_galois(N, l).to_dict()]
    one = P.one()
    span = range(-max(N, 5), max(N, 5) + 1)
    bad = [n for n in span if l.contraction(n) != one]
    out.append(_check("contraction", "s3", max(N, 5), not bad, f"m(l(u^{bad[0]})) != 1" if bad else None))
    bad = [n for n in span if not l.homogeneous(n)]
    out.append(_check("homogeneity", "s3", max(N, 5), not bad, f"l(u^{bad[0]}) not homogeneous" if bad else None))
    for n in range(-N, N + 1):
        E = l.projector(n)
        ok = E.is_idempotent() and E.entries_coinvariant()
        out.append(_check("projector", f"E({n})", None, ok, None if ok else "E^2 != E or entry not coinvariant", size=E.size))
    out.append(_base_check(P, l))
    return _report("galois", out)


def _base_check(P, l: gl.StrongConnection) -> dict:
    base = load_presentation("sphere", P.params)
    E = l.projector(1)
    try:
        g = E.in_base(base)
    except NoSolution as exc:
        return _check("express_in_base", "E(1)", 6, False, str(exc))
    ok = all(iota(g[i][j], P) == E.entries[i][j] for i in range(E.size) for j in range(E.size))
    return _check("express_in_base", "E(1)", 6, ok, entries=[[str(e) for e in row] for row in g])


def suite_reps(cfg: RunConfig) -> dict:
    out = []
    for fam in oper.FAMILIES:
        r = oper.check_rep(oper.build_rep(fam, cfg.N, cfg.params), cfg.M)
        out.append(
            _check(
                "representation",
                fam,
                None,
                r["status"] == "pass",
                residual=r["residual"],
                tolerance=r["tolerance"],
                max_norm=max(r["norms"].values()),
            )
        )
    return _report("reps", out)


def suite_pairing(cfg: RunConfig) -> dict:
    l = gl.StrongConnection(load_presentation("s3", cfg.params))
    out = []
    for n in range(1, cfg.max_winding + 1):
        rep = oper.chern_pairing(l.projector(n), cfg.N, cfg.M)
        ok = abs(rep.value - n) <= 1e-8
        out.append(_check("pairing", f"E({n})", None, ok, None if ok else f"pairing {rep.value} != {n}", **rep.to_dict()))
    return _report("pairing", out)


SUITES = {"bundle": suite_bundle, "galois": suite_galois, "reps": suite_reps, "pairing": suite_pairing}


# commands ------------------------------------------------------------------------


def cmd_nf(cfg: RunConfig, expr: str):
    P = load_presentation(cfg.algebra, cfg.params)
    f = P.poly(expr)
    D = cfg.degree or _cap_for(f.degree())
    g = P.system(D).normal_form(f)
    if cfg.json:
        return {"input": expr, "normal_form": str(g)}, True
    return str(g), True


def cmd_basis(cfg: RunConfig):
    P = load_presentation(cfg.algebra, cfg.params)
    d = 2 if cfg.degree is None else cfg.degree
    R = P.system(_cap_for(d + 1))
    return [P.alphabet.format_word(w) for w in basis_words(R, d)], True


def cmd_confluence(cfg: RunConfig):
    P = load_presentation(cfg.algebra, cfg.params)
    D = cfg.degree or 8
    raw = unresolved_pairs(P.raw_system(), D)
    R = P.system(D)
    pairs = critical_pairs(R, D)
    bad = unresolved_pairs(R, D)
    return {
        "algebra": cfg.algebra,
        "degree": D,
        "raw_unresolved": len(raw),
        "rules": len(R.rules),
        "critical_pairs": len(pairs),
        "unresolved": len(bad),
        "witness": P.alphabet.format_word(bad[0].word) if bad else None,
        "status": "pass" if not bad else "fail",
    }, not bad


def cmd_verify(cfg: RunConfig, suite: str):
    names = list(SUITES) if suite == "all" else [suite]
    reports = [SUITES[name](cfg) for name in names]
    ok = all(r["status"] == "pass" for r in reports)
    if not ok:
        first = next(c for r in reports for c in r["checks"] if c["status"] == "fail")
        print(f"counterexample: {json.dumps(first)}", file=sys.stderr)
    if len(reports) == 1:
        return reports[0], ok
    return {"suite": "all", "status": "pass" if ok else "fail", "suites": reports}, ok


def cmd_projector(cfg: RunConfig, n: int):
    l = gl.StrongConnection(load_presentation("s3", cfg.params))
    return l.projector(n).to_dict(), True


def cmd_pairing(cfg: RunConfig, n: int):
    l = gl.StrongConnection(load_presentation("s3", cfg.params))
    rep = oper.chern_pairing(l.projector(n), cfg.N, cfg.M)
    return rep.to_dict(), rep.converged()


def cmd_reps(cfg: RunConfig, family: str, check: bool):
    r = oper.check_rep(oper.build_rep(family, cfg.N, cfg.params), cfg.M)
    return r, (r["status"] == "pass") or not check


# argument parsing ------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--algebra", default="s3", help=f"builtin ({', '.join(BUILTIN)}) or a JSON path")
    c.add_argument("--p", default="1/2")
    c.add_argument("--q", default="1/4")
    c.add_argument("--degree", type=int, default=None)
    c.add_argument("--max-winding", type=int, default=3)
    c.add_argument("--N", type=int, default=DEFAULT_N)
    c.add_argument("--M", type=int, default=None)
    c.add_argument("--out", default=None, help="write output to this file")
    c.add_argument("--json", action="store_true", help="JSON output for nf")
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="qbundle", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    s = sub.add_parser("nf", parents=[common], help="normal form of an expression")
    s.add_argument("expr")
    sub.add_parser("basis", parents=[common], help="normal words of a given degree")
    sub.add_parser("confluence", parents=[common], help="critical pairs after completion")
    s = sub.add_parser("verify", parents=[common], help="run a check suite")
    s.add_argument("suite", choices=[*SUITES, "all"])
    s = sub.add_parser("projector", parents=[common], help="projector of the winding-n line bundle")
    s.add_argument("--winding", type=int, default=1)
    s = sub.add_parser("pairing", parents=[common], help="pairing of the trace with E(n)")
    s.add_argument("--winding", type=int, default=1)
    s = sub.add_parser("reps", parents=[common], help="residuals of a representation family")
    s.add_argument("--family", choices=oper.FAMILIES, default="s3-shift-b")
    s.add_argument("--check", action="store_true", help="exit 1 if the residual check fails")
    return parser


def run(argv: list[str] | None = None) -> tuple[object, bool, RunConfig]:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig.from_args(ns)
    result, ok = _dispatch(ns, cfg)
    return result, ok, cfg


def _dispatch(ns: argparse.Namespace, cfg: RunConfig) -> tuple[object, bool]:
    cmd = ns.command
    if cmd == "nf":
        return cmd_nf(cfg, ns.expr)
    if cmd == "basis":
        return cmd_basis(cfg)
    if cmd == "confluence":
        return cmd_confluence(cfg)
    if cmd == "verify":
        return cmd_verify(cfg, ns.suite)
    if cmd == "projector":
        return cmd_projector(cfg, ns.winding)
    if cmd == "pairing":
        return cmd_pairing(cfg, ns.winding)
    return cmd_reps(cfg, ns.family, ns.check)


def main(argv: list[str] | None = None) -> int:
    try:
        result, ok, cfg = run(argv)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = result if isinstance(result, str) else json.dumps(result, indent=2)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
