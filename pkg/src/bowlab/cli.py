"""Command-line frontend: diagram utilities, envelope matrices and check suites."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import brane_core as bc
from . import fixed_points as fp
from . import fusion_mirror as fm
from . import stab_matrices as sm
from .char_calc import tpn_bundle_restrictions
from .theta_engine import DEFAULT_Q, contexts, resolve_seed

FAMILY_CHOICES = ("tp1", "tpn-separated", "tpn-co-separated")
CHECKS = ("mirror", "ns5-fusion", "d5-lemmas", "hw-qform", "duality", "ybe", "yang",
          "axioms", "zero-charge")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int
    q: complex = DEFAULT_Q
    tolerance: float = 1e-9
    count: int = 10
    output: str = "text"

    def __post_init__(self) -> None:
        if not abs(self.q) < 1:
            raise UsageError("need |q| < 1")
        if not 0 < self.tolerance <= 1e-3:
            raise UsageError("tolerance must lie in (0, 1e-3]")
        if self.count < 1:
            raise UsageError("context count must be positive")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        count = getattr(args, "count", 10)
        return cls(resolve_seed(args.seed), complex(args.q), args.tol, count,
                   "json" if args.json else "text")


def _diagram(text: str) -> bc.BraneDiagram:
    try:
        return bc.parse(text)
    except bc.DiagramError as exc:
        raise UsageError(str(exc)) from None


def _chamber(text: str | None, n: int) -> tuple[int, ...] | None:
    if text is None:
        return None
    if text.upper() in ("C1", "C2"):
        return {"C1": (1, 2), "C2": (2, 1)}[text.upper()]
    try:
        return sm.check_chamber([int(x) for x in text.replace(",", " ").split()], n)
    except ValueError as exc:
        raise UsageError(f"bad chamber {text!r}: {exc}") from None


def _build(family: str, n: int, chamber: str | None) -> sm.StabMatrix:
    size = 2 if family == "tp1" else n
    return sm.build(family, size, _chamber(chamber, size))


# Subcommands ----------------------------------------------------------------------

def cmd_parse(args, cfg):
    D = _diagram(args.diagram)
    return {"diagram": str(D), **D.to_json()}, str(D)


def cmd_normalize(args, cfg):
    D = bc.normalize(_diagram(args.diagram), args.target)
    return {"diagram": str(D), **D.to_json()}, str(D)


def cmd_dual(args, cfg):
    D = bc.dualize(_diagram(args.diagram))
    return {"diagram": str(D), **D.to_json()}, str(D)


def cmd_charges(args, cfg):
    ch = bc.charges(_diagram(args.diagram))
    return ch.to_json(), f"r = {list(ch.r)}\nc = {list(ch.c)}"


def cmd_dim(args, cfg):
    d = bc.dimension(_diagram(args.diagram))
    return {"dimension": d}, str(d)


def cmd_fixed_points(args, cfg):
    D = _diagram(args.diagram)
    r, c = fp.margins(D)
    if args.list:
        points = fp.enumerate_bcts(r, c)
        out = {"count": len(points), "points": [p.to_json() for p in points]}
        if args.ties:
            text = "\n".join(" ".join(f"{i + 1}-{j + 1}" for i, j in p.ties()) for p in points)
        else:
            text = "\n".join(repr(p) for p in points)
        return out, text
    count = fp.count_bcts(r, c)
    return {"count": count}, str(count)


def cmd_restrict(args, cfg):
    if not 1 <= args.point <= args.n:
        raise UsageError(f"point must lie in 1..{args.n}")
    gaps = tpn_bundle_restrictions(args.n, args.point, args.form)
    out = {"n": args.n, "point": args.point, "form": args.form,
           "gaps": [g.to_json() for g in gaps]}
    text = "\n".join(f"gap {k}: " + ", ".join(repr(m) for m in sorted(g.elements()))
                     for k, g in enumerate(gaps))
    return out, text


def cmd_stab(args, cfg):
    S = _build(args.family, args.n, args.chamber)
    if args.eval:
        ctx = contexts(1, max(S.size, 2), 2, seed=cfg.seed, q=cfg.q)[0]
        out = S.to_json(ctx)
        out["context"] = ctx.to_json()
    else:
        out = S.to_json()
    text = "\n".join(" | ".join(str(x) if not isinstance(x, list) else f"{complex(*x):.6g}"
                                for x in row) for row in out["entries"])
    return out, text


def cmd_rmatrix(args, cfg):
    size = 2 if args.family == "tp1" else args.n
    C, C2 = _chamber(args.chamber, size), _chamber(args.to, size)
    if C is None or C2 is None:
        raise UsageError("rmatrix needs --chamber and --to")
    ctx = contexts(1, max(size, 2), 2, seed=cfg.seed, q=cfg.q)[0]
    R = sm.r_matrix(args.family, size, C, C2, ctx)
    out = {"family": args.family, "from": list(C), "to": list(C2), "context": ctx.to_json(),
           "entries": [[[float(x.real), float(x.imag)] for x in row] for row in R]}
    return out, np.array2string(R, precision=6)


def _check_reports(args, cfg) -> list:
    name, n, seed, count, tol = args.name, args.n, cfg.seed, cfg.count, cfg.tolerance
    if name == "mirror":
        family = "tp1" if args.family == "tp1" else "tpn"
        return [fm.mirror_check_family(family, count, seed, tol)]
    if name == "ns5-fusion":
        sizes = [n] if n else [2, 3, 4, 5]
        return [fm.ns5_point_fusion_check(k, args.shift_sign, count, seed, tol) for k in sizes]
    if name == "d5-lemmas":
        signs = fm.epsilon_ratio_check()
        sizes = [n] if n else [2, 3, 4, 5]
        return [fm.d5_lemma_chain_check(w, count, seed, min(tol, 1e-10), signs=signs)
                for w in sizes]
    if name == "hw-qform":
        return [sm.hw_qform_check(args.trials, seed)]
    if name == "duality":
        sizes = [n] if n else [2, 3, 4]
        forms = [args.form] if args.form else [sm.SEPARATED, sm.COSEPARATED]
        return [sm.duality_check(k, f, count, seed, tol) for k in sizes for f in forms]
    if name == "ybe":
        family = args.family if args.family != "tp1" else "tpn-separated"
        return [sm.ybe_check(family, count, seed, max(tol, 1e-8))]
    if name == "yang":
        return [sm.yang_check(100, seed, 1e-12)]
    if name == "axioms":
        S = _build(args.family, n or 2, args.chamber)
        return [sm.axioms_check(S, sm.family_contexts(count, max(S.size, 2), seed), tol)]
    if name == "zero-charge":
        return [fm.zero_charge_check(count, seed)]
    raise UsageError(f"unknown check {name!r}")


def cmd_check(args, cfg):
    reports = _check_reports(args, cfg)
    ok = all(r.ok for r in reports)
    out = {"check": args.name, "seed": cfg.seed, "ok": ok, "reports": [r.to_json() for r in reports]}
    text = "\n".join(f"{'PASS' if r.ok else 'FAIL'} {r.name} max_error={r.max_error:.3g}"
                     for r in reports)
    return out, text, ok


# Parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                        help="RNG seed (default: BOWLAB_SEED or the built-in seed)")
    common.add_argument("--q", type=complex, default=DEFAULT_Q, help="elliptic nome, |q| < 1")
    common.add_argument("--tol", type=float, default=1e-9, help="tolerance in (0, 1e-3]")
    counted = argparse.ArgumentParser(add_help=False, parents=[common])
    counted.add_argument("--count", type=int, default=10, help="number of random contexts")

    p = argparse.ArgumentParser(prog="bowlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def diag(name: str, func: Callable, help_: str) -> argparse.ArgumentParser:
        parent = common if name == "fixed-points" else counted
        sp = sub.add_parser(name, parents=[parent], help=help_, description=help_)
        sp.add_argument("diagram", help="brane diagram, e.g. /1/2\\1\\ or s1s2b1b")
        sp.set_defaults(func=func)
        return sp

    diag("parse", cmd_parse, "parse and reprint a diagram")
    diag("normalize", cmd_normalize, "bring a diagram to separated form").add_argument(
        "--target", choices=("separated", "co-separated"), default="separated")
    diag("dual", cmd_dual, "swap NS5 and D5 branes")
    diag("charges", cmd_charges, "NS5 and D5 charge vectors")
    diag("dim", cmd_dim, "complex dimension")
    fpp = diag("fixed-points", cmd_fixed_points, "count or list torus fixed points")
    mode = fpp.add_mutually_exclusive_group()
    mode.add_argument("--count", dest="count_only", action="store_true",
                      help="print the number of fixed points (default)")
    mode.add_argument("--list", action="store_true", help="list all tie matrices")
    fpp.add_argument("--ties", action="store_true", help="with --list, print tie pairs")

    rp = sub.add_parser("restrict", parents=[counted], help="D3 bundle restrictions on T*P^(n-1)")
    rp.add_argument("--n", type=int, default=2)
    rp.add_argument("--point", type=int, default=1)
    rp.add_argument("--form", choices=(sm.SEPARATED, sm.COSEPARATED), default=sm.SEPARATED)
    rp.set_defaults(func=cmd_restrict)

    for name, func, help_ in (("stab", cmd_stab, "stable envelope matrix"),
                              ("rmatrix", cmd_rmatrix, "R-matrix S_C^-1 S_C' at one context")):
        sp = sub.add_parser(name, parents=[counted], help=help_, description=help_)
        sp.add_argument("--family", choices=FAMILY_CHOICES, default="tp1")
        sp.add_argument("--n", type=int, default=2)
        sp.add_argument("--chamber", help="C1, C2 or a permutation such as 2,1,3")
        if name == "stab":
            group = sp.add_mutually_exclusive_group()
            group.add_argument("--eval", action="store_true", help="evaluate at a seeded context")
            group.add_argument("--symbolic", dest="eval", action="store_false",
                               help="print theta expressions (default)")
        else:
            sp.add_argument("--to", help="target chamber")
        sp.set_defaults(func=func)

    cp = sub.add_parser("check", parents=[counted], help="run a verification suite",
                        description="run a verification suite; exit 0 iff it passes")
    cp.add_argument("name", choices=CHECKS)
    cp.add_argument("--n", type=int, default=None, help="size (default: the full range)")
    cp.add_argument("--family", choices=FAMILY_CHOICES, default="tp1")
    cp.add_argument("--form", choices=(sm.SEPARATED, sm.COSEPARATED), default=None)
    cp.add_argument("--chamber", default=None)
    cp.add_argument("--shift-sign", type=int, choices=(-1, 1), default=1,
                    help="direction of the h-shift in ns5-fusion")
    cp.add_argument("--trials", type=int, default=500, help="random moves for hw-qform")
    cp.set_defaults(func=cmd_check)
    return p


def _emit(payload, text: str, cfg: RunConfig) -> None:
    if cfg.output == "json":
        print(json.dumps(payload, sort_keys=True, default=_json_default))
    else:
        print(text)


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"not serializable: {type(x).__name__}")


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig.from_args(args)
        result = args.func(args, cfg)
    except (UsageError, ValueError, IndexError) as exc:
        print(f"bowlab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    ok = True
    if len(result) == 3:
        payload, text, ok = result
    else:
        payload, text = result
    _emit(payload, text, cfg)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())
