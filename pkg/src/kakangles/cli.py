"""Command-line entry point: ``kakangles <command> ...``; JSON on stdout, progress on stderr."""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import g2 as g2mod
from . import spn, sun
from .admissible import (CONSISTENT, POTENTIAL_COUNTEREXAMPLE, FormatError, loads, moment_scan,
                         random_admissible, to_json_dict)
from .integrate import CubeBlock, CubeTorusDomain, QuadratureSpec, endpoint_map
from .suites import FAIL, INCONCLUSIVE, PASS, SUITES, Budget
from .transform import g2_domain, loads_finite_type, lower, spn_domain

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64

log = logging.getLogger("kakangles")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# -- JSON with 17 significant digits ----------------------------------------------------


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_string(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, complex, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json([obj.real, obj.imag], indent, _level)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format(x, ".17g") if math.isfinite(x) else "null"
    return _string(str(obj))


def _string(s: str) -> str:
    import json

    return json.dumps(s, ensure_ascii=False)


def _emit(doc: dict, out: str | None) -> None:
    text = to_json({"schema": SCHEMA, **doc}) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- group selection ----------------------------------------------------------------------------


def _group(args) -> tuple[str, int | None]:
    g = args.group_pos or args.group
    if g is None:
        raise UsageError("a group is required (g2, spn N, sun N)")
    g = g.lower()
    if g.startswith("spn") or g.startswith("sun"):
        head, N = g[:3], g[3:].strip(":()")
        N = int(N) if N else args.N
        if N is None or N < 1:
            raise UsageError(f"{head} needs a positive N")
        return head, N
    if g == "g2":
        return "g2", None
    raise UsageError(f"unknown group {g!r}")


def _cmat(M) -> list:
    M = np.asarray(M)
    if np.iscomplexobj(M) and np.any(M.imag):
        return [[[z.real, z.imag] for z in row] for row in M]
    return [[float(z.real) for z in row] for row in M]


def _region_doc(reg) -> dict:
    return {"dim": reg.dim, "constraints": [
        {"a": [str(c) for c in a], "rhs_pi": str(r)} for a, r in reg.constraints],
        "meaning": "a . y <= rhs_pi * pi", "interior_point": list(reg.interior_point)}


def cmd_dump_structure(args) -> int:
    group, N = _group(args)
    if group == "sun":
        G = sun.su_group(N)
        chart = sun.build_su(N)
        doc = {"group": G.name, "generators": [_cmat(b) for b in G.basis],
               "chart_parameters": [{"name": q.name, "lo": q.lo, "hi": q.hi, "kind": q.kind} for q in chart.params]}
        _emit(doc, args.out)
        return EXIT_OK
    cd = g2mod.cartan() if group == "g2" else spn.cartan(N)
    G = cd.group
    chart = g2mod.build_chart() if group == "g2" else spn.build_chart(N)
    doc = {
        "group": G.name,
        "dimension": G.dim,
        "generators": [_cmat(b) for b in G.basis],
        "k_indices": list(cd.k_idx),
        "p_indices": list(cd.p_idx),
        "a_basis": [_cmat(a) for a in cd.a_basis],
        "positive_roots": [str(r) for r in cd.positive_roots],
        "region": _region_doc(cd.region),
        "M_order": len(cd.m_group),
        "M": [_cmat(m) for m in cd.m_group],
        "chart_parameters": [{"name": q.name, "lo": q.lo, "hi": q.hi, "kind": q.kind} for q in chart.params],
    }
    _emit(doc, args.out)
    return EXIT_OK


def _budget(args) -> Budget:
    for name in ("order", "samples", "threads", "P"):
        v = getattr(args, name, None)
        if v is not None and v < 0:
            raise UsageError(f"--{name} must be >= 0")
    return Budget(order=args.order, samples=args.samples, seed=args.seed, threads=args.threads or 1,
                  P=args.P, tol=args.tol)


def cmd_verify(args) -> int:
    group, N = _group(args)
    suite = args.suite
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    if group == "sun" and suite != "structure" and suite != "hull":
        raise UsageError("sun supports the structure and hull suites")
    rep = SUITES[suite](group, N, _budget(args))
    _emit(rep.to_dict(), args.out)
    return {PASS: EXIT_OK, FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}[rep.status]


def _signed_weight(x):
    return np.prod(2 * x - 1, axis=-1)


def _weight_domain(selector: str, k: int, l: int) -> CubeTorusDomain:
    sel = selector.lower()
    if sel == "g2":
        dom = g2_domain()
    elif sel.startswith("spn"):
        try:
            N = int(sel.split(":", 1)[1])
        except (IndexError, ValueError):
            raise UsageError("weight spn needs the form spn:N") from None
        dom = spn_domain(N)
    elif sel == "uniform":
        dom = CubeTorusDomain.free(k, l)
    elif sel == "signed":
        dom = CubeTorusDomain(k, l, tuple(CubeBlock((i,), endpoint_map, _signed_weight) for i in range(k)))
    else:
        raise UsageError(f"unknown weight {selector!r} (g2, spn:N, uniform, signed)")
    if (dom.k, dom.l) != (k, l):
        raise UsageError(f"weight {selector} needs k={dom.k}, l={dom.l}; input has k={k}, l={l}")
    return dom


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from exc


def cmd_scan(args) -> int:
    if args.Pmax is not None and args.Pmax < 1:
        raise UsageError("--Pmax must be >= 1")
    Pmax = args.Pmax or 4
    order = args.order or 48
    spec = QuadratureSpec.monte_carlo(args.samples or 10 ** 5, args.seed)
    if args.random:
        rng = np.random.default_rng(args.seed)
        reports = []
        for i in range(args.random):
            f = random_admissible(rng, 4, 6, 8, n_terms=int(rng.integers(1, 4)), max_num=3, max_xpow=2)
            dom = _weight_domain(args.weight or "g2", f.k, f.l)
            r = moment_scan(f, dom, Pmax, order, spec)
            if r.status == POTENTIAL_COUNTEREXAMPLE:
                log.info("function %d flagged; re-running at 10x budget", i)
                r = moment_scan(f, dom, Pmax, order * 10, spec)
            log.info("function %d/%d: %s", i + 1, args.random, r.status)
            reports.append({"index": i, "function": to_json_dict(f), **r.to_dict()})
        flagged = sum(r["status"] == POTENTIAL_COUNTEREXAMPLE for r in reports)
        _emit({"command": "scan-conjecture", "seed": args.seed, "Pmax": Pmax, "order": order,
               "weight": args.weight or "g2", "count": len(reports), "potential_counterexamples": flagged,
               "reports": reports}, args.out)
        return EXIT_FAIL if flagged else EXIT_OK
    if not args.input:
        raise UsageError("scan-conjecture needs --input FILE or --random COUNT")
    try:
        f = loads(_read_input(args.input))
    except FormatError as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    dom = _weight_domain(args.weight or "uniform", f.k, f.l)
    r = moment_scan(f, dom, Pmax, order, spec)
    _emit({"command": "scan-conjecture", "seed": args.seed, "Pmax": Pmax, "weight": args.weight or "uniform",
           "input": args.input, **r.to_dict()}, args.out)
    return EXIT_OK if r.status in (CONSISTENT, "hypothesis-not-met") else EXIT_FAIL


def cmd_lower(args) -> int:
    if not args.input:
        raise UsageError("lower needs --input FILE")
    try:
        f = loads_finite_type(_read_input(args.input))
    except FormatError as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    low = lower(f)
    _emit({"command": "lower", "admissible": to_json_dict(low.function), "metadata": low.metadata,
           "theoretical_constant": low.constant}, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--group", help="g2, spn:N or sun:N (alternative to the positional)")
    common.add_argument("--order", type=int, help="Gauss-Legendre points per axis")
    common.add_argument("--samples", type=int, help="Monte-Carlo samples")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--Pmax", type=int)
    common.add_argument("--P", type=int, help="highest power checked by the transform suite")
    common.add_argument("--tol", type=float, help="override the structural tolerance")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--input", help="input document ('-' for stdin)")
    common.add_argument("-q", "--quiet", action="store_true", help="no progress on stderr")

    p = _Parser(prog="kakangles", description="Euler-angle charts, Haar Jacobians and admissible-function scans.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    d = sub.add_parser("dump-structure", parents=[common], help="generators, Cartan data, roots, region, M")
    d.add_argument("group_pos", nargs="?", metavar="GROUP")
    d.add_argument("N", nargs="?", type=int)
    d.set_defaults(func=cmd_dump_structure)
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("group_pos", metavar="GROUP")
    v.add_argument("rest", nargs="+", metavar="[N] SUITE")
    v.set_defaults(func=cmd_verify)
    s = sub.add_parser("scan-conjecture", parents=[common], help="moment scan of an admissible function")
    s.add_argument("--weight", help="g2, spn:N, uniform or signed")
    s.add_argument("--random", type=int, help="scan COUNT random 1/4-admissible functions instead")
    s.set_defaults(func=cmd_scan, group_pos=None, N=None)
    lo = sub.add_parser("lower", parents=[common], help="lower a structured finite-type function")
    lo.set_defaults(func=cmd_lower, group_pos=None, N=None)
    return p


def _split_verify(args) -> None:
    rest = list(args.rest)
    args.N = None
    if len(rest) == 2:
        try:
            args.N = int(rest[0])
        except ValueError:
            raise UsageError(f"expected N, got {rest[0]!r}") from None
        rest = rest[1:]
    if len(rest) != 1:
        raise UsageError("usage: verify GROUP [N] SUITE")
    args.suite = rest[0]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, stream=sys.stderr,
                        format="%(message)s")
    try:
        if args.command == "verify":
            _split_verify(args)
        return args.func(args)
    except UsageError as exc:
        print(f"kakangles: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
