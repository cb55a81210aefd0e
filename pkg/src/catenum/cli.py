"""Command line front end.

    catenum graphs --g 1 --k 1 --l 1 --stable
    catenum check homotopy --dim 4 --trunc 4 --trials 50 --seed 7
    catenum evaluate --complex c.json --splitting r.json --library lib.jsonl --g 1 --n 2 -v
    catenum degree --d 3 --lambda 3
    catenum fixture graded --out DIR

Numbers are printed as exact fractions "p/q".  ``--format json`` gives one
JSON record per line.  The worker thread count for ``check`` comes from
CATENUM_THREADS (or --threads); it never changes the output.  The exit code
is 0 only when every requested check passes.
"""

import argparse
import json
import os
import sys
from fractions import Fraction

from . import graphs as gr
from . import suites
from .feynman import (MissingVertexError, apply_legs, compute_invariant, dimension_check,
                      expected_degree, invariant_potential, load_library, save_library, unhook)
from .fixtures import (graded_fixture, make_rng, random_complex, random_graded_library,
                       random_hooked_library, random_splitting, random_vertex_poly)
from .linalg import SparseMatrix
from .mixed_complex import StructuralError, load_complex, save_complex
from .splitting import ChainSplitting, invert_splitting, load_splitting, save_series
from .superpoly import INPUT, OUTPUT

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def fmt(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def plain(obj):
    """JSON-friendly copy with fractions rendered as strings."""
    if isinstance(obj, (Fraction, int)) and not isinstance(obj, bool):
        return fmt(obj)
    if isinstance(obj, (list, tuple)):
        return [plain(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if obj is None or isinstance(obj, (str, bool)):
        return obj
    return str(obj)


class Out:
    def __init__(self, mode, stream=None):
        self.mode = mode
        self.stream = stream or sys.stdout

    def record(self, rec, text):
        if self.mode == "json":
            self.stream.write(json.dumps(rec, sort_keys=True) + "\n")
        else:
            self.stream.write(text + "\n")


def poly_records(c, poly):
    out = []
    for mono in sorted(poly):
        ins = [[c.basis[v[2]], v[3]] for v in mono if v[1] == INPUT]
        outs = [[c.basis[v[2]], v[3]] for v in mono if v[1] == OUTPUT]
        out.append({"input": ins, "output": outs, "coeff": fmt(poly[mono])})
    return out


def _mono_text(rec):
    parts = [f"x[{b},u^{u}]" for b, u in rec["input"]] + [f"{b}u^{u}" for b, u in rec["output"]]
    return " ".join(parts) if parts else "1"


# -- graphs ------------------------------------------------------------------------------

def cmd_graphs(args, out):
    g, k, l = args.g, args.k, args.l
    if g < 0 or k < 1 or l < 0:
        raise StructuralError(f"(g,k,l)=({g},{k},{l}) is invalid: need g >= 0, k >= 1, l >= 0")
    classes = gr.enumerate_pd_graphs(g, k, l, stable_only=not args.all, max_vertices=args.max_vertices)
    total = Fraction(0)
    for i, cls in enumerate(classes):
        w = cls.weight
        total += w.weight
        rec = {"kind": "class", "index": i, "aut": w.aut_order, "pd": w.pd_count,
               "weight": fmt(w.weight), "graph": gr.pd_to_dict(cls.graph)}
        out.record(rec, f"class {i}: |Aut|={w.aut_order} |PD|={w.pd_count} weight={fmt(w.weight)} "
                        f"graph={gr.pd_to_json(cls.graph)}")
    out.record({"kind": "total", "classes": len(classes), "weight_sum": fmt(total)},
               f"total: {len(classes)} classes, weight sum {fmt(total)}")
    return EXIT_OK


# -- check -------------------------------------------------------------------------------

def _run_check(args):
    name = args.name
    th = args.threads
    if name == "comb":
        return suites.comb_suite(args.max)
    if name == "aut":
        return suites.aut_formula_suite(args.max)
    if name == "homotopy":
        return suites.homotopy_suite(args.trials, args.dim, args.trunc, args.seed, th)
    if name == "propagator":
        return suites.propagator_suite(args.trials, args.dim, args.trunc, args.seed, th)
    if name == "kinv":
        return suites.kinv_suite(args.m, args.lam, args.trials, args.dim, args.seed, th)
    if name == "linf":
        return suites.linf_suite(args.trials, args.dim, args.trunc, args.seed, th)
    if name == "collapse":
        return suites.collapse_suite(args.lam, args.trials, args.dim, args.seed, th)
    if name == "equivariance":
        return suites.equivariance_suite(args.lam, args.trunc, args.trials, args.dim, args.seed, th)
    if name == "dimension":
        return suites.dimension_suite(args.lam, args.trials, args.d, args.seed, th)
    raise StructuralError(f"unknown check {name}")


CHECK_DEFAULTS = {
    "comb": {"max": 40},
    "aut": {"max": 8},
    "homotopy": {"trials": 50, "dim": 6, "trunc": 5},
    "propagator": {"trials": 50, "dim": 6, "trunc": 4},
    "kinv": {"trials": 4, "dim": 4, "m": 3, "lam": 3},
    "linf": {"trials": 10, "dim": 4, "trunc": 5},
    "collapse": {"trials": 2, "dim": 3, "lam": 4},
    "equivariance": {"trials": 2, "dim": 3, "trunc": 3, "lam": 3},
    "dimension": {"trials": 1, "lam": 3},
}


def cmd_check(args, out):
    for key, val in CHECK_DEFAULTS[args.name].items():
        if getattr(args, key) is None:
            setattr(args, key, val)
    rep = _run_check(args)
    for ch in rep.checks:
        out.record({"kind": "check", "name": ch.name, "passed": ch.passed,
                    "witness": plain(ch.witness) if not ch.passed else None}, ch.line())
    n_fail = len(rep.failures())
    out.record({"kind": "summary", "check": args.name, "total": len(rep.checks), "failed": n_fail},
               f"{args.name}: {len(rep.checks) - n_fail}/{len(rep.checks)} passed")
    return EXIT_OK if rep.passed else EXIT_FAIL


# -- evaluate ----------------------------------------------------------------------------

def _emit_poly(out, c, kind, g, n, poly):
    recs = poly_records(c, poly)
    for rec in recs:
        full = {"kind": kind, "g": g, "n": n, **rec}
        out.record(full, f"{kind}[{g},{n}] {rec['coeff']} {_mono_text(rec)}")
    if not recs:
        out.record({"kind": kind, "g": g, "n": n, "zero": True}, f"{kind}[{g},{n}] 0")


def cmd_evaluate(args, out):
    c = load_complex(args.complex)
    r = load_splitting(c, args.splitting)
    lib = load_library(c, args.library)
    g, n = args.g, args.n
    ledger = [] if args.verbose else None
    try:
        total = compute_invariant(g, n, lib, r, ledger=ledger)
    except MissingVertexError as exc:
        keys = exc.missing
        out.record({"kind": "error", "missing": [list(k) for k in keys]},
                   "missing vertex keys (g,k,l): " + ", ".join(str(k) for k in keys))
        return EXIT_INPUT
    if ledger is not None:
        t = invert_splitting(r)
        for i, (pd, weight, term) in enumerate(ledger):
            value = apply_legs(c, term, r, t)
            out.record({"kind": "ledger", "index": i, "weight": fmt(weight),
                        "graph": gr.pd_to_dict(pd), "value": poly_records(c, value)},
                       f"ledger {i}: weight={fmt(weight)} terms={len(value)} graph={gr.pd_to_json(pd)}")
    _emit_poly(out, c, "iotaF", g, n, total)
    try:
        _emit_poly(out, c, "F", g, n, unhook(c, total))
    except (ValueError, ZeroDivisionError):
        out.record({"kind": "note", "text": "pairing is degenerate; F not emitted"},
                   "pairing is degenerate; F not emitted")
    return EXIT_OK


# -- degree ------------------------------------------------------------------------------

def cmd_degree(args, out):
    if args.complex:
        if not (args.splitting and args.library):
            raise StructuralError("--complex needs --splitting and --library")
        c = load_complex(args.complex)
        r = load_splitting(c, args.splitting)
        lib = load_library(c, args.library)
    else:
        rng = make_rng(args.seed)
        cw = graded_fixture(args.d)
        c = cw.complex
        r = random_splitting(rng, cw, args.lam + 2)
        lib = random_graded_library(rng, c, args.lam)
    if c.degree is None:
        raise StructuralError("complex has no degree layer")
    d = c.cy_dim
    pot = invariant_potential(lib, r, args.lam)
    rep = dimension_check(c, pot)
    for (g, n), ch in zip(sorted(pot), rep.checks):
        out.record({"kind": "degree", "g": g, "n": n, "expected": expected_degree(g, n, d),
                    "passed": ch.passed, "witness": plain(ch.witness) if not ch.passed else None},
                   f"{ch.line()} (g,n)=({g},{n})")
    out.record({"kind": "summary", "d": d, "total": len(rep.checks), "failed": len(rep.failures())},
               f"d={d}: {len(rep.checks) - len(rep.failures())}/{len(rep.checks)} homogeneous")
    return EXIT_OK if rep.passed else EXIT_FAIL


# -- fixture -----------------------------------------------------------------------------

def cmd_fixture(args, out):
    rng = make_rng(args.seed)
    lam = args.lam
    if args.kind == "graded":
        cw = graded_fixture(args.d)
        c = cw.complex
        r = random_splitting(rng, cw, lam + 2)
        lib = random_graded_library(rng, c, lam)
    elif args.kind == "random":
        cw = random_complex(rng, args.dim, require_delta=True)
        c = cw.complex
        r = random_splitting(rng, cw, lam + 2)
        lib = random_hooked_library(rng, c, lam)
    else:
        cw = random_complex(rng, args.dim, kinds=suites.HOMOLOGY_KINDS)
        c = cw.complex
        r = ChainSplitting(c, [SparseMatrix.zero(c.dim)] * (lam + 2))
        from .feynman import VertexLibrary, VertexTensor
        lib = VertexLibrary()
        for g in range(0, lam // 2 + 2):
            for n in range(1, lam + 3):
                if 0 < 2 * g - 2 + n <= lam:
                    for k in range(1, n + 1):
                        lib[(g, k, n - k)] = VertexTensor(c, g, k, n - k,
                                                          random_vertex_poly(rng, c, k, n - k, terms=2))
    os.makedirs(args.out, exist_ok=True)
    paths = {name: os.path.join(args.out, name)
             for name in ("complex.json", "splitting.json", "library.jsonl")}
    save_complex(c, paths["complex.json"])
    save_series(r, paths["splitting.json"])
    save_library(lib, paths["library.jsonl"])
    for name in sorted(paths):
        out.record({"kind": "file", "path": paths[name]}, f"wrote {paths[name]}")
    return EXIT_OK


# -- parser ------------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="catenum", description=__doc__.split("\n\n")[0])
    p.add_argument("--format", choices=["text", "json"], default="text")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("graphs", help="enumerate partially directed graphs of type (g,k,l)")
    q.add_argument("--g", type=int, required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--l", type=int, required=True)
    q.add_argument("--all", action="store_true", help="include unstable graphs (needs --max-vertices)")
    q.add_argument("--max-vertices", type=int, default=None)

    q = sub.add_parser("check", help="run an identity suite")
    q.add_argument("name", choices=sorted(CHECK_DEFAULTS))
    q.add_argument("--max", type=int)
    q.add_argument("--dim", type=int)
    q.add_argument("--trunc", type=int)
    q.add_argument("--trials", type=int)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--m", type=int)
    q.add_argument("--lambda", dest="lam", type=int)
    q.add_argument("--d", type=int, default=3)
    q.add_argument("--threads", type=int, default=None)

    q = sub.add_parser("evaluate", help="compute F_{g,n} from input files")
    q.add_argument("--complex", required=True)
    q.add_argument("--splitting", required=True)
    q.add_argument("--library", required=True)
    q.add_argument("--g", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("-v", "--verbose", action="store_true", help="print the contributing-graph ledger")

    q = sub.add_parser("degree", help="homogeneity report for the dimension axiom")
    q.add_argument("--complex")
    q.add_argument("--splitting")
    q.add_argument("--library")
    q.add_argument("--d", type=int, default=3)
    q.add_argument("--lambda", dest="lam", type=int, default=3)
    q.add_argument("--seed", type=int, default=0)

    q = sub.add_parser("fixture", help="write example input files")
    q.add_argument("kind", choices=["graded", "random", "trivial"])
    q.add_argument("--out", required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--lambda", dest="lam", type=int, default=2)
    q.add_argument("--dim", type=int, default=4)
    q.add_argument("--d", type=int, default=3)
    return p


COMMANDS = {"graphs": cmd_graphs, "check": cmd_check, "evaluate": cmd_evaluate,
            "degree": cmd_degree, "fixture": cmd_fixture}


def main(argv=None, stream=None):
    args = build_parser().parse_args(argv)
    out = Out(args.format, stream)
    try:
        return COMMANDS[args.command](args, out)
    except (StructuralError, ValueError, OSError, KeyError) as exc:
        out.record({"kind": "error", "message": str(exc)}, f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
