"""Command-line interface.

Subcommands: classify, solve, oracle, gen, reduce, selftest.
Exit codes: 0 decided, 3 parse error, 4 unsupported combination,
5 oracle budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Optional

from . import __version__
from .cardcsp import CspError
from .classify import classify_pattern, route_for
from .engine import UnsupportedCombination, solve_dispatch
from .gadgets import (GadgetError, dump_mreach, formula_library,
                      gen_matched_reach, load_mreach, reduce_reach_aa,
                      reduce_reach_aaa, reduce_reach_eaa)
from .logic import FormulaError, parse_formula
from .oracles import OracleBudgetError, oracle_models
from .saturation import PatternError
from .structures import (StructureError, dump_graph, graph_to_structure,
                         graph_view, load_structure)

EXIT_OK = 0
EXIT_PARSE = 3
EXIT_UNSUPPORTED = 4
EXIT_BUDGET = 5

_CLASS_RANK = {"basic": 2, "undirected": 1, "arbitrary": 0}


def _load_formula(args):
    if getattr(args, "library", None):
        lib = formula_library()
        if args.library not in lib:
            raise FormulaError(
                f"unknown library formula {args.library!r}; "
                f"available: {', '.join(sorted(lib))}")
        return lib[args.library]
    with open(args.formula, "r", encoding="utf-8") as fh:
        return parse_formula(fh.read())


def _load_structure_file(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return load_structure(fh.read())


def _detected_class(s) -> str:
    from .engine import detect_structure_class
    return detect_structure_class(s)


def _check_class_assertion(asserted: Optional[str], detected: str) -> None:
    if asserted is None:
        return
    if _CLASS_RANK[asserted] > _CLASS_RANK[detected]:
        raise UnsupportedCombination(
            f"asserted class {asserted!r} but the input is only {detected!r}")


def _cmd_classify(args) -> int:
    label = classify_pattern(args.mode, args.pattern, args.cls)
    route = route_for(args.mode, args.pattern, args.cls)
    if args.json:
        print(json.dumps({"bucket": label.bucket,
                          "hardness_note": label.hardness_note,
                          "route": route}))
    else:
        note = f" ({label.hardness_note})" if label.hardness_note else ""
        print(f"{label.bucket}{note} route={route}")
    return EXIT_OK


def _print_decision(dec, args) -> None:
    if args.json:
        print(json.dumps({
            "answer": "yes" if dec.answer else "no",
            "route": dec.route,
            "label": {"bucket": dec.label.bucket,
                      "hardness_note": dec.label.hardness_note},
            "stats": {k: v for k, v in dec.stats.items()
                      if isinstance(v, (str, int, bool, float))},
        }))
        return
    print(f"{'YES' if dec.answer else 'NO'} (route={dec.route}, "
          f"label={dec.label.bucket})")
    if args.trace and "case" in dec.stats:
        print(f"trace: case={dec.stats['case']}")
    if args.trace and "fallback" in dec.stats:
        print(f"trace: fallback={dec.stats['fallback']}")


def _cmd_solve(args, force_oracle: bool = False) -> int:
    f = _load_formula(args)
    s = _load_structure_file(args.structure)
    _check_class_assertion(args.cls, _detected_class(s))
    override = "OracleOnly" if force_oracle else args.route
    dec = solve_dispatch(f, s, args.k, route_override=override)
    _print_decision(dec, args)
    return EXIT_OK


def _cmd_gen(args) -> int:
    inst = gen_matched_reach(args.n, args.k, args.seed, args.target)
    text = dump_mreach(inst)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_reduce(args) -> int:
    with open(args.input, "r", encoding="utf-8") as fh:
        inst = load_mreach(fh.read())
    reducer = {"aa": reduce_reach_aa, "aaa": reduce_reach_aaa,
               "eaa": reduce_reach_eaa}[args.variant]
    graph, budget = reducer(inst)
    text = dump_graph(graph)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"k' = {budget}", file=sys.stderr)
    return EXIT_OK


def _cmd_selftest(args) -> int:
    failures = _run_selftest(max_n=args.max_n, max_k=args.max_k,
                             samples=args.samples, seed=args.seed)
    if failures:
        for f in failures[:20]:
            print(f"MISMATCH: {f}")
        print(f"selftest FAILED with {len(failures)} mismatches")
        return 1
    print("selftest OK")
    return EXIT_OK


def _run_selftest(max_n: int, max_k: int, samples: int, seed: int) -> list:
    """Oracle-equivalence sweeps over random instances (reduced scale)."""
    from . import cardcsp, saturation, wsat
    from .oracles import oracle_csp, oracle_saturation, oracle_wsat
    from .structures import basic_graph

    rng = random.Random(seed)
    failures = []

    graphs = []
    for n in range(2, max_n + 1):
        for _ in range(samples):
            edges = [(u, v) for u in range(n) for v in range(u + 1, n)
                     if rng.random() < rng.choice((0.2, 0.5, 0.8))]
            graphs.append(basic_graph(n, edges))

    patterns = list(saturation.all_pattern_graphs())
    rng.shuffle(patterns)
    for p in patterns[:64]:
        for g in graphs:
            for k in range(max_k + 1):
                want = oracle_saturation(p, g, k)
                got = saturation.solve_saturation_ge(p, g, k)
                if want != got:
                    failures.append(("saturation", saturation.format_pattern(p),
                                     sorted(g.adjacency), k, want, got))

    sets3 = [frozenset(s) for s in
             ([], [0], [1], [2], [0, 1], [0, 2], [1, 2], [0, 1, 2])]
    for cs in sets3:
        for ds in sets3:
            for _ in range(max(1, samples // 2)):
                n = rng.randint(2, max_n)
                pairs = frozenset(frozenset((u, v))
                                  for u in range(n) for v in range(u + 1, n)
                                  if rng.random() < 0.5)
                for k in range(max_k + 1):
                    inst = cardcsp.CspInstance(n, cs, ds, pairs,
                                               frozenset({0, 1}), k)
                    want = oracle_csp(inst)
                    got = cardcsp.solve_csp_le(inst)
                    if want != got:
                        failures.append(("csp", sorted(cs), sorted(ds), n, k,
                                         want, got))

    for _ in range(samples * 20):
        nv = rng.randint(1, 10)
        clauses = []
        for _ in range(rng.randint(1, 2 * nv)):
            width = rng.randint(1, 3)
            vs = rng.sample(range(1, nv + 1), min(width, nv))
            clauses.append([v if rng.random() < 0.5 else -v for v in vs])
        k = rng.randint(0, max_k)
        inst = wsat.make_wcnf(nv, clauses, k, "le")
        want = oracle_wsat(inst)
        got = wsat.solve_wsat_le_searchtree(inst)
        if want != got:
            failures.append(("wsat-le", nv, clauses, k, want, got))
    return failures


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weso",
        description="Decision engine for weighted ESO quantifier patterns")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a quantifier pattern")
    p.add_argument("--mode", required=True, choices=("eq", "le", "ge"))
    p.add_argument("--pattern", required=True,
                   help="first-order pattern word over {a,e}")
    p.add_argument("--class", dest="cls", default="arbitrary",
                   choices=("arbitrary", "undirected", "basic"))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_classify)

    for name, force in (("solve", False), ("oracle", True)):
        p = sub.add_parser(name, help="decide an instance"
                           + (" with the brute-force oracle" if force else ""))
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--formula", help="formula file")
        src.add_argument("--library", help="named library formula")
        p.add_argument("--structure", required=True, help="structure file")
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--class", dest="cls", default=None,
                       choices=("arbitrary", "undirected", "basic"))
        if not force:
            p.add_argument("--route", default=None,
                           choices=("OneWsat", "SearchTree", "SaturationBasic",
                                    "CspBasic", "OracleOnly"))
        p.add_argument("--json", action="store_true")
        p.add_argument("--trace", action="store_true")
        p.set_defaults(func=lambda a, _force=force: _cmd_solve(a, _force))

    p = sub.add_parser("gen", help="generate a matched-reach instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", choices=("yes", "no"), default="yes")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("reduce", help="reduce matched-reach to a graph instance")
    p.add_argument("--variant", required=True, choices=("aa", "aaa", "eaa"))
    p.add_argument("--input", required=True, help="mreach file")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("selftest", help="run oracle-equivalence sweeps")
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--max-k", type=int, default=3)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_selftest)
    return parser


def run_cli(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormulaError, StructureError, GadgetError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (UnsupportedCombination, PatternError, CspError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except OracleBudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
