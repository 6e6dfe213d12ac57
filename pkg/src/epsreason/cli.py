"""Command-line interface: ``epsreason {check,rank,query,bench,compare,meta}``.

Exit codes: 0 success, 1 usage, 2 parse error, 3 inconsistent default set,
4 ME solver divergence or infeasibility.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .bench import STRATEGIES, rational_text, run_benchmarks, run_query
from .errors import (
    InconsistentDelta,
    MEDivergence,
    MEInfeasible,
    ParseError,
    VocabularyTooLarge,
)
from .klm import check_meta_properties
from .logic import DEFAULT_MAX_ATOMS, KnowledgeBase, parse_formula, parse_kb, to_text
from .maxent import DEFAULT_MAX_ITERS, PluralSampler, me_ranking, me_weights
from .rankings import tolerance_partition, z_ranking

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_INCONSISTENT, EXIT_SOLVER = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--json", action="store_true", default=default(False), help="emit JSON")
    parser.add_argument(
        "--max-atoms", type=int, default=default(DEFAULT_MAX_ATOMS), metavar="N",
        help="refuse vocabularies larger than N atoms (default %(default)s)" if not suppress else None,
    )
    parser.add_argument(
        "--max-iters", type=int, default=default(DEFAULT_MAX_ITERS), metavar="N",
        help="iteration cap for the ME weight fixpoint" if not suppress else None,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="epsreason", description="Default reasoning with infinitesimal probabilities")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="parse a KB and report its tolerance partition")
    p.add_argument("file")

    p = sub.add_parser("rank", parents=[common], help="print the System Z or ME ranking")
    p.add_argument("file")
    p.add_argument("--method", choices=("z", "me"), default="z")

    p = sub.add_parser("query", parents=[common], help="answer one query under one strategy")
    p.add_argument("file")
    p.add_argument("formula")
    p.add_argument("--strategy", choices=STRATEGIES, required=True)
    p.add_argument("--samples", type=int, default=64, help="random strength vectors for me-plural")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("bench", parents=[common], help="run the built-in benchmark instances")
    p.add_argument("--strategies", nargs="+", choices=STRATEGIES, default=list(STRATEGIES))
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("compare", parents=[common], help="one query under every strategy")
    p.add_argument("file")
    p.add_argument("formula")
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("meta", parents=[common], help="KLM property checks on random KBs")
    p.add_argument("--strategy", choices=("pc", "rc", "lc", "me"), required=True)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _load(path: str, max_atoms: int) -> KnowledgeBase:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_kb(text, max_atoms=max_atoms)


def _emit(args, data: dict, text: str) -> None:
    print(json.dumps(data, indent=2) if args.json else text)


def _sampler(args) -> PluralSampler:
    if args.samples < 0:
        raise UsageError("--samples must be nonnegative")
    return PluralSampler(samples=args.samples, seed=args.seed)


def cmd_check(args) -> int:
    kb = _load(args.file, args.max_atoms)
    part = tolerance_partition(kb.defaults, kb.vocabulary)
    data = {
        "verdict": "Consistent" if part.consistent else "Inconsistent",
        "atoms": list(kb.vocabulary.atoms),
        "facts": [to_text(f) for f in kb.facts],
        "defaults": [str(d) for d in kb.defaults],
    }
    lines = [
        f"atoms: {' '.join(kb.vocabulary.atoms) or '(none)'}",
        f"facts: {len(kb.facts)}  defaults: {len(kb.defaults)}  queries: {len(kb.queries)}",
    ]
    if part.consistent:
        data["partition"] = [[str(kb.defaults[i]) for i in g] for g in part.groups]
        lines.append("consistent; tolerance partition:")
        for k, group in enumerate(part.groups):
            lines.append(f"  Z{k}: " + "; ".join(str(kb.defaults[i]) for i in group))
    else:
        lines.append("inconsistent: no tolerance partition exists")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK if part.consistent else EXIT_INCONSISTENT


def cmd_rank(args) -> int:
    kb = _load(args.file, args.max_atoms)
    data: dict = {"method": args.method, "atoms": list(kb.vocabulary.atoms)}
    if args.method == "z":
        R = z_ranking(kb.defaults, kb.vocabulary)
    else:
        weights = me_weights(kb, max_iters=args.max_iters)
        R = me_ranking(kb, weights)
        data["weights"] = [rational_text(z) for z in weights.z]
    table = R.table()
    data["ranking"] = {bits: rational_text(r) for bits, r in table.items()}
    lines = []
    if "weights" in data:
        for d, z in zip(kb.defaults, data["weights"]):
            lines.append(f"z = {z:<6} {d}")
    lines.append(" ".join(kb.vocabulary.atoms) + "  rank")
    for bits, r in table.items():
        lines.append(" ".join(bits) + f"  {rational_text(r)}")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def _format_query(res) -> str:
    lines = [f"{res.strategy}: {res.verdict}  ({res.query})"]
    if res.weights is not None:
        lines.append("weights: " + ", ".join(rational_text(z) for z in res.weights))
    if res.ranking is not None:
        lines.append("ranking: " + ", ".join(f"{b}:{rational_text(r)}" for b, r in res.ranking.items()))
    for key, value in res.trace.items():
        lines.append(f"{key}: {json.dumps(value)}")
    return "\n".join(lines)


def cmd_query(args) -> int:
    kb = _load(args.file, args.max_atoms)
    query = parse_formula(args.formula, kb.vocabulary)
    res = run_query(kb, args.strategy, query, _sampler(args), args.max_iters)
    _emit(args, res.to_dict(), _format_query(res))
    return EXIT_OK


def cmd_compare(args) -> int:
    kb = _load(args.file, args.max_atoms)
    query = parse_formula(args.formula, kb.vocabulary)
    sampler = _sampler(args)
    rows, code = {}, EXIT_OK
    for s in STRATEGIES:
        try:
            rows[s] = run_query(kb, s, query, sampler, args.max_iters).verdict
        except (MEDivergence, MEInfeasible) as exc:
            rows[s] = f"error: {type(exc).__name__}"
            code = EXIT_SOLVER
    data = {"query": to_text(query), "verdicts": rows, "seed": sampler.seed}
    text = "\n".join([f"query: {to_text(query)}"] + [f"  {s:<10} {v}" for s, v in rows.items()])
    _emit(args, data, text)
    return code


def cmd_bench(args) -> int:
    report = run_benchmarks(args.strategies, _sampler(args))
    if args.json:
        print(report.to_json())
    else:
        print(report.format_table())
        print("timing (s): " + ", ".join(f"{s}={t:.3f}" for s, t in report.timing.items()))
        print(f"seed {report.seed}, samples {report.samples}")
    return EXIT_OK


def cmd_meta(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    report = check_meta_properties(args.strategy, args.trials, args.seed)
    if args.json:
        data = {
            "strategy": report.strategy,
            "trials": report.trials,
            "seed": report.seed,
            "skipped": report.skipped,
            "rules": {
                r: {"applicable": s.applicable, "instances": s.instances, "counterexamples": s.failures}
                for r, s in report.rules.items()
            },
            "counterexamples": [vars(c) for c in report.counterexamples[:20]],
        }
        print(json.dumps(data, indent=2))
    else:
        print(report.format())
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "rank": cmd_rank,
    "query": cmd_query,
    "bench": cmd_bench,
    "compare": cmd_compare,
    "meta": cmd_meta,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"epsreason: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, VocabularyTooLarge) as exc:
        where = f"{args.file}: " if getattr(args, "file", None) else ""
        print(f"{where}parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InconsistentDelta as exc:
        print(f"inconsistent default set: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (MEDivergence, MEInfeasible) as exc:
        print(f"ME solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
