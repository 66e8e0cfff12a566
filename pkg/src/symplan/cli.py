"""Command-line entry point.

Exit codes: 0 success, 1 usage/IO errors, 2 unsolvable input or a resource
limit.  Every command is deterministic given its flags; SYMPLAN_SEED provides
the default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .codec import CodecError, decode_task, encode_plan, encode_task
from .generators import (
    DEFAULT_RANGES,
    ExhaustionError,
    GeneratorConfig,
    build_dataset,
)
from .grounding import ground_task
from .harness import (
    SplitSpec,
    evaluate_candidates,
    read_corpus,
    split_corpus,
    write_corpus,
)
from .pddl import PddlError, emit_domain, emit_problem, parse_domain, parse_problem
from .search import RESOURCE_LIMIT, UNSOLVABLE, astar_plan
from .validator import classify_plan

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSOLVABLE = 2


def _default_seed() -> int:
    return int(os.environ.get("SYMPLAN_SEED", "0"))


def _parse_range(text: str) -> tuple[int, int]:
    if "-" in text:
        lo, hi = text.split("-", 1)
        return int(lo), int(hi)
    value = int(text)
    return value, value


def _load_task(args):
    """Build a (domain, problem) pair from --domain/--problem or --task[-file]."""
    if getattr(args, "domain_file", None):
        if not getattr(args, "problem_file", None):
            raise SystemExit("--domain requires --problem")
        domain = parse_domain(Path(args.domain_file).read_text("utf-8"))
        problem = parse_problem(Path(args.problem_file).read_text("utf-8"), domain)
        return domain, problem
    text = getattr(args, "task", None)
    if getattr(args, "task_file", None):
        text = Path(args.task_file).read_text("utf-8").strip()
    if not text:
        raise SystemExit("provide --domain/--problem, --task, or --task-file")
    return decode_task(text)


def _add_task_inputs(parser):
    parser.add_argument("--domain", dest="domain_file", help="domain PDDL file")
    parser.add_argument("--problem", dest="problem_file", help="problem PDDL file")
    parser.add_argument("--task", help="linearized task string")
    parser.add_argument("--task-file", help="file holding a linearized task string")


def cmd_generate(args) -> int:
    ranges = {}
    for key in DEFAULT_RANGES[args.domain]:
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            ranges[key] = _parse_range(value)
    cfg = GeneratorConfig(domain=args.domain, count=args.count, seed=args.seed,
                          ranges=ranges)
    try:
        with open(args.out, "w", encoding="utf-8") as handle:
            for record in build_dataset(
                cfg, jobs=args.jobs,
                max_expansions=args.max_expansions, time_limit=args.time_limit,
            ):
                handle.write(record.to_json_line())
                handle.write("\n")
    except ExhaustionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"wrote {args.count} records to {args.out}")
    return EXIT_OK


def cmd_split(args) -> int:
    records = read_corpus(args.corpus)
    spec = SplitSpec(train_fraction=args.train_fraction, folds=args.folds,
                     repeats=args.repeats, seed=args.seed)
    splits = split_corpus(records, spec)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prefix = "rep" if args.repeats is not None else "fold"
    for i, (train, test) in enumerate(splits):
        write_corpus(train, out_dir / f"{prefix}{i}.train.jsonl")
        write_corpus(test, out_dir / f"{prefix}{i}.test.jsonl")
        print(f"{prefix}{i}: train={len(train)} test={len(test)}")
    return EXIT_OK


def cmd_solve(args) -> int:
    domain, problem = _load_task(args)
    task = ground_task(domain, problem)
    result = astar_plan(task, heuristic=args.heuristic,
                        max_expansions=args.max_expansions, time_limit=args.time_limit)
    if result.status == UNSOLVABLE:
        print("unsolvable")
        return EXIT_UNSOLVABLE
    if result.status == RESOURCE_LIMIT:
        print(f"resource limit after {result.expansions} expansions", file=sys.stderr)
        return EXIT_UNSOLVABLE
    print(encode_plan(result.plan).rendered)
    print(f"cost: {result.cost}")
    print(f"expansions: {result.expansions}")
    print(f"time_s: {result.wall_time:.4f}")
    return EXIT_OK


def cmd_validate(args) -> int:
    domain, problem = _load_task(args)
    task = ground_task(domain, problem)
    plan_text = args.plan
    if args.plan_file:
        plan_text = Path(args.plan_file).read_text("utf-8").strip()
    if plan_text is None:
        raise SystemExit("provide --plan or --plan-file")
    outcome = classify_plan(task, plan_text, reference_cost=args.reference_cost)
    print(json.dumps(outcome.to_json()))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    records = read_corpus(args.corpus)
    candidates = {}
    with open(args.candidates, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                row = json.loads(line)
                candidates[row["id"]] = row["plan"]
    report, details = evaluate_candidates(records, candidates,
                                          bleu_mode=args.bleu_mode, jobs=args.jobs)
    if args.out:
        Path(args.out).write_text(report.to_json_text(), "utf-8")
    if args.details:
        with open(args.details, "w", encoding="utf-8") as handle:
            for row in details:
                handle.write(json.dumps(row))
                handle.write("\n")
    print(report.to_table(), end="")
    return EXIT_OK


def cmd_convert(args) -> int:
    if args.to_linearized:
        if not args.domain_file or not args.problem_file:
            raise SystemExit("--to-linearized requires --domain and --problem")
        domain = parse_domain(Path(args.domain_file).read_text("utf-8"))
        problem = parse_problem(Path(args.problem_file).read_text("utf-8"), domain)
        rendered = encode_task(domain, problem, tag_style=args.tag_style).rendered
        if args.out:
            Path(args.out).write_text(rendered + "\n", "utf-8")
        else:
            print(rendered)
        return EXIT_OK
    if args.to_pddl:
        text = args.task
        if args.task_file:
            text = Path(args.task_file).read_text("utf-8").strip()
        if not text:
            raise SystemExit("--to-pddl requires --task or --task-file")
        import warnings

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            domain, problem = decode_task(text, use_registry=not args.no_registry)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        if domain.name == "reconstructed":
            print("warning: no registry domain matched; emitting untyped PDDL",
                  file=sys.stderr)
        domain_text = emit_domain(domain)
        problem_text = emit_problem(problem)
        if args.out_domain:
            Path(args.out_domain).write_text(domain_text, "utf-8")
        else:
            print(domain_text, end="")
        if args.out_problem:
            Path(args.out_problem).write_text(problem_text, "utf-8")
        else:
            print(problem_text, end="")
        return EXIT_OK
    raise SystemExit("choose --to-linearized or --to-pddl")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symplan",
        description="Planning benchmark generation, optimal solving, plan "
                    "validation, and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a reference corpus (JSONL)")
    p.add_argument("--domain", required=True, choices=sorted(DEFAULT_RANGES))
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--max-expansions", type=int, default=5_000_000)
    p.add_argument("--time-limit", type=float, default=60.0)
    for key in ("blocks", "disks", "balls", "robots", "rooms",
                "drivers", "trucks", "packages", "locations"):
        p.add_argument(f"--{key}", help="range LO-HI or a single value")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("split", help="write train/test splits of a corpus")
    p.add_argument("corpus")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_split)

    p = sub.add_parser("solve", help="optimally solve one task")
    _add_task_inputs(p)
    p.add_argument("--heuristic", default="lmcut", choices=["lmcut", "hmax", "blind"])
    p.add_argument("--max-expansions", type=int, default=5_000_000)
    p.add_argument("--time-limit", type=float, default=60.0)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("validate", help="classify a candidate plan")
    _add_task_inputs(p)
    p.add_argument("--plan")
    p.add_argument("--plan-file")
    p.add_argument("--reference-cost", type=int, default=None)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("evaluate", help="score candidate plans against a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--candidates", required=True)
    p.add_argument("--out", help="write the report as JSON")
    p.add_argument("--details", help="write per-row outcomes as JSONL")
    p.add_argument("--bleu-mode", default="corpus", choices=["corpus", "sentence"])
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("convert", help="convert between PDDL and task strings")
    p.add_argument("--to-linearized", action="store_true")
    p.add_argument("--to-pddl", action="store_true")
    _add_task_inputs(p)
    p.add_argument("--tag-style", default="angle", choices=["angle", "square"])
    p.add_argument("--no-registry", action="store_true")
    p.add_argument("--out")
    p.add_argument("--out-domain")
    p.add_argument("--out-problem")
    p.set_defaults(fn=cmd_convert)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (PddlError, CodecError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
