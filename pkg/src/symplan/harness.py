"""Batch plumbing shared by the CLI: corpus IO, splits, and evaluation."""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .codec import decode_task
from .generators import DatasetRecord
from .grounding import GroundTask, ground_task
from .metrics import EvalReport, ScoredInstance, aggregate_report, tokenize_plan
from .validator import INCOMPLETE, PlanOutcome, classify_plan

REASON_MISSING = "missing_candidate"


def read_corpus(path: str | Path) -> list[DatasetRecord]:
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(DatasetRecord.from_json_line(line))
    return records


def write_corpus(records, path: str | Path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(record.to_json_line())
            handle.write("\n")
            count += 1
    return count


# ---------------------------------------------------------------------------
# Splits


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    folds: int = 5
    repeats: int | None = None  # when set, independent resampled splits instead
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")
        if self.folds < 1:
            raise ValueError("folds must be >= 1")
        if self.repeats is not None and self.repeats < 1:
            raise ValueError("repeats must be >= 1")


def split_corpus(records: list[DatasetRecord], spec: SplitSpec):
    """Return [(train, test), ...]: disjoint exhaustive test shards in fold
    mode, or independent shuffled train/test splits in repeats mode."""
    if not records:
        raise ValueError("empty corpus")
    out = []
    if spec.repeats is None:
        order = list(range(len(records)))
        random.Random(spec.seed).shuffle(order)
        shards = [order[i :: spec.folds] for i in range(spec.folds)]
        for i in range(spec.folds):
            test_idx = set(shards[i])
            test = [records[j] for j in sorted(test_idx)]
            train = [records[j] for j in range(len(records)) if j not in test_idx]
            out.append((train, test))
    else:
        for r in range(spec.repeats):
            order = list(range(len(records)))
            random.Random(spec.seed * 1_000_003 + r).shuffle(order)
            n_train = round(len(records) * spec.train_fraction)
            train = [records[j] for j in sorted(order[:n_train])]
            test = [records[j] for j in sorted(order[n_train:])]
            out.append((train, test))
    return out


# ---------------------------------------------------------------------------
# Evaluation


def ground_record_task(record: DatasetRecord) -> GroundTask:
    domain, problem = decode_task(record.task)
    return ground_task(domain, problem)


def _evaluate_one(args) -> tuple[dict, float, str | None]:
    task_text, candidate, reference_cost = args
    domain, problem = decode_task(task_text)
    task = ground_task(domain, problem)
    start = time.perf_counter()
    outcome = classify_plan(task, candidate, reference_cost=reference_cost)
    elapsed = time.perf_counter() - start
    return outcome.to_json(), elapsed, outcome.reason


def evaluate_candidates(
    records: list[DatasetRecord],
    candidates: dict[str, str],
    bleu_mode: str = "corpus",
    jobs: int = 1,
) -> tuple[EvalReport, list[dict]]:
    """Join corpus and candidates strictly by id and score every corpus row.

    Missing candidates are classified incomplete with the reason recorded.
    Returns the aggregate report plus one detail dict per row (corpus order)."""
    if not records:
        raise ValueError("empty corpus")

    work = []
    rows = []
    for record in records:
        candidate = candidates.get(record.id)
        rows.append((record, candidate))
        if candidate is not None:
            work.append((record.task, candidate, record.plan_length))

    if jobs > 1 and work:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate_one, work, chunksize=8))
    else:
        results = [_evaluate_one(a) for a in work]

    instances = []
    details = []
    it = iter(results)
    for record, candidate in rows:
        if candidate is None:
            outcome = PlanOutcome(INCOMPLETE, executed_prefix=0, reason=REASON_MISSING)
            outcome_json, elapsed = outcome.to_json(), 0.0
            candidate_text = ""
        else:
            outcome_json, elapsed, reason = next(it)
            outcome = _outcome_from_json(outcome_json)
            candidate_text = candidate
        instances.append(
            ScoredInstance(
                domain=record.domain,
                outcome=outcome,
                reference_tokens=tokenize_plan(record.plan),
                candidate_tokens=tokenize_plan(candidate_text),
                wall_time_s=elapsed,
            )
        )
        details.append({"id": record.id, "domain": record.domain, **outcome_json})
    report = aggregate_report(instances, bleu_mode=bleu_mode)
    return report, details


def _outcome_from_json(raw: dict) -> PlanOutcome:
    return PlanOutcome(
        kind=raw["class"],
        executed_prefix=raw.get("executed_prefix", 0),
        optimal=raw.get("optimal"),
        step=raw.get("step"),
        violated=raw.get("violated"),
        reason=raw.get("reason"),
        candidate_cost=raw.get("cost"),
    )
