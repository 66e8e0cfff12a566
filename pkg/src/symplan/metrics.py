"""ROUGE-L and BLEU over plan token sequences, and report aggregation."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

from .validator import FAILED, INCOMPLETE, VALID, PlanOutcome

BLEU_EPSILON = 1e-9
OVERALL = "overall"


def tokenize_plan(text: str) -> list[str]:
    """Split a plan string into tokens: commas are separators, not tokens."""
    return [tok for chunk in text.split(",") for tok in chunk.split()]


def lcs_length(a: list[str], b: list[str]) -> int:
    """Longest common subsequence length, O(len(a)*len(b)) with two rows."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        append = cur.append
        for j, y in enumerate(b, start=1):
            if x == y:
                append(prev[j - 1] + 1)
            else:
                pj = prev[j]
                cj = cur[j - 1]
                append(pj if pj >= cj else cj)
        prev = cur
    return prev[-1]


def rouge_l(ref: list[str], cand: list[str]) -> tuple[float, float, float]:
    """(recall, precision, f) with beta=1; both-empty scores (1, 1, 1)."""
    if not ref and not cand:
        return 1.0, 1.0, 1.0
    lcs = lcs_length(ref, cand)
    recall = lcs / len(ref) if ref else 0.0
    precision = lcs / len(cand) if cand else 0.0
    if recall + precision == 0.0:
        return recall, precision, 0.0
    return recall, precision, 2 * recall * precision / (recall + precision)


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(refs: list[list[str]], cands: list[list[str]], max_n: int = 4) -> float:
    """Corpus-level BLEU: uniform 1..max_n modified precisions, brevity
    penalty, and epsilon smoothing for zero counts on short plans."""
    if len(refs) != len(cands):
        raise ValueError(f"got {len(refs)} references but {len(cands)} candidates")
    cand_len = sum(len(c) for c in cands)
    ref_len = sum(len(r) for r in refs)
    if cand_len == 0:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        matches = 0
        total = 0
        for ref, cand in zip(refs, cands):
            cand_counts = _ngram_counts(cand, n)
            if not cand_counts:
                continue
            ref_counts = _ngram_counts(ref, n)
            matches += sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
            total += sum(cand_counts.values())
        # add-epsilon smoothing keeps zero counts (short plans) off log(0)
        # while leaving identical corpora at exactly 1.0
        log_sum += math.log((matches + BLEU_EPSILON) / (total + BLEU_EPSILON))
    brevity = 1.0 if cand_len >= ref_len else math.exp(1.0 - ref_len / cand_len)
    return brevity * math.exp(log_sum / max_n)


def sentence_bleu_mean(refs: list[list[str]], cands: list[list[str]]) -> float:
    """Alternative aggregation: mean of per-instance BLEU scores."""
    if len(refs) != len(cands):
        raise ValueError(f"got {len(refs)} references but {len(cands)} candidates")
    if not refs:
        raise ValueError("empty input")
    return sum(bleu([r], [c]) for r, c in zip(refs, cands)) / len(refs)


# ---------------------------------------------------------------------------
# Reports


@dataclass(slots=True)
class ReportRow:
    instance_count: int
    valid_pct: float
    optimal_pct: float
    failed_pct: float
    incomplete_pct: float
    rouge_recall: float
    rouge_precision: float
    rouge_f: float
    bleu: float
    mean_wall_time_s: float

    def to_json(self) -> dict:
        return {
            "instance_count": self.instance_count,
            "valid_pct": round(self.valid_pct, 2),
            "optimal_pct": round(self.optimal_pct, 2),
            "failed_pct": round(self.failed_pct, 2),
            "incomplete_pct": round(self.incomplete_pct, 2),
            "rouge_l": {
                "recall": round(self.rouge_recall, 4),
                "precision": round(self.rouge_precision, 4),
                "fmeasure": round(self.rouge_f, 4),
            },
            "bleu": round(self.bleu, 4),
            "mean_wall_time_s": round(self.mean_wall_time_s, 4),
        }


@dataclass(slots=True)
class EvalReport:
    rows: dict[str, ReportRow]  # per domain tag plus "overall"
    bleu_mode: str = "corpus"
    incomplete_reasons: dict[str, int] = field(default_factory=dict)
    raw_counts: dict[str, dict[str, int]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "bleu_mode": self.bleu_mode,
            "rows": {tag: row.to_json() for tag, row in self.rows.items()},
            "incomplete_reasons": self.incomplete_reasons,
            "raw_counts": self.raw_counts,
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    def to_table(self) -> str:
        headers = [
            "Domain", "Instances", "Valid (%)", "Incomplete (%)", "Failed (%)",
            "Optimal (%)", "ROUGE-L r/p/f", "BLEU", "Avg. Time (sec)",
        ]
        body = []
        tags = [t for t in self.rows if t != OVERALL] + (
            [OVERALL] if OVERALL in self.rows else []
        )
        for tag in tags:
            row = self.rows[tag]
            body.append([
                tag,
                str(row.instance_count),
                f"{row.valid_pct:.2f}",
                f"{row.incomplete_pct:.2f}",
                f"{row.failed_pct:.2f}",
                f"{row.optimal_pct:.2f}",
                f"{row.rouge_recall:.2f}/{row.rouge_precision:.2f}/{row.rouge_f:.2f}",
                f"{row.bleu:.2f}",
                f"{row.mean_wall_time_s:.3f}",
            ])
        widths = [max(len(h), *(len(r[i]) for r in body)) for i, h in enumerate(headers)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
        lines.append("  ".join("-" * w for w in widths))
        for r in body:
            lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, slots=True)
class ScoredInstance:
    domain: str
    outcome: PlanOutcome
    reference_tokens: list[str]
    candidate_tokens: list[str]
    wall_time_s: float = 0.0


def aggregate_report(instances: list[ScoredInstance], bleu_mode: str = "corpus") -> EvalReport:
    """Macro-average ROUGE-L per instance, corpus BLEU, class breakdown, and
    per-domain grouping by record tag."""
    if not instances:
        raise ValueError("cannot aggregate an empty instance list")

    groups: dict[str, list[ScoredInstance]] = {}
    for inst in instances:
        groups.setdefault(inst.domain, []).append(inst)
    groups[OVERALL] = list(instances)

    rows = {}
    raw_counts = {}
    reasons: dict[str, int] = {}
    for inst in instances:
        if inst.outcome.kind == INCOMPLETE:
            reason = inst.outcome.reason or "unspecified"
            reasons[reason] = reasons.get(reason, 0) + 1

    bleu_fn = bleu if bleu_mode == "corpus" else sentence_bleu_mean
    for tag, group in groups.items():
        n = len(group)
        counts = {VALID: 0, FAILED: 0, INCOMPLETE: 0, "optimal": 0}
        rouge_sums = [0.0, 0.0, 0.0]
        time_sum = 0.0
        for inst in group:
            counts[inst.outcome.kind] += 1
            if inst.outcome.kind == VALID and inst.outcome.optimal:
                counts["optimal"] += 1
            r, p, f = rouge_l(inst.reference_tokens, inst.candidate_tokens)
            rouge_sums[0] += r
            rouge_sums[1] += p
            rouge_sums[2] += f
            time_sum += inst.wall_time_s
        rows[tag] = ReportRow(
            instance_count=n,
            valid_pct=100.0 * counts[VALID] / n,
            optimal_pct=100.0 * counts["optimal"] / n,
            failed_pct=100.0 * counts[FAILED] / n,
            incomplete_pct=100.0 * counts[INCOMPLETE] / n,
            rouge_recall=rouge_sums[0] / n,
            rouge_precision=rouge_sums[1] / n,
            rouge_f=rouge_sums[2] / n,
            bleu=bleu_fn(
                [i.reference_tokens for i in group],
                [i.candidate_tokens for i in group],
            ),
            mean_wall_time_s=time_sum / n,
        )
        raw_counts[tag] = {k: v for k, v in counts.items()}
    return EvalReport(rows=rows, bleu_mode=bleu_mode,
                      incomplete_reasons=reasons, raw_counts=raw_counts)
