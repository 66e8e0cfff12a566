"""Batched candidate generation into the harness {id, plan} JSONL contract."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import torch

from .checkpoints import load_checkpoint
from .config import TrainConfig

log = logging.getLogger(__name__)


@torch.no_grad()
def infer_candidates(
    checkpoint: str,
    rows: list[dict],
    out_path: str | Path,
    cfg: TrainConfig | None = None,
) -> int:
    """Generate one candidate plan per input row and write {id, plan} lines.

    Rows must carry 'id' and 'task'.  A batch that fails to generate emits
    empty plans for its ids rather than aborting the run."""
    cfg = cfg or TrainConfig()
    if cfg.num_threads:
        torch.set_num_threads(cfg.num_threads)
    tokenizer, model = load_checkpoint(checkpoint)
    model.eval()

    written = 0
    with open(out_path, "w", encoding="utf-8") as handle:
        for start in range(0, len(rows), cfg.val_batch_size):
            batch = rows[start : start + cfg.val_batch_size]
            try:
                enc = tokenizer(
                    [row["task"] for row in batch], padding=True, truncation=True,
                    max_length=cfg.max_source_length, return_tensors="pt",
                )
                outputs = model.generate(
                    input_ids=enc.input_ids,
                    attention_mask=enc.attention_mask,
                    num_beams=cfg.beams,
                    repetition_penalty=cfg.repetition_penalty,
                    length_penalty=cfg.length_penalty,
                    max_length=cfg.max_target_length,
                )
                plans = tokenizer.batch_decode(outputs, skip_special_tokens=True)
                plans = [" ".join(plan.split()) for plan in plans]
            except Exception as exc:
                log.warning("generation failed for rows %d..%d (%s); emitting "
                            "empty plans", start, start + len(batch) - 1, exc)
                plans = [""] * len(batch)
            for row, plan in zip(batch, plans):
                handle.write(json.dumps({"id": row["id"], "plan": plan}))
                handle.write("\n")
                written += 1
            if (start // cfg.val_batch_size) % 5 == 0:
                log.info("generated %d/%d", written, len(rows))
    return written
