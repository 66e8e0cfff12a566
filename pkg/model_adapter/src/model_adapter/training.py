"""Fine-tuning loop: plain AdamW over dynamically padded batches.

All layers train (nothing is frozen).  A held-out slice of the pairs is used
for validation loss, measured once before training and after every epoch, so
callers can check the curve actually moved.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path

import torch

from .checkpoints import load_checkpoint, register_tag_tokens
from .config import TrainConfig

log = logging.getLogger(__name__)


@dataclass
class FinetuneResult:
    checkpoint_dir: str
    initial_val_loss: float | None
    epoch_log: list[dict]
    tokenizer_len: int
    embedding_rows: int
    added_tokens: int

    @property
    def final_val_loss(self) -> float | None:
        return self.epoch_log[-1]["val_loss"] if self.epoch_log else self.initial_val_loss


def _batches(items, size):
    for i in range(0, len(items), size):
        yield items[i : i + size]


def _encode_batch(tokenizer, batch, cfg, device):
    sources = [src for src, _ in batch]
    targets = [tgt for _, tgt in batch]
    enc = tokenizer(sources, padding=True, truncation=True,
                    max_length=cfg.max_source_length, return_tensors="pt")
    dec = tokenizer(targets, padding=True, truncation=True,
                    max_length=cfg.max_target_length, return_tensors="pt")
    labels = dec.input_ids.clone()
    labels[labels == tokenizer.pad_token_id] = -100
    return enc.input_ids.to(device), enc.attention_mask.to(device), labels.to(device)


@torch.no_grad()
def _val_loss(model, tokenizer, pairs, cfg, device) -> float | None:
    if not pairs:
        return None
    model.eval()
    total, count = 0.0, 0
    for batch in _batches(pairs, cfg.val_batch_size):
        input_ids, mask, labels = _encode_batch(tokenizer, batch, cfg, device)
        out = model(input_ids=input_ids, attention_mask=mask, labels=labels)
        total += float(out.loss.detach()) * len(batch)
        count += len(batch)
    model.train()
    return total / count


def finetune(
    cfg: TrainConfig,
    pairs: list[tuple[str, str]],
    out_dir: str | Path,
    val_pairs: list[tuple[str, str]] | None = None,
    val_fraction: float = 0.05,
) -> FinetuneResult:
    """Fine-tune cfg.checkpoint on (task, plan) pairs and save to out_dir.

    With epochs=0 the base weights are saved untouched (apart from the five
    freshly initialized tag-token embedding rows)."""
    if not pairs:
        raise ValueError("no training pairs")
    torch.manual_seed(cfg.seed)
    if cfg.num_threads:
        torch.set_num_threads(cfg.num_threads)
    device = torch.device("cpu")

    tokenizer, model = load_checkpoint(cfg.checkpoint)
    added = register_tag_tokens(tokenizer, model, cfg.tag_tokens)
    model.to(device)
    model.train()

    if val_pairs is None:
        order = list(range(len(pairs)))
        random.Random(cfg.seed).shuffle(order)
        n_val = max(1, int(len(pairs) * val_fraction)) if len(pairs) > 1 else 0
        val_pairs = [pairs[i] for i in order[:n_val]]
        train_pairs = [pairs[i] for i in order[n_val:]]
    else:
        train_pairs = list(pairs)

    initial_val = _val_loss(model, tokenizer, val_pairs, cfg, device)
    log.info("training on %d pairs (%d held out); initial val loss %s",
             len(train_pairs), len(val_pairs),
             "n/a" if initial_val is None else f"{initial_val:.4f}")

    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate)
    epoch_log = []
    rng = random.Random(cfg.seed + 1)
    for epoch in range(cfg.epochs):
        order = list(range(len(train_pairs)))
        rng.shuffle(order)
        shuffled = [train_pairs[i] for i in order]
        total, count = 0.0, 0
        for step, batch in enumerate(_batches(shuffled, cfg.train_batch_size)):
            input_ids, mask, labels = _encode_batch(tokenizer, batch, cfg, device)
            out = model(input_ids=input_ids, attention_mask=mask, labels=labels)
            out.loss.backward()
            optimizer.step()
            optimizer.zero_grad()
            total += float(out.loss.detach()) * len(batch)
            count += len(batch)
            if step % 50 == 0:
                log.info("epoch %d step %d loss %.4f", epoch + 1, step, float(out.loss.detach()))
        val = _val_loss(model, tokenizer, val_pairs, cfg, device)
        epoch_log.append({
            "epoch": epoch + 1,
            "train_loss": total / max(count, 1),
            "val_loss": val,
        })
        log.info("epoch %d done: train loss %.4f, val loss %s", epoch + 1,
                 total / max(count, 1), "n/a" if val is None else f"{val:.4f}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    result = FinetuneResult(
        checkpoint_dir=str(out_dir),
        initial_val_loss=initial_val,
        epoch_log=epoch_log,
        tokenizer_len=len(tokenizer),
        embedding_rows=model.get_input_embeddings().weight.shape[0],
        added_tokens=added,
    )
    (out_dir / "loss_log.json").write_text(json.dumps({
        "initial_val_loss": result.initial_val_loss,
        "epochs": result.epoch_log,
        "tokenizer_len": result.tokenizer_len,
        "embedding_rows": result.embedding_rows,
        "added_tokens": result.added_tokens,
    }, indent=2), "utf-8")
    return result
