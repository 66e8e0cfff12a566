"""Reading the harness JSONL schema and turning rows into training pairs."""

from __future__ import annotations

import json
from pathlib import Path


class CorpusError(ValueError):
    """Schema violation in a corpus file."""


def load_rows(path: str | Path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: not JSON ({exc})") from exc
            for key in ("id", "task"):
                if key not in row:
                    raise CorpusError(f"{path}:{lineno}: missing '{key}'")
            rows.append(row)
    if not rows:
        raise CorpusError(f"{path}: empty corpus")
    return rows


def prepare_corpus(rows: list[dict]) -> list[tuple[str, str]]:
    """(task string, plan string) pairs for the encoder/decoder."""
    pairs = []
    for row in rows:
        if "plan" not in row:
            raise CorpusError(f"row {row.get('id', '?')}: missing 'plan'")
        pairs.append((row["task"], row["plan"]))
    if not pairs:
        raise CorpusError("no training pairs")
    return pairs
