"""Training and generation configuration.

Defaults: batch size 8 for training and validation, 3 epochs, learning rate
1e-4, source/target length caps 512/150, and beam-search generation with
2 beams, repetition penalty 2.5, and length penalty 1.0.  Everything is
overridable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

TAG_TOKENS = ("<GOAL>", "<INIT>", "<ACTION>", "<PRE>", "<EFFECT>")

DEFAULT_CHECKPOINT = "Salesforce/codet5-small"


@dataclass
class TrainConfig:
    checkpoint: str = DEFAULT_CHECKPOINT
    train_batch_size: int = 8
    val_batch_size: int = 8
    epochs: int = 3
    learning_rate: float = 1e-4
    max_source_length: int = 512
    max_target_length: int = 150
    tag_tokens: tuple[str, ...] = field(default=TAG_TOKENS)
    beams: int = 2
    repetition_penalty: float = 2.5
    length_penalty: float = 1.0
    seed: int = 0
    num_threads: int = 0  # 0 = leave torch defaults alone
