"""Fine-tuning/inference bridge between symplan corpora and a small
encoder-decoder code model.  The only contract with the planning toolkit is
file-based: it reads the harness corpus JSONL and writes {id, plan} candidate
lines for `symplan evaluate`."""

from .config import DEFAULT_CHECKPOINT, TAG_TOKENS, TrainConfig
from .corpus import CorpusError, load_rows, prepare_corpus
from .checkpoints import load_checkpoint, load_tokenizer, register_tag_tokens
from .training import FinetuneResult, finetune
from .inference import infer_candidates

__all__ = [
    "DEFAULT_CHECKPOINT", "TAG_TOKENS", "TrainConfig", "CorpusError",
    "load_rows", "prepare_corpus", "load_checkpoint", "load_tokenizer",
    "register_tag_tokens", "FinetuneResult", "finetune", "infer_candidates",
]
