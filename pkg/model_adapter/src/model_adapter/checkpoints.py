"""Checkpoint loading, including legacy byte-level-BPE repos.

Older CodeT5-era repositories ship only vocab.json/merges.txt, which current
transformers releases no longer load through the tokenizer classes; for those
the tokenizer is assembled directly with the `tokenizers` library (byte-level
BPE plus the usual <s>...</s> wrapping).  Checkpoints saved by this package
carry a tokenizer.json and load through the normal path.
"""

from __future__ import annotations

import json
import logging
import os

from transformers import AutoModelForSeq2SeqLM, AutoTokenizer, PreTrainedTokenizerFast

log = logging.getLogger(__name__)


def _resolve_file(name_or_path: str, filename: str) -> str | None:
    if os.path.isdir(name_or_path):
        path = os.path.join(name_or_path, filename)
        return path if os.path.exists(path) else None
    from huggingface_hub import hf_hub_download

    try:
        return hf_hub_download(name_or_path, filename)
    except Exception:
        return None


def _assemble_bpe_tokenizer(name_or_path: str) -> PreTrainedTokenizerFast:
    from tokenizers import Tokenizer, decoders, models, pre_tokenizers, processors

    vocab_file = _resolve_file(name_or_path, "vocab.json")
    merges_file = _resolve_file(name_or_path, "merges.txt")
    if not vocab_file or not merges_file:
        raise OSError(f"no loadable tokenizer found at '{name_or_path}'")
    tk = Tokenizer(models.BPE.from_file(vocab_file, merges_file))
    tk.pre_tokenizer = pre_tokenizers.ByteLevel(add_prefix_space=False)
    tk.decoder = decoders.ByteLevel()
    vocab = json.load(open(vocab_file, encoding="utf-8"))
    tk.post_processor = processors.RobertaProcessing(
        ("</s>", vocab["</s>"]), ("<s>", vocab["<s>"])
    )
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=tk,
        unk_token="<unk>", pad_token="<pad>", eos_token="</s>",
        bos_token="<s>", mask_token="<mask>", model_max_length=512,
    )
    smap_file = _resolve_file(name_or_path, "special_tokens_map.json")
    if smap_file:
        smap = json.load(open(smap_file, encoding="utf-8"))
        extras = [
            t["content"] if isinstance(t, dict) else t
            for t in smap.get("additional_special_tokens", [])
        ]
        if extras:  # sentinel tokens etc.; must be dropped when decoding
            tokenizer.add_special_tokens({"additional_special_tokens": extras})
    log.info("assembled byte-level BPE tokenizer from %s (len %d)",
             name_or_path, len(tokenizer))
    return tokenizer


def load_tokenizer(name_or_path: str):
    try:
        return AutoTokenizer.from_pretrained(name_or_path)
    except Exception as exc:
        log.info("AutoTokenizer failed (%s: %s); assembling from BPE files",
                 type(exc).__name__, exc)
        return _assemble_bpe_tokenizer(name_or_path)


def load_checkpoint(name_or_path: str):
    """(tokenizer, model) for a hub id or a local checkpoint directory."""
    tokenizer = load_tokenizer(name_or_path)
    model = AutoModelForSeq2SeqLM.from_pretrained(name_or_path)
    return tokenizer, model


def register_tag_tokens(tokenizer, model, tags) -> int:
    """Add the section tags as atomic special tokens and grow the embedding.

    Returns how many tokens were actually new; logs the realized sizes since
    the tokenizer length and the embedding row count can legitimately
    differ."""
    added = tokenizer.add_tokens(list(tags), special_tokens=True)
    if len(tokenizer) > model.get_input_embeddings().weight.shape[0]:
        model.resize_token_embeddings(len(tokenizer))
    log.info("registered %d tag tokens; tokenizer len %d, embedding rows %d",
             added, len(tokenizer), model.get_input_embeddings().weight.shape[0])
    return added
