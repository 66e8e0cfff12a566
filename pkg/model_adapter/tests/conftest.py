"""Offline fixture: a tiny randomly initialized encoder-decoder checkpoint
with a byte-level BPE tokenizer trained on sample task strings, so unit tests
never touch the network."""

import json

import pytest
from tokenizers import Tokenizer, decoders, models, pre_tokenizers, trainers
from transformers import PreTrainedTokenizerFast, T5Config, T5ForConditionalGeneration

SAMPLE_TASK = (
    "<GOAL> on b1 b2, ontable b2 <INIT> handempty, ontable b1, clear b1, "
    "ontable b2, clear b2 <ACTION> pick-up <PRE> clear x, ontable x, handempty "
    "<EFFECT> not ontable x, not clear x, not handempty, holding x "
    "<ACTION> put-down <PRE> holding x <EFFECT> not holding x, clear x, "
    "handempty, ontable x <ACTION> stack <PRE> holding x, clear y "
    "<EFFECT> not holding x, not clear y, clear x, handempty, on x y "
    "<ACTION> unstack <PRE> on x y, clear x, handempty "
    "<EFFECT> holding x, clear y, not clear x, not handempty, not on x y"
)
SAMPLE_PLAN = "pick-up b1, stack b1 b2"


def make_rows(n):
    return [
        {"id": f"id{i:05d}", "domain": "bw", "task": SAMPLE_TASK,
         "plan": SAMPLE_PLAN, "plan_length": 2, "config": {"blocks": 2}, "seed": i}
        for i in range(n)
    ]


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    out = tmp_path_factory.mktemp("tiny-ckpt")
    tk = Tokenizer(models.BPE(unk_token="<unk>"))
    tk.pre_tokenizer = pre_tokenizers.ByteLevel(add_prefix_space=False)
    tk.decoder = decoders.ByteLevel()
    trainer = trainers.BpeTrainer(
        vocab_size=360, min_frequency=1,
        special_tokens=["<pad>", "<s>", "</s>", "<unk>"],
        initial_alphabet=pre_tokenizers.ByteLevel.alphabet(),
    )
    tk.train_from_iterator([SAMPLE_TASK, SAMPLE_PLAN] * 4, trainer)
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=tk, unk_token="<unk>", pad_token="<pad>",
        eos_token="</s>", bos_token="<s>", model_max_length=512,
    )
    config = T5Config(
        vocab_size=len(tokenizer), d_model=32, d_kv=8, d_ff=64,
        num_layers=2, num_decoder_layers=2, num_heads=4,
        pad_token_id=tokenizer.pad_token_id,
        eos_token_id=tokenizer.eos_token_id,
        decoder_start_token_id=tokenizer.pad_token_id,
    )
    model = T5ForConditionalGeneration(config)
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    return str(out)


@pytest.fixture()
def corpus_file(tmp_path):
    path = tmp_path / "train.jsonl"
    with open(path, "w") as handle:
        for row in make_rows(24):
            handle.write(json.dumps(row) + "\n")
    return str(path)
