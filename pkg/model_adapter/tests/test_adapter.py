"""Unit tests against the tiny offline checkpoint."""

import json

import pytest
import torch

from model_adapter import (
    CorpusError,
    TAG_TOKENS,
    TrainConfig,
    finetune,
    infer_candidates,
    load_checkpoint,
    load_rows,
    prepare_corpus,
    register_tag_tokens,
)

from conftest import SAMPLE_PLAN, SAMPLE_TASK, make_rows


def test_prepare_corpus_pairs(corpus_file):
    rows = load_rows(corpus_file)
    pairs = prepare_corpus(rows)
    assert len(pairs) == 24
    assert pairs[0] == (SAMPLE_TASK, SAMPLE_PLAN)


def test_empty_corpus_errors(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    with pytest.raises(CorpusError):
        load_rows(empty)


def test_missing_plan_errors():
    with pytest.raises(CorpusError):
        prepare_corpus([{"id": "x", "task": "t"}])


def test_paper_scale_corpus_accepted():
    pairs = prepare_corpus(make_rows(14_400))
    assert len(pairs) == 14_400


def test_tag_tokens_grow_vocabulary_by_five(tiny_checkpoint):
    tokenizer, model = load_checkpoint(tiny_checkpoint)
    before = len(tokenizer)
    added = register_tag_tokens(tokenizer, model, TAG_TOKENS)
    assert added == 5
    assert len(tokenizer) == before + 5
    assert model.get_input_embeddings().weight.shape[0] == before + 5
    # the tags tokenize atomically now
    ids = tokenizer(SAMPLE_TASK).input_ids
    tokens = tokenizer.convert_ids_to_tokens(ids)
    for tag in TAG_TOKENS:
        assert tag in tokens


def test_zero_epochs_keeps_base_weights(tiny_checkpoint, tmp_path):
    cfg = TrainConfig(checkpoint=tiny_checkpoint, epochs=0)
    pairs = prepare_corpus(make_rows(8))
    result = finetune(cfg, pairs, tmp_path / "ckpt0")
    _, base = load_checkpoint(tiny_checkpoint)
    _, tuned = load_checkpoint(result.checkpoint_dir)
    base_sd = base.state_dict()
    tuned_sd = tuned.state_dict()
    for name, tensor in base_sd.items():
        other = tuned_sd[name]
        if tensor.shape == other.shape:
            assert torch.equal(tensor, other), name
        else:  # embedding grew by the tag tokens; original rows untouched
            assert torch.equal(tensor, other[: tensor.shape[0]]), name
    assert result.epoch_log == []


def test_finetune_trains_and_logs(tiny_checkpoint, tmp_path):
    cfg = TrainConfig(checkpoint=tiny_checkpoint, epochs=2, train_batch_size=4,
                      val_batch_size=4, learning_rate=3e-3, seed=1)
    pairs = prepare_corpus(make_rows(24))
    result = finetune(cfg, pairs, tmp_path / "ckpt")
    assert len(result.epoch_log) == 2
    assert result.initial_val_loss is not None
    assert result.final_val_loss < result.initial_val_loss
    log = json.loads((tmp_path / "ckpt" / "loss_log.json").read_text())
    assert log["added_tokens"] == 5
    assert len(log["epochs"]) == 2


def test_infer_candidates_one_line_per_row(tiny_checkpoint, tmp_path):
    cfg = TrainConfig(checkpoint=tiny_checkpoint, epochs=0,
                      max_target_length=16)
    pairs = prepare_corpus(make_rows(4))
    result = finetune(cfg, pairs, tmp_path / "ckpt")
    rows = make_rows(6)
    out = tmp_path / "cand.jsonl"
    written = infer_candidates(result.checkpoint_dir, rows, out, cfg)
    assert written == 6
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert [l["id"] for l in lines] == [r["id"] for r in rows]
    assert all(isinstance(l["plan"], str) for l in lines)


def test_cli_train_and_infer(tiny_checkpoint, corpus_file, tmp_path, capsys):
    from model_adapter.cli import main

    ckpt = tmp_path / "cli-ckpt"
    rc = main([
        "train", "--corpus", corpus_file, "--out", str(ckpt),
        "--checkpoint", tiny_checkpoint, "--epochs", "1",
        "--batch-size", "4", "--learning-rate", "0.003",
    ])
    assert rc == 0
    out = capsys.readouterr().out
    assert "saved checkpoint" in out and "added tag tokens 5" in out

    cand = tmp_path / "cand.jsonl"
    rc = main([
        "infer", "--test", corpus_file, "--out", str(cand),
        "--checkpoint", str(ckpt), "--max-target-length", "16",
    ])
    assert rc == 0
    assert len(cand.read_text().splitlines()) == 24


def test_cli_bad_corpus_errors(tmp_path, capsys):
    from model_adapter.cli import main

    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json}\n")
    rc = main(["train", "--corpus", str(bad), "--out", str(tmp_path / "x")])
    assert rc == 1
    assert "error" in capsys.readouterr().err
