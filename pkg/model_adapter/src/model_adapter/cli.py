"""model-adapter CLI: fine-tune on a corpus, generate candidates for a test set."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import DEFAULT_CHECKPOINT, TrainConfig
from .corpus import CorpusError, load_rows, prepare_corpus
from .inference import infer_candidates
from .training import finetune


def _config_from_args(args) -> TrainConfig:
    return TrainConfig(
        checkpoint=args.checkpoint,
        train_batch_size=args.batch_size,
        val_batch_size=args.batch_size,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        max_source_length=args.max_source_length,
        max_target_length=args.max_target_length,
        beams=args.beams,
        repetition_penalty=args.repetition_penalty,
        length_penalty=args.length_penalty,
        seed=args.seed,
        num_threads=args.threads,
    )


def cmd_train(args) -> int:
    cfg = _config_from_args(args)
    pairs = prepare_corpus(load_rows(args.corpus)[: args.limit or None])
    result = finetune(cfg, pairs, args.out)
    print(f"saved checkpoint to {result.checkpoint_dir}")
    if result.initial_val_loss is not None:
        print(f"val loss: {result.initial_val_loss:.4f} -> "
              f"{result.final_val_loss:.4f} over {cfg.epochs} epochs")
    print(f"tokenizer length {result.tokenizer_len}, "
          f"embedding rows {result.embedding_rows}, "
          f"added tag tokens {result.added_tokens}")
    return 0


def cmd_infer(args) -> int:
    cfg = _config_from_args(args)
    rows = load_rows(args.test)
    written = infer_candidates(args.checkpoint, rows, args.out, cfg)
    print(f"wrote {written} candidate plans to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="model-adapter")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--checkpoint", default=DEFAULT_CHECKPOINT,
                       help="hub id or local checkpoint directory")
        p.add_argument("--batch-size", type=int, default=8)
        p.add_argument("--epochs", type=int, default=3)
        p.add_argument("--learning-rate", type=float, default=1e-4)
        p.add_argument("--max-source-length", type=int, default=512)
        p.add_argument("--max-target-length", type=int, default=150)
        p.add_argument("--beams", type=int, default=2)
        p.add_argument("--repetition-penalty", type=float, default=2.5)
        p.add_argument("--length-penalty", type=float, default=1.0)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=0)

    p = sub.add_parser("train", help="fine-tune on a harness corpus (JSONL)")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="checkpoint output directory")
    p.add_argument("--limit", type=int, default=0, help="use only the first N rows")
    common(p)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("infer", help="write {id, plan} candidates for a test corpus")
    p.add_argument("--test", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(fn=cmd_infer)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s: %(message)s",
    )
    try:
        return args.fn(args)
    except (CorpusError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
