"""Command-line entry points: build-pairs, train, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from xencoder import pairs as pairs_mod
from xencoder.train import DEFAULT_BASE, TrainConfig, TrainingPair, train


def _write_pairs(pairs: list[pairs_mod.TrainingPair], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for pair in pairs:
            handle.write(
                json.dumps(
                    {
                        "query_id": pair.query_id,
                        "article_id": pair.article_id,
                        "query_text": pair.query_text,
                        "article_text": pair.article_text,
                        "label": pair.label,
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )


def _read_pairs(path: Path) -> list[TrainingPair]:
    out = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            out.append(
                TrainingPair(
                    query_id=obj["query_id"],
                    article_id=obj["article_id"],
                    query_text=obj["query_text"],
                    article_text=obj["article_text"],
                    label=int(obj["label"]),
                )
            )
    return out


def cmd_build_pairs(args: argparse.Namespace) -> int:
    text_field = "reformulated_text" if args.variant == "reform" else "original_text"
    pairs = pairs_mod.build_pairs_from_files(
        args.queries,
        args.corpus,
        args.qrels,
        args.rankings,
        text_field=text_field,
        top_n=args.top_n,
    )
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_pairs(pairs, out)
    positives = sum(p.label for p in pairs)
    print(f"wrote {len(pairs)} pairs ({positives} positive) to {out}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    pairs = _read_pairs(Path(args.pairs))
    config = TrainConfig(
        variant=args.variant,
        base=args.base,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        seed=args.seed,
    )
    artifact = train(pairs, args.output, config)
    print(f"saved model to {artifact}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from xencoder.serve import run

    run(args.model, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="xencoder")
    sub = parser.add_subparsers(dest="command", required=True)

    p_pairs = sub.add_parser("build-pairs", help="build labelled training pairs")
    p_pairs.add_argument("--queries", required=True)
    p_pairs.add_argument("--corpus", required=True)
    p_pairs.add_argument("--qrels", required=True)
    p_pairs.add_argument("--rankings", required=True)
    p_pairs.add_argument("--output", required=True)
    p_pairs.add_argument("--variant", choices=("origin", "reform"), default="origin")
    p_pairs.add_argument("--top-n", type=int, default=30)
    p_pairs.set_defaults(func=cmd_build_pairs)

    p_train = sub.add_parser("train", help="fine-tune a cross-encoder")
    p_train.add_argument("--pairs", required=True)
    p_train.add_argument("--output", required=True)
    p_train.add_argument("--variant", choices=("origin", "reform"), default="origin")
    p_train.add_argument("--base", default=DEFAULT_BASE)
    p_train.add_argument("--epochs", type=int, default=3)
    p_train.add_argument("--batch-size", type=int, default=16)
    p_train.add_argument("--learning-rate", type=float, default=2e-5)
    p_train.add_argument("--seed", type=int, default=42)
    p_train.set_defaults(func=cmd_train)

    p_serve = sub.add_parser("serve", help="serve scores over HTTP")
    p_serve.add_argument("--model", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8500)
    p_serve.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (pairs_mod.PairBuildError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
