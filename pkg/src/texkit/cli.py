"""Command-line driver: offline builds, training, one-shot analysis,
evaluation, and the HTTP service.

stdout carries data (JSON unless noted), stderr carries logs. Exit codes:
0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .analyzer import Engine
from .core import Language, Span
from .errors import TexkitError
from .knowledge import IsaMap, build_clusters, extract_isa_pairs, term_similarity
from .ner import EntityMention, f1_variant, train_coarse
from .ontology import load_ontology
from .postag import TrainConfig, train_log_linear
from .segmentation import build_collocation_stats
from .service import ServiceConfig, analyze_payload, match_payload, serve

USAGE_EXIT = 1
DATA_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _model_dir(args) -> Path:
    path = args.model_dir or os.environ.get("TEXKIT_MODEL_DIR")
    if not path:
        print("no model directory: pass --model-dir or set TEXKIT_MODEL_DIR", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)
    return Path(path)


def _read_lines(path: str):
    with open(path, encoding="utf-8") as fh:
        yield from fh


def cmd_build_isa(args) -> int:
    isa = extract_isa_pairs(
        _read_lines(args.corpus), Language.from_code(args.lang), min_count=args.min_count
    )
    isa.save(args.out)
    print(f"build-isa: {len(isa)} pairs -> {args.out}")
    return 0


def cmd_build_stats(args) -> int:
    stats = build_collocation_stats(_read_lines(args.corpus), Language.from_code(args.lang))
    stats.save(args.out)
    print(f"build-stats: {len(stats.unigram_counts)} unigrams, "
          f"{len(stats.bigram_counts)} bigrams -> {args.out}")
    return 0


def cmd_build_clusters(args) -> int:
    isa = IsaMap.load(args.isa)
    store = None
    if args.embeddings_in:
        from .embeddings import load_embeddings

        store = load_embeddings(args.embeddings_in, args.embeddings_out)
    cooc = None
    if args.stats:
        from .segmentation import CollocationStats

        cooc = CollocationStats.load(args.stats)

    def sim(a: str, b: str) -> float:
        return term_similarity(a, b, store, isa, cooc)

    index = build_clusters(
        isa, sim, args.threshold, args.seed, min_cluster_size=args.min_size
    )
    index.save(args.out)
    print(f"build-clusters: {len(index)} clusters -> {args.out}")
    return 0


def cmd_train_pos(args) -> int:
    config = TrainConfig(epochs=args.epochs, learning_rate=args.lr, l2=args.l2, seed=args.seed)
    model = train_log_linear(
        args.corpus, config, tag_set_name=args.tagset, lang=args.lang
    )
    model.save(args.out)
    print(f"train-pos: {len(model.weights)} features, "
          f"final loss {model.loss_history[-1]:.6f} -> {args.out}")
    return 0


def cmd_train_ner(args) -> int:
    config = TrainConfig(epochs=args.epochs, seed=args.seed)
    types = tuple(t.strip() for t in args.types.split(",") if t.strip())
    model = train_coarse(args.corpus, config, types=types, lang=args.lang)
    model.save(args.out)
    print(f"train-ner: {len(model.feature_weights)} features -> {args.out}")
    return 0


def _build_analyze_body(args) -> dict:
    body: dict = {"str": args.text}
    options: dict = {}
    if args.lang:
        options["input_spec"] = {"lang": args.lang}
    if args.ref_time:
        options["reference_time"] = args.ref_time
    if options:
        body["options"] = options
    return body


def cmd_analyze(args) -> int:
    engine = Engine.load(_model_dir(args))
    body = _build_analyze_body(args)
    envelope = analyze_payload(engine, body)
    indent = 2 if args.pretty else None
    print(json.dumps(envelope, ensure_ascii=False, indent=indent))
    return 0


def cmd_match(args) -> int:
    engine = Engine.load(_model_dir(args))
    body = {"str_a": args.a, "str_b": args.b}
    if args.lang:
        body["options"] = {"input_spec": {"lang": args.lang}}
    envelope = match_payload(engine, body)
    indent = 2 if args.pretty else None
    print(json.dumps(envelope, ensure_ascii=False, indent=indent))
    return 0


def _load_mentions(path: str) -> list[EntityMention]:
    mentions = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            offset, length = obj["hit"]
            mentions.append(
                EntityMention(
                    span=Span(offset, length),
                    surface=obj.get("str", ""),
                    type_id=obj["type"],
                    source=obj.get("source", "fine"),
                )
            )
    return mentions


def _fmt(x: float) -> str:
    return format(round(x, 6), "g")


def cmd_eval_ner(args) -> int:
    if args.ontology:
        ont = load_ontology(args.ontology)
    else:
        ont = load_ontology(_model_dir(args) / "ontology.jsonl")
    gold = _load_mentions(args.gold)
    pred = _load_mentions(args.pred)
    p, r, f1 = f1_variant(gold, pred, ont)
    print(f"P={_fmt(p)} R={_fmt(r)} F1={_fmt(f1)}")
    return 0


def cmd_serve(args) -> int:
    config = ServiceConfig.load(
        args.config,
        model_dir=args.model_dir,
        port=args.port,
        host=args.host,
    )
    serve(config)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="texkit", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("build-isa", help="mine hyponym/hypernym pairs from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lang", default="en", choices=["en", "chs"])
    p.add_argument("--min-count", type=int, default=2)
    p.set_defaults(func=cmd_build_isa)

    p = sub.add_parser("build-stats", help="count unigrams and bigrams from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lang", default="en", choices=["en", "chs"])
    p.set_defaults(func=cmd_build_stats)

    p = sub.add_parser("build-clusters", help="cluster hyponyms into labeled term clusters")
    p.add_argument("--isa", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--embeddings-in")
    p.add_argument("--embeddings-out")
    p.add_argument("--stats")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-size", type=int, default=2)
    p.set_defaults(func=cmd_build_clusters)

    p = sub.add_parser("train-pos", help="train the log-linear POS tagger")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tagset", default="ptb", choices=["ptb", "ctb"])
    p.add_argument("--lang", default="en", choices=["en", "chs"])
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--l2", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train_pos)

    p = sub.add_parser("train-ner", help="train the coarse NER perceptron")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--types", default="person.generic,loc.generic,org.generic")
    p.add_argument("--lang", default="en", choices=["en", "chs"])
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train_ner)

    p = sub.add_parser("analyze", help="analyze one text and print the API JSON")
    p.add_argument("--text", required=True)
    p.add_argument("--lang", choices=["auto", "en", "chs"])
    p.add_argument("--ref-time", help="ISO-8601 reference time for relative dates")
    p.add_argument("--model-dir")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("match", help="score the similarity of two sentences")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--lang", choices=["auto", "en", "chs"])
    p.add_argument("--model-dir")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("eval-ner", help="score predictions against gold mentions")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--ontology")
    p.add_argument("--model-dir")
    p.set_defaults(func=cmd_eval_ner)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config")
    p.add_argument("--model-dir")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TexkitError as exc:
        print(f"texkit: {exc}", file=sys.stderr)
        return DATA_EXIT
    except FileNotFoundError as exc:
        print(f"texkit: {exc}", file=sys.stderr)
        return DATA_EXIT
    except json.JSONDecodeError as exc:
        print(f"texkit: bad JSON input: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
