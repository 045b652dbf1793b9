"""Command-line front end: corpus preparation, training, conversion, serving.

Every subcommand exits 0 on success and 1 with a one-line diagnostic on
failure; argparse handles usage errors with its own exit code 2.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

from . import corpus as corpus_mod
from . import ngram as ngram_mod
from .decoder import ScoreConfig
from .engine import build_engine, convert, load_engine
from .errors import P2CError
from .evaluation import evaluate, write_report
from .lattice import build_lattice, dump, inject_words
from .lexicon import load_char_dict, load_word_lexicon
from .service import serve


def _add_engine_flags(sub, ngram_required=False):
    sub.add_argument("--char-dict", required=True, help="character dictionary")
    sub.add_argument("--weights", required=True, help="PERT weight file")
    sub.add_argument("--ngram", required=ngram_required,
                     help="bigram transition model")
    sub.add_argument("--lexicon", action="append", default=[],
                     help="word lexicon file (repeatable)")
    sub.add_argument("--mode", choices=["emission", "combined"],
                     help="scoring mode; default combined when --ngram given")
    sub.add_argument("--lambda-emit", type=float, default=1.0)
    sub.add_argument("--lambda-trans", type=float, default=1.0)


def _engine_from_args(args, k=5):
    mode = args.mode or ("combined" if args.ngram else "emission")
    score = ScoreConfig(lambda_emit=args.lambda_emit,
                        lambda_trans=args.lambda_trans, mode=mode)
    return build_engine(args.char_dict, args.weights, ngram_path=args.ngram,
                        lexicon_paths=args.lexicon, score=score, k=k)


def _cmd_prepare_corpus(args):
    char_dict = load_char_dict(args.char_dict)
    lexicon = (load_word_lexicon(args.word_lexicon, char_dict)
               if args.word_lexicon else None)
    in_dir = Path(args.input)
    docs = []
    for path in sorted(in_dir.iterdir()):
        if path.is_file() and not path.name.startswith("."):
            docs.append(corpus_mod.RawDocument(
                id=path.name, text=path.read_text(encoding="utf-8")))
    config = corpus_mod.CorpusConfig(char_dict=char_dict,
                                     word_lexicon=lexicon,
                                     max_len=args.max_len)
    stats = corpus_mod.build_parallel_corpus(docs, config, args.out)
    corpus_mod.write_stats(stats, args.out + ".stats")
    for line in stats.as_kv_lines():
        print(line)
    return 0


def _cmd_train_bigram(args):
    char_dict = load_char_dict(args.char_dict)
    model = ngram_mod.train_bigram(args.corpus, char_dict, lam=args.lambda_)
    ngram_mod.save(model, args.out)
    print(f"tokens\t{model.total_tokens}")
    print(f"unigrams\t{len(model.unigram_counts)}")
    print(f"bigrams\t{len(model.bigram_counts)}")
    return 0


def _cmd_convert(args):
    engine = _engine_from_args(args, k=args.k)
    pinyin = tuple(args.pinyin.split())
    if args.dump_lattice:
        lattice = build_lattice(pinyin, engine.char_dict)
        for lx in engine.lexicons:
            inject_words(lattice, lx)
        sys.stdout.write(dump(lattice))
    results = convert(pinyin, engine, k=args.k)
    for rank, path in enumerate(results, start=1):
        print(f"{rank}\t{path.score:.6f}\t{path.surface}")
        if args.explain:
            for node, (e, t) in zip(path.nodes, path.per_node_scores):
                print(f"#\t{node.start}-{node.end}\t{node.surface}\t"
                      f"{node.kind}\temission={e:.6f}\ttransition={t:.6f}")
    return 0


def _cmd_evaluate(args):
    engine = _engine_from_args(args)
    report = evaluate(corpus_mod.read_parallel_corpus(args.corpus), engine,
                      mode=args.mode)
    write_report(report, args.report)
    if args.figure:
        from .figures import render_report_figure
        render_report_figure(report, args.figure)
    print(report.table())
    return 0


def _cmd_bench(args):
    engine = _engine_from_args(args)
    if args.corpus:
        inputs = [pinyin for pinyin, _ in
                  corpus_mod.read_parallel_corpus(args.corpus)]
    else:
        rng = random.Random(args.seed)
        vocab = [s for s in engine.char_dict.syllable_vocab[2:]]
        inputs = [tuple(rng.choice(vocab)
                        for _ in range(rng.randint(2, args.max_len)))
                  for _ in range(args.random)]
    if not inputs:
        print("error: nothing to benchmark", file=sys.stderr)
        return 1
    tokens = sum(len(p) for p in inputs)
    t0 = time.perf_counter()
    for pinyin in inputs:
        convert(pinyin, engine, k=1)
    elapsed = time.perf_counter() - t0
    print(f"sequences\t{len(inputs)}")
    print(f"tokens\t{tokens}")
    print(f"ms_per_token\t{elapsed * 1000.0 / tokens:.3f}")
    return 0


def _cmd_serve(args):
    engine = load_engine(args.config)
    host, _, port = args.bind.rpartition(":")
    print(f"serving on {host or '127.0.0.1'}:{port}", flush=True)
    serve(engine, host or "127.0.0.1", int(port))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="p2c",
        description="Pinyin-to-character conversion engine")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("prepare-corpus",
                          help="turn raw text into a parallel corpus")
    sub.add_argument("--input", required=True, help="directory of documents")
    sub.add_argument("--out", required=True, help="corpus file to write")
    sub.add_argument("--max-len", type=int, default=16)
    sub.add_argument("--char-dict", required=True)
    sub.add_argument("--word-lexicon", help="lexicon for word-aware readings")
    sub.set_defaults(func=_cmd_prepare_corpus)

    sub = subs.add_parser("train-bigram",
                          help="count transitions from a parallel corpus")
    sub.add_argument("--corpus", required=True)
    sub.add_argument("--out", required=True)
    sub.add_argument("--lambda", dest="lambda_", type=float, default=0.9,
                     help="interpolation weight (default 0.9)")
    sub.add_argument("--char-dict", required=True)
    sub.set_defaults(func=_cmd_train_bigram)

    sub = subs.add_parser("convert", help="convert one pinyin sequence")
    sub.add_argument("--pinyin", required=True,
                     help="space-separated syllables")
    sub.add_argument("--k", type=int, default=5)
    sub.add_argument("--dump-lattice", action="store_true")
    sub.add_argument("--explain", action="store_true",
                     help="print per-node score breakdown")
    _add_engine_flags(sub)
    sub.set_defaults(func=_cmd_convert)

    sub = subs.add_parser("evaluate", help="score an engine over a corpus")
    sub.add_argument("--corpus", required=True)
    sub.add_argument("--report", required=True, help="key-value report file")
    sub.add_argument("--figure", help="also render the metrics as a PNG")
    _add_engine_flags(sub)
    sub.set_defaults(func=_cmd_evaluate)

    sub = subs.add_parser("bench", help="measure conversion latency")
    sub.add_argument("--corpus", help="time the pinyin side of this corpus")
    sub.add_argument("--random", type=int, default=100,
                     help="or time N random syllable sequences")
    sub.add_argument("--max-len", type=int, default=16)
    sub.add_argument("--seed", type=int, default=0)
    _add_engine_flags(sub)
    sub.set_defaults(func=_cmd_bench)

    sub = subs.add_parser("serve", help="run the conversion HTTP service")
    sub.add_argument("--config", required=True, help="engine config JSON")
    sub.add_argument("--bind", default="127.0.0.1:8025")
    sub.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except P2CError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
