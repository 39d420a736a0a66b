"""Command-line interface: each pipeline stage as a subcommand, plus full runs."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import arpa, corpus, evaluate, lm, pipeline, seeds, selection


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argument problems are validation failures, exit code 1
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _tokenizer_config(args) -> corpus.TokenizerConfig:
    return corpus.TokenizerConfig(
        lowercase=not args.no_lowercase,
        split_apostrophes=args.split_apostrophes,
    )


def _add_tokenizer_flags(parser) -> None:
    parser.add_argument("--no-lowercase", action="store_true", help="keep original casing")
    parser.add_argument(
        "--split-apostrophes",
        action="store_true",
        help="detach clitic prefixes ending in an apostrophe (Romance languages)",
    )


def _require_files(*paths) -> None:
    import os

    missing = [p for p in paths if p and not os.path.isfile(p)]
    if missing:
        raise pipeline.ValidationError("input file not found: " + ", ".join(missing))


def _load_table(args) -> corpus.FrequencyTable:
    if getattr(args, "counts", None):
        _require_files(args.counts)
        return corpus.read_frequency_table(args.counts)
    if getattr(args, "corpus", None):
        _require_files(*args.corpus)
        cfg = _tokenizer_config(args)
        return corpus.build_frequency_table(corpus.iter_corpus(args.corpus, cfg))
    raise pipeline.ValidationError("need --corpus or --counts")


def _cmd_lexicon(args) -> int:
    table = _load_table(args)
    lexicon = corpus.build_lexicon(table, args.lexicon_size)
    corpus.write_lexicon(lexicon, args.out, table if args.with_counts else None)
    print(f"wrote {lexicon.size} words to {args.out}")
    return 0


def _cmd_seeds(args) -> int:
    _require_files(args.glossary, args.lexicon)
    cfg = _tokenizer_config(args)
    lexicon = corpus.read_lexicon(args.lexicon)
    seed_set = seeds.extract_seeds(seeds.load_glossary(args.glossary, cfg), lexicon)
    seeds.write_seed_set(seed_set, args.out)
    print(f"{len(seed_set)} seed words -> {args.out}")
    return 0


def _cmd_expand_morph(args) -> int:
    _require_files(args.seeds)
    seed_set = seeds.read_seed_set(args.seeds)
    table = _load_table(args)
    cfg = seeds.MorphConfig(n_m=args.n_m, l_m=args.l_m, suffix_strip=args.suffix_strip)
    expanded = seeds.expand_morphological(seed_set, table, cfg)
    seeds.write_seed_set(expanded, args.out)
    print(f"{len(seed_set)} -> {len(expanded)} seed words -> {args.out}")
    return 0


def _cmd_expand_w2v(args) -> int:
    _require_files(args.seeds, args.embeddings)
    seed_set = seeds.read_seed_set(args.seeds)
    table = seeds.load_embeddings(args.embeddings)
    cfg = seeds.SemanticConfig(n_w=args.n_w, i_w=args.i_w)
    expanded, skipped = seeds.expand_semantic(seed_set, table, cfg)
    seeds.write_seed_set(expanded, args.out)
    print(f"{len(seed_set)} -> {len(expanded)} seed words -> {args.out}")
    if skipped:
        print(f"{len(skipped)} seed words missing from the embedding vocabulary", file=sys.stderr)
    return 0


def _cmd_select(args) -> int:
    _require_files(args.seeds, args.lexicon, *args.corpus)
    cfg = _tokenizer_config(args)
    seed_set = seeds.read_seed_set(args.seeds)
    lexicon = corpus.read_lexicon(args.lexicon)
    report = selection.filter_corpus_files(
        args.corpus, seed_set, lexicon, args.out, cfg, args.context_window
    )
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="\n") as handle:
            json.dump(report.to_json_dict(), handle, indent=2, sort_keys=True)
            handle.write("\n")
    print(
        f"selected {report.documents_selected} of {report.documents_scanned} documents -> {args.out}"
    )
    if report.warning:
        print(f"warning: {report.warning}", file=sys.stderr)
    return 0


def _cmd_count(args) -> int:
    _require_files(args.lexicon, *args.corpus)
    cfg = _tokenizer_config(args)
    lexicon = corpus.read_lexicon(args.lexicon)
    counts = lm.count_ngrams(corpus.iter_corpus(args.corpus, cfg), lexicon, args.order)
    lm.write_counts(counts, args.out)
    print(f"counted orders 1..{args.order} -> {args.out}")
    return 0


def _cmd_train(args) -> int:
    if args.counts:
        _require_files(args.counts)
        counts = lm.read_counts(args.counts)
    else:
        if not (args.corpus and args.lexicon):
            raise pipeline.ValidationError("need --counts, or --corpus with --lexicon")
        _require_files(args.lexicon, *args.corpus)
        cfg = _tokenizer_config(args)
        lexicon = corpus.read_lexicon(args.lexicon)
        counts = lm.count_ngrams(corpus.iter_corpus(args.corpus, cfg), lexicon, args.order)
    model = lm.estimate_model(counts)
    arpa.export_arpa(model, args.out)
    sizes = " + ".join(str(model.ngram_count(n)) for n in range(1, model.order + 1))
    print(f"trained order-{model.order} model ({sizes} n-grams) -> {args.out}")
    return 0


def _cmd_adapt(args) -> int:
    _require_files(args.bg_counts, args.adapt_counts)
    bg = lm.read_counts(args.bg_counts)
    adapt = lm.read_counts(args.adapt_counts)
    model = lm.adapt_model(bg, adapt, lm.AdaptationWeight(args.lam))
    if args.prune or args.prob_threshold is not None:
        thresholds = _parse_prune(args.prune, model.order) if args.prune else None
        model = lm.prune_model(model, thresholds, args.prob_threshold)
    arpa.export_arpa(model, args.out)
    print(f"adapted model (lambda={args.lam}) -> {args.out}")
    return 0


def _parse_prune(spec: str, order: int) -> tuple[int, ...]:
    try:
        thresholds = tuple(int(x) for x in spec.replace(",", " ").split())
    except ValueError:
        raise pipeline.ValidationError(f"bad --prune value {spec!r}, expected integers") from None
    if len(thresholds) != order:
        raise pipeline.ValidationError(
            f"--prune needs one threshold per order ({order}), got {len(thresholds)}"
        )
    return thresholds


def _cmd_prune(args) -> int:
    _require_files(args.model)
    model = arpa.import_arpa(args.model)
    thresholds = _parse_prune(args.prune, model.order) if args.prune else None
    pruned = lm.prune_model(model, thresholds, args.prob_threshold)
    arpa.export_arpa(pruned, args.out)
    before = sum(model.ngram_count(n) for n in range(1, model.order + 1))
    after = sum(pruned.ngram_count(n) for n in range(1, pruned.order + 1))
    print(f"pruned {before} -> {after} n-grams -> {args.out}")
    return 0


def _cmd_ppl(args) -> int:
    _require_files(args.model, args.text)
    cfg = _tokenizer_config(args)
    model = arpa.import_arpa(args.model)
    sentences = [doc.tokens for doc in corpus.iter_documents(args.text, cfg)]
    result = lm.perplexity(model, sentences)
    print(
        f"perplexity {result.perplexity:.4f} over {result.events} events "
        f"({result.oov_mapped_count} OOV tokens mapped to {lm.UNK})"
    )
    return 0


def _cmd_oov_curve(args) -> int:
    _require_files(args.text)
    table = _load_table(args)
    cfg = _tokenizer_config(args)
    tokens = [tok for doc in corpus.iter_documents(args.text, cfg) for tok in doc.tokens]
    try:
        sizes = [int(x) for x in args.sizes.replace(",", " ").split()]
    except ValueError:
        raise pipeline.ValidationError(f"bad --sizes value {args.sizes!r}") from None
    curve = corpus.oov_curve(tokens, table, sizes)
    corpus.write_oov_curve(curve, args.out)
    for size, pct in curve:
        print(f"{size}\t{pct:.2f}%")
    return 0


def _cmd_score(args) -> int:
    _require_files(args.ref, args.hyp, args.lexicon)
    cfg = _tokenizer_config(args)
    lexicon = corpus.read_lexicon(args.lexicon) if args.lexicon else None
    report = evaluate.score_benchmark(args.ref, args.hyp, lexicon, cfg, args.scope)
    print(report.to_table())
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8", newline="\n") as handle:
            json.dump(report.to_json_dict(), handle, indent=2, sort_keys=True)
            handle.write("\n")
    return 0


def _cmd_pipeline(args) -> int:
    config = pipeline.load_config(args.config) if args.config else pipeline.PipelineConfig()
    # command-line flags win over the config file
    if args.corpus:
        config.corpus_paths = tuple(args.corpus)
    if args.glossary:
        config.glossary_path = args.glossary
    if args.embeddings:
        config.embeddings_path = args.embeddings
    if args.lexicon_size is not None:
        config.base_lexicon_size = args.lexicon_size
    if args.lam is not None:
        config.adaptation_weight = args.lam
    if args.n_m is not None or args.l_m is not None or args.suffix_strip is not None:
        config.morph = seeds.MorphConfig(
            n_m=args.n_m if args.n_m is not None else config.morph.n_m,
            l_m=args.l_m if args.l_m is not None else config.morph.l_m,
            suffix_strip=args.suffix_strip
            if args.suffix_strip is not None
            else config.morph.suffix_strip,
        )
    if args.n_w is not None or args.i_w is not None:
        config.semantic = seeds.SemanticConfig(
            n_w=args.n_w if args.n_w is not None else config.semantic.n_w,
            i_w=args.i_w if args.i_w is not None else config.semantic.i_w,
        )
    if args.f_min is not None:
        config.f_min = args.f_min
    if args.context_window is not None:
        config.context_window = args.context_window
    if args.order is not None:
        config.order = args.order
    if args.prune:
        config.prune_min_counts = _parse_prune(args.prune, config.order)
    if args.out_dir:
        config.out_dir = args.out_dir
    manifest = pipeline.run_pipeline(config, args.mode)
    print(f"{args.mode} pipeline complete; {len(manifest['artifacts'])} artifacts in {config.out_dir}")
    return 0


def _cmd_report(args) -> int:
    if len(args.manifest) != len(args.hyp):
        raise pipeline.ValidationError("--manifest and --hyp must be paired")
    _require_files(args.ref, *args.manifest, *args.hyp)
    cfg = _tokenizer_config(args)
    rows = pipeline.emit_report(list(zip(args.manifest, args.hyp)), args.ref, cfg, args.scope)
    if args.out_csv:
        pipeline.write_report_csv(rows, args.out_csv)
    if args.out_json:
        with open(args.out_json, "w", encoding="utf-8", newline="\n") as handle:
            json.dump(rows, handle, indent=2, sort_keys=True)
            handle.write("\n")
    header = " ".join(f"{c:>10}" for c in pipeline.REPORT_COLUMNS)
    print(header)
    for row in rows:
        print(" ".join(f"{row[c]!s:>10}" for c in pipeline.REPORT_COLUMNS))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lmadapt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lexicon", help="build a top-N lexicon from a corpus")
    p.add_argument("--corpus", nargs="+", default=[])
    p.add_argument("--counts", help="frequency table file instead of a corpus")
    p.add_argument("--lexicon-size", "-n", type=int, default=128000)
    p.add_argument("--with-counts", action="store_true", help="add a count column")
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(func=_cmd_lexicon)

    p = sub.add_parser("seeds", help="extract out-of-lexicon seed words from a glossary")
    p.add_argument("--glossary", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(func=_cmd_seeds)

    p = sub.add_parser("expand-morph", help="enlarge seeds by shared stems")
    p.add_argument("--seeds", required=True)
    p.add_argument("--corpus", nargs="+", default=[])
    p.add_argument("--counts", help="frequency table file instead of a corpus")
    p.add_argument("--n-m", type=int, default=10)
    p.add_argument("--l-m", type=int, default=5)
    p.add_argument("--suffix-strip", type=int, default=3)
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(func=_cmd_expand_morph)

    p = sub.add_parser("expand-w2v", help="enlarge seeds by embedding neighbors")
    p.add_argument("--seeds", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--n-w", type=int, default=40)
    p.add_argument("--i-w", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_expand_w2v)

    p = sub.add_parser("select", help="select documents containing out-of-lexicon seeds")
    p.add_argument("--corpus", nargs="+", required=True)
    p.add_argument("--seeds", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--context-window", type=int)
    p.add_argument("--report", help="write the selection report as JSON")
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("count", help="count n-grams over a corpus")
    p.add_argument("--corpus", nargs="+", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("train", help="estimate a backoff model and write ARPA")
    p.add_argument("--counts")
    p.add_argument("--corpus", nargs="+", default=[])
    p.add_argument("--lexicon")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("adapt", help="mix background and adaptation counts into a model")
    p.add_argument("--bg-counts", required=True)
    p.add_argument("--adapt-counts", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--prune", help="per-order count thresholds, e.g. 0,1,1")
    p.add_argument("--prob-threshold", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_adapt)

    p = sub.add_parser("prune", help="prune an ARPA model by probability threshold")
    p.add_argument("--model", required=True)
    p.add_argument("--prune", help="per-order count thresholds (needs supporting counts)")
    p.add_argument("--prob-threshold", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_prune)

    p = sub.add_parser("ppl", help="compute perplexity of a text under an ARPA model")
    p.add_argument("--model", required=True)
    p.add_argument("--text", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(func=_cmd_ppl)

    p = sub.add_parser("oov-curve", help="OOV rate of a text against nested lexicon sizes")
    p.add_argument("--corpus", nargs="+", default=[])
    p.add_argument("--counts", help="frequency table file instead of a corpus")
    p.add_argument("--text", required=True)
    p.add_argument("--sizes", required=True, help="comma-separated lexicon sizes")
    p.add_argument("--out", required=True)
    _add_tokenizer_flags(p)
    p.set_defaults(func=_cmd_oov_curve)

    p = sub.add_parser("score", help="score a reference/hypothesis transcript pair")
    p.add_argument("--ref", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--lexicon", help="also report the benchmark's OOV rate against this lexicon")
    p.add_argument("--scope", choices=("utterance", "corpus"), default="utterance")
    p.add_argument("--json-out")
    _add_tokenizer_flags(p)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("pipeline", help="run a full experiment (baseline/adapted/word2vec)")
    p.add_argument("--config")
    p.add_argument("--mode", choices=pipeline.MODES, required=True)
    p.add_argument("--corpus", nargs="+", default=[])
    p.add_argument("--glossary")
    p.add_argument("--embeddings")
    p.add_argument("--lexicon-size", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--n-m", type=int)
    p.add_argument("--l-m", type=int)
    p.add_argument("--suffix-strip", type=int)
    p.add_argument("--n-w", type=int)
    p.add_argument("--i-w", type=int)
    p.add_argument("--f-min", type=int)
    p.add_argument("--order", type=int)
    p.add_argument("--context-window", type=int)
    p.add_argument("--prune", help="per-order count thresholds, e.g. 0,1,1")
    p.add_argument("--out-dir")
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("report", help="consolidated result rows from manifests + transcripts")
    p.add_argument("--manifest", action="append", required=True)
    p.add_argument("--hyp", action="append", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--scope", choices=("utterance", "corpus"), default="utterance")
    p.add_argument("--out-csv")
    p.add_argument("--out-json")
    _add_tokenizer_flags(p)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except pipeline.ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
