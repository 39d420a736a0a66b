"""End-to-end pipelines: baseline, glossary-adapted, and embedding-expanded runs,
with a config file, artifact manifests, and consolidated result reports."""

from __future__ import annotations

import configparser
import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Sequence

from .arpa import export_arpa
from .corpus import (
    DEFAULT_TOKENIZER,
    IngestReport,
    TokenizerConfig,
    build_frequency_table,
    build_lexicon,
    iter_corpus,
    read_lexicon,
    two_decimals,
    write_lexicon,
)
from .evaluate import score_benchmark
from .lm import (
    AdaptationWeight,
    adapt_model,
    build_adapted_lexicon,
    count_ngrams,
    estimate_model,
    prune_model,
)
from .seeds import (
    MorphConfig,
    SemanticConfig,
    expand_morphological,
    expand_semantic,
    extract_seeds,
    load_embeddings,
    load_glossary,
    seed_set_from_words,
    write_seed_set,
)
from .selection import filter_corpus_files

MODES = ("baseline", "adapted", "word2vec")


class ValidationError(Exception):
    """Configuration or input problems detected before any work starts."""


@dataclass
class PipelineConfig:
    corpus_paths: tuple[str, ...] = ()
    base_lexicon_size: int = 128000
    tokenizer: TokenizerConfig = DEFAULT_TOKENIZER
    glossary_path: str | None = None
    embeddings_path: str | None = None
    morph: MorphConfig = field(default_factory=MorphConfig)
    morph_expand: bool = False
    semantic: SemanticConfig = field(default_factory=SemanticConfig)
    context_window: int | None = None
    order: int = 3
    adaptation_weight: float = 0.5
    f_min: int = 1
    prune_min_counts: tuple[int, ...] | None = None
    prune_prob_threshold: float | None = None
    out_dir: str = "out"


def load_config(path: str) -> PipelineConfig:
    """Read a sectioned key-value config file (INI syntax)."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ValidationError(f"config file not found: {path}")
    cfg = PipelineConfig()
    try:
        if parser.has_section("corpus"):
            sec = parser["corpus"]
            if "paths" in sec:
                cfg.corpus_paths = tuple(sec["paths"].split())
            cfg.base_lexicon_size = sec.getint("lexicon_size", cfg.base_lexicon_size)
            cfg.tokenizer = TokenizerConfig(
                lowercase=sec.getboolean("lowercase", True),
                split_apostrophes=sec.getboolean("split_apostrophes", False),
            )
        if parser.has_section("seeds"):
            sec = parser["seeds"]
            cfg.glossary_path = sec.get("glossary", cfg.glossary_path)
            cfg.embeddings_path = sec.get("embeddings", cfg.embeddings_path)
            cfg.morph = MorphConfig(
                n_m=sec.getint("n_m", cfg.morph.n_m),
                l_m=sec.getint("l_m", cfg.morph.l_m),
                suffix_strip=sec.getint("suffix_strip", cfg.morph.suffix_strip),
            )
            cfg.morph_expand = sec.getboolean("morph_expand", cfg.morph_expand)
            cfg.semantic = SemanticConfig(
                n_w=sec.getint("n_w", cfg.semantic.n_w),
                i_w=sec.getint("i_w", cfg.semantic.i_w),
            )
        if parser.has_section("selection"):
            sec = parser["selection"]
            if sec.get("context_window", "").strip():
                cfg.context_window = sec.getint("context_window")
        if parser.has_section("model"):
            sec = parser["model"]
            cfg.order = sec.getint("order", cfg.order)
            cfg.adaptation_weight = sec.getfloat("lambda", cfg.adaptation_weight)
            cfg.f_min = sec.getint("f_min", cfg.f_min)
            if sec.get("prune", "").strip():
                cfg.prune_min_counts = tuple(
                    int(x) for x in sec["prune"].replace(",", " ").split()
                )
            if sec.get("prob_threshold", "").strip():
                cfg.prune_prob_threshold = sec.getfloat("prob_threshold")
        if parser.has_section("output"):
            cfg.out_dir = parser["output"].get("dir", cfg.out_dir)
    except ValueError as exc:
        raise ValidationError(f"bad value in config {path}: {exc}") from exc
    return cfg


def validate_config(config: PipelineConfig, mode: str) -> None:
    """Fail fast on anything that would break mid-run."""
    problems = []
    if mode not in MODES:
        problems.append(f"unknown mode {mode!r}, expected one of {', '.join(MODES)}")
    if not config.corpus_paths:
        problems.append("no corpus files configured")
    for path in config.corpus_paths:
        if not os.path.isfile(path):
            problems.append(f"corpus file not found: {path}")
    if config.base_lexicon_size < 1:
        problems.append("lexicon size must be >= 1")
    if config.order < 1:
        problems.append("model order must be >= 1")
    if not 0.0 <= config.adaptation_weight <= 1.0:
        problems.append("lambda must be in [0, 1]")
    if config.f_min < 1:
        problems.append("f_min must be >= 1")
    if config.context_window is not None and config.context_window < 0:
        problems.append("context window must be >= 0")
    if config.prune_min_counts is not None and len(config.prune_min_counts) != config.order:
        problems.append("prune thresholds must list one value per n-gram order")
    if mode in ("adapted", "word2vec"):
        if not config.glossary_path:
            problems.append(f"{mode} mode needs a glossary / seed-word file")
        elif not os.path.isfile(config.glossary_path):
            problems.append(f"glossary file not found: {config.glossary_path}")
    if mode == "word2vec":
        if not config.embeddings_path:
            problems.append("word2vec mode needs an embeddings file")
        elif not os.path.isfile(config.embeddings_path):
            problems.append(f"embeddings file not found: {config.embeddings_path}")
    if problems:
        raise ValidationError("; ".join(problems))


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def _parameters_dict(config: PipelineConfig, mode: str) -> dict:
    params = {
        "base_lexicon_size": config.base_lexicon_size,
        "order": config.order,
        "lowercase": config.tokenizer.lowercase,
        "split_apostrophes": config.tokenizer.split_apostrophes,
    }
    if mode != "baseline":
        params.update(
            {
                "lambda": config.adaptation_weight,
                "f_min": config.f_min,
                "context_window": config.context_window,
                "prune": list(config.prune_min_counts) if config.prune_min_counts else None,
                "prob_threshold": config.prune_prob_threshold,
            }
        )
    if mode == "adapted":
        params["morph_expand"] = config.morph_expand
        if config.morph_expand:
            params.update(
                {"n_m": config.morph.n_m, "l_m": config.morph.l_m, "suffix_strip": config.morph.suffix_strip}
            )
    if mode == "word2vec":
        params.update({"n_w": config.semantic.n_w, "i_w": config.semantic.i_w})
    return params


def run_pipeline(config: PipelineConfig, mode: str) -> dict:
    """Run one experiment end to end and return its manifest.

    Artifacts land in ``config.out_dir``; the manifest (also written there as
    manifest.json) lists them by name with sizes and content hashes, and is
    byte-identical across reruns on identical inputs.
    """
    validate_config(config, mode)
    os.makedirs(config.out_dir, exist_ok=True)
    artifacts: list[str] = []
    stats: dict = {}

    def outpath(name: str) -> str:
        artifacts.append(name)
        return os.path.join(config.out_dir, name)

    ingest = IngestReport()
    table = build_frequency_table(
        iter_corpus(config.corpus_paths, config.tokenizer, ingest)
    )
    base_lexicon = build_lexicon(table, config.base_lexicon_size)
    write_lexicon(base_lexicon, outpath("base_lexicon.txt"), table)
    stats["corpus_lines"] = ingest.lines_read
    stats["corpus_lines_skipped"] = ingest.lines_skipped
    stats["corpus_vocabulary"] = len(table)
    stats["base_lexicon_size"] = base_lexicon.size

    bg_counts = count_ngrams(
        iter_corpus(config.corpus_paths, config.tokenizer), base_lexicon, config.order
    )
    background = estimate_model(bg_counts)
    export_arpa(background, outpath("background.arpa"))

    if mode == "baseline":
        stats["seed_words"] = 0
    else:
        glossary_tokens = load_glossary(config.glossary_path, config.tokenizer)
        if mode == "adapted":
            seed_set = extract_seeds(glossary_tokens, base_lexicon)
            if config.morph_expand:
                seed_set = expand_morphological(seed_set, table, config.morph)
        else:
            # initial seed words are taken verbatim; the expansion decides
            # usefulness, and selection still triggers only on out-of-lexicon ones
            seed_set = seed_set_from_words(glossary_tokens)
            embeddings = load_embeddings(config.embeddings_path)
            seed_set, skipped = expand_semantic(seed_set, embeddings, config.semantic)
            stats["seeds_missing_from_embeddings"] = len(skipped)
        write_seed_set(seed_set, outpath("seeds.tsv"))
        stats["seed_words"] = len(seed_set)

        selection_report = filter_corpus_files(
            config.corpus_paths,
            seed_set,
            base_lexicon,
            outpath("adaptation.txt"),
            config.tokenizer,
            config.context_window,
        )
        with open(outpath("selection.json"), "w", encoding="utf-8", newline="\n") as handle:
            json.dump(selection_report.to_json_dict(), handle, indent=2, sort_keys=True)
            handle.write("\n")
        stats["triggering_seeds"] = len(selection_report.triggering_seeds)
        stats["documents_scanned"] = selection_report.documents_scanned
        stats["documents_selected"] = selection_report.documents_selected

        adaptation_file = os.path.join(config.out_dir, "adaptation.txt")
        adapt_table = build_frequency_table(iter_corpus([adaptation_file], config.tokenizer))
        adapted_lexicon = build_adapted_lexicon(base_lexicon, adapt_table, config.f_min)
        write_lexicon(adapted_lexicon, outpath("adapted_lexicon.txt"))
        stats["adapted_lexicon_size"] = adapted_lexicon.size

        adapt_counts = count_ngrams(
            iter_corpus([adaptation_file], config.tokenizer), adapted_lexicon, config.order
        )
        adapted = adapt_model(bg_counts, adapt_counts, AdaptationWeight(config.adaptation_weight))
        if config.prune_min_counts is not None or config.prune_prob_threshold is not None:
            adapted = prune_model(adapted, config.prune_min_counts, config.prune_prob_threshold)
        export_arpa(adapted, outpath("adapted.arpa"))

    manifest = {
        "mode": mode,
        "inputs": {
            "corpus": list(config.corpus_paths),
            "glossary": config.glossary_path if mode != "baseline" else None,
            "embeddings": config.embeddings_path if mode == "word2vec" else None,
        },
        "parameters": _parameters_dict(config, mode),
        "stats": stats,
        "artifacts": [
            {
                "name": name,
                "bytes": os.path.getsize(os.path.join(config.out_dir, name)),
                "sha256": _sha256(os.path.join(config.out_dir, name)),
            }
            for name in sorted(artifacts)
        ],
    }
    with open(os.path.join(config.out_dir, "manifest.json"), "w", encoding="utf-8", newline="\n") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return manifest


REPORT_COLUMNS = (
    "mode",
    "seeds",
    "lex_size",
    "oov_rate",
    "wer",
    "iw_p",
    "iw_r",
    "iw_f",
    "isol_iw_p",
    "isol_iw_r",
    "isol_iw_f",
)


def emit_report(
    entries: Sequence[tuple[str, str]],
    ref_path: str,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
    scope: str = "utterance",
) -> list[dict]:
    """One consolidated result row per (manifest, hypothesis-transcript) pair.

    Each row carries the seed count and lexicon size from the manifest, the
    benchmark's OOV rate against that run's lexicon, and the WER / key-term
    precision-recall scores of the paired hypothesis.
    """
    rows = []
    for manifest_path, hyp_path in entries:
        with open(manifest_path, encoding="utf-8") as handle:
            manifest = json.load(handle)
        out_dir = os.path.dirname(manifest_path)
        mode = manifest["mode"]
        lexicon_name = "adapted_lexicon.txt" if mode != "baseline" else "base_lexicon.txt"
        lexicon = read_lexicon(os.path.join(out_dir, lexicon_name))
        report = score_benchmark(ref_path, hyp_path, lexicon, config, scope)
        rows.append(
            {
                "mode": mode,
                "seeds": manifest["stats"].get("seed_words", 0),
                "lex_size": lexicon.size,
                "oov_rate": report.oov.percentage,
                "wer": report.wer_percent,
                "iw_p": two_decimals(report.iw.precision),
                "iw_r": two_decimals(report.iw.recall),
                "iw_f": two_decimals(report.iw.f_measure),
                "isol_iw_p": two_decimals(report.isol_iw.precision),
                "isol_iw_r": two_decimals(report.isol_iw.recall),
                "isol_iw_f": two_decimals(report.isol_iw.f_measure),
            }
        )
    return rows


def write_report_csv(rows: Sequence[dict], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(REPORT_COLUMNS) + "\n")
        for row in rows:
            handle.write(",".join(str(row[col]) for col in REPORT_COLUMNS) + "\n")
