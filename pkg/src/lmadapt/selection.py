"""Filter a corpus down to adaptation text: documents containing out-of-lexicon seeds."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .corpus import DEFAULT_TOKENIZER, Document, Lexicon, TokenizerConfig, tokenize
from .seeds import SeedSet


@dataclass
class SelectionReport:
    documents_scanned: int = 0
    documents_selected: int = 0
    seed_hits: Counter = field(default_factory=Counter)
    triggering_seeds: tuple[str, ...] = ()
    warning: str | None = None

    def to_json_dict(self) -> dict:
        payload = {
            "documents_scanned": self.documents_scanned,
            "documents_selected": self.documents_selected,
            "seed_hits": {w: self.seed_hits[w] for w in sorted(self.seed_hits)},
        }
        if self.warning:
            payload["warning"] = self.warning
        return payload


def triggering_seeds(seeds: SeedSet, base_lexicon: Lexicon) -> frozenset[str]:
    """Seeds that can trigger selection: those absent from the base lexicon."""
    return frozenset(w for w in seeds.words if w not in base_lexicon)


def select_documents(
    corpus_stream: Iterable[Document], seeds: SeedSet, base_lexicon: Lexicon
) -> tuple[Iterator[Document], SelectionReport]:
    """Lazily yield documents containing at least one out-of-lexicon seed token.

    Corpus order is preserved and documents pass through untouched.  The report
    is filled in as the iterator is consumed; its counters are only final once
    the iterator is exhausted.
    """
    report = SelectionReport()
    triggers = triggering_seeds(seeds, base_lexicon)
    report.triggering_seeds = tuple(sorted(triggers))
    if not triggers:
        report.warning = (
            "no seed words outside the base lexicon; nothing will be selected"
        )
        return iter(()), report

    def generate() -> Iterator[Document]:
        for doc in corpus_stream:
            report.documents_scanned += 1
            hits = [tok for tok in doc.tokens if tok in triggers]
            if hits:
                report.documents_selected += 1
                report.seed_hits.update(hits)
                yield doc

    return generate(), report


def extract_context_snippets(
    document: Document, seeds: SeedSet, base_lexicon: Lexicon, window: int
) -> list[tuple[str, ...]]:
    """Token spans of +-window around each triggering seed, overlaps merged.

    With window 0 the spans are exactly the seed tokens; a window covering the
    whole document collapses to a single span.
    """
    if window < 0:
        raise ValueError("context window must be >= 0")
    triggers = triggering_seeds(seeds, base_lexicon)
    tokens = document.tokens
    last = len(tokens) - 1
    intervals = [
        (max(0, i - window), min(last, i + window))
        for i, tok in enumerate(tokens)
        if tok in triggers
    ]
    merged: list[list[int]] = []
    for start, end in intervals:
        if merged and start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])
    return [tuple(tokens[s : e + 1]) for s, e in merged]


def filter_corpus_files(
    paths: Sequence[str],
    seeds: SeedSet,
    base_lexicon: Lexicon,
    out_path: str,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
    context_window: int | None = None,
) -> SelectionReport:
    """File-level selection that writes selected lines verbatim to ``out_path``.

    Without a context window, output lines are byte-identical to their corpus
    originals; with one, each merged context snippet becomes its own line.
    Undecodable lines are skipped, like everywhere else in the corpus path.
    """
    report = SelectionReport()
    triggers = triggering_seeds(seeds, base_lexicon)
    report.triggering_seeds = tuple(sorted(triggers))
    with open(out_path, "w", encoding="utf-8", newline="\n") as out:
        if not triggers:
            report.warning = (
                "no seed words outside the base lexicon; nothing will be selected"
            )
            return report
        doc_id = 0
        for path in paths:
            with open(path, "rb") as handle:
                for raw in handle:
                    doc_id += 1
                    try:
                        line = raw.decode("utf-8")
                    except UnicodeDecodeError:
                        continue
                    report.documents_scanned += 1
                    tokens = tokenize(line, config)
                    hits = [tok for tok in tokens if tok in triggers]
                    if not hits:
                        continue
                    report.documents_selected += 1
                    report.seed_hits.update(hits)
                    if context_window is None:
                        out.write(line.rstrip("\r\n") + "\n")
                    else:
                        doc = Document(doc_id, tuple(tokens))
                        for span in extract_context_snippets(
                            doc, seeds, base_lexicon, context_window
                        ):
                            out.write(" ".join(span) + "\n")
    return report
