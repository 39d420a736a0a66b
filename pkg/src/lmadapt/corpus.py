"""Corpus streaming, tokenization, frequency tables, lexica, and OOV statistics."""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Iterator, Sequence

APOSTROPHES = "'’"


@dataclass(frozen=True)
class TokenizerConfig:
    """Normalization settings. Equal configs tokenize equal lines identically."""

    lowercase: bool = True
    split_apostrophes: bool = False


DEFAULT_TOKENIZER = TokenizerConfig()


def _strippable(ch: str) -> bool:
    # punctuation and symbol characters; digits and letters always survive
    return unicodedata.category(ch)[0] in ("P", "S")


def _strip_edges(chunk: str) -> str:
    start, end = 0, len(chunk)
    while start < end and _strippable(chunk[start]):
        start += 1
    while end > start and _strippable(chunk[end - 1]):
        end -= 1
    return chunk[start:end]


def _split_clitics(token: str) -> list[str]:
    # "l'igiene" -> ["l'", "igiene"]; the apostrophe stays on the left piece
    pieces = []
    start = 0
    for i, ch in enumerate(token):
        if ch in APOSTROPHES and i + 1 > start:
            pieces.append(token[start : i + 1])
            start = i + 1
    if start < len(token):
        pieces.append(token[start:])
    return [p for p in pieces if p and p not in set(APOSTROPHES)]


def tokenize(raw_line: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> list[str]:
    """Split a raw line into normalized word tokens.

    Lowercases (unless disabled), splits on Unicode whitespace, and strips
    punctuation/symbol characters from both ends of each chunk, so digits and
    intra-word hyphens/apostrophes are kept.  With ``split_apostrophes`` set,
    clitic prefixes are detached after edge stripping ("l'igiene" becomes
    "l'" + "igiene"), which suits Romance-language text.
    """
    if config.lowercase:
        raw_line = raw_line.lower()
    tokens: list[str] = []
    for chunk in raw_line.split():
        chunk = _strip_edges(chunk)
        if not chunk:
            continue
        if config.split_apostrophes:
            tokens.extend(_split_clitics(chunk))
        else:
            tokens.append(chunk)
    return tokens


@dataclass(frozen=True)
class Document:
    """One corpus line: an ordinal id and its normalized tokens."""

    id: int
    tokens: tuple[str, ...]


@dataclass
class IngestReport:
    lines_read: int = 0
    lines_skipped: int = 0


def iter_documents(
    path: str,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
    report: IngestReport | None = None,
    start_id: int = 1,
) -> Iterator[Document]:
    """Stream one Document per line of a UTF-8 corpus file.

    Lines that fail to decode are skipped and counted in ``report`` instead of
    aborting the run; raw web corpora are rarely clean.
    """
    doc_id = start_id
    with open(path, "rb") as handle:
        for raw in handle:
            if report is not None:
                report.lines_read += 1
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError:
                if report is not None:
                    report.lines_skipped += 1
                doc_id += 1
                continue
            yield Document(doc_id, tuple(tokenize(line, config)))
            doc_id += 1


def iter_corpus(
    paths: Sequence[str],
    config: TokenizerConfig = DEFAULT_TOKENIZER,
    report: IngestReport | None = None,
) -> Iterator[Document]:
    """Chain several corpus files into one document stream with running ids."""
    next_id = 1
    for path in paths:
        for doc in iter_documents(path, config, report, start_id=next_id):
            next_id = doc.id + 1
            yield doc


class FrequencyTable:
    """Word occurrence counts over a corpus; the source of ranked lexica."""

    def __init__(self, counts: Counter | None = None):
        self.counts: Counter = counts if counts is not None else Counter()
        self.total_running_words: int = sum(self.counts.values())

    def __len__(self) -> int:
        return len(self.counts)

    def __contains__(self, word: str) -> bool:
        return word in self.counts

    def __getitem__(self, word: str) -> int:
        return self.counts[word]

    def get(self, word: str, default: int = 0) -> int:
        return self.counts.get(word, default)

    def items(self):
        return self.counts.items()

    def merge(self, other: "FrequencyTable") -> "FrequencyTable":
        """Combine two shard tables; associative and commutative."""
        return FrequencyTable(self.counts + other.counts)

    def ranked_words(self) -> list[str]:
        """All words ordered by count descending, ties by word ascending."""
        return sorted(self.counts, key=lambda w: (-self.counts[w], w))


def build_frequency_table(corpus_stream: Iterable[Document]) -> FrequencyTable:
    counts: Counter = Counter()
    for doc in corpus_stream:
        counts.update(doc.tokens)
    return FrequencyTable(counts)


class Lexicon:
    """Ordered top-N word list; rank 1 is the most frequent word."""

    def __init__(self, words: Sequence[str]):
        self.words: tuple[str, ...] = tuple(words)
        self._ranks: dict[str, int] = {}
        for i, word in enumerate(self.words, 1):
            if word in self._ranks:
                raise ValueError(f"duplicate word in lexicon: {word!r}")
            self._ranks[word] = i

    @property
    def size(self) -> int:
        return len(self.words)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._ranks

    def __iter__(self) -> Iterator[str]:
        return iter(self.words)

    def rank(self, word: str) -> int:
        """1-based rank of a member word; raises KeyError for non-members."""
        return self._ranks[word]


def build_lexicon(table: FrequencyTable, n: int) -> Lexicon:
    """Top-n words by count (ties broken by ascending word order)."""
    if n < 1:
        raise ValueError("lexicon size must be >= 1")
    return Lexicon(table.ranked_words()[:n])


def two_decimals(value: float) -> float:
    """Round half-up to two decimals, for percentage reporting."""
    return float(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class OOVRate:
    oov_count: int
    running_words: int
    percentage: float


def oov_rate(tokens: Sequence[str], lexicon: Lexicon) -> OOVRate:
    """Share of running words missing from the lexicon, as a two-decimal percentage."""
    running = len(tokens)
    oov = sum(1 for tok in tokens if tok not in lexicon)
    pct = two_decimals(100.0 * oov / running) if running else 0.0
    return OOVRate(oov, running, pct)


def oov_curve(
    tokens: Sequence[str], table: FrequencyTable, sizes: Sequence[int]
) -> list[tuple[int, float]]:
    """OOV percentage of ``tokens`` against nested top-k lexica for each size.

    Top-k lexica are nested, so the curve is computed from a single rank pass
    instead of rebuilding a lexicon per size.
    """
    if not sizes:
        raise ValueError("sizes must be non-empty")
    if any(k < 1 for k in sizes):
        raise ValueError("lexicon sizes must be >= 1")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    ranks = {word: i for i, word in enumerate(table.ranked_words(), 1)}
    token_ranks = [ranks.get(tok) for tok in tokens]
    running = len(tokens)
    curve = []
    for size in sizes:
        oov = sum(1 for r in token_ranks if r is None or r > size)
        pct = two_decimals(100.0 * oov / running) if running else 0.0
        curve.append((size, pct))
    return curve


def write_lexicon(lexicon: Lexicon, path: str, table: FrequencyTable | None = None) -> None:
    """One word per line in rank order; with a table, a tab-separated count column."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for word in lexicon.words:
            if table is not None:
                handle.write(f"{word}\t{table.get(word)}\n")
            else:
                handle.write(word + "\n")


def read_lexicon(path: str) -> Lexicon:
    words = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                continue
            words.append(line.split("\t")[0])
    return Lexicon(words)


def write_frequency_table(table: FrequencyTable, path: str) -> None:
    """Full vocabulary dump, count order: reloadable with read_frequency_table."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for word in table.ranked_words():
            handle.write(f"{word}\t{table[word]}\n")


def read_frequency_table(path: str) -> FrequencyTable:
    counts: Counter = Counter()
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                word, count = line.split("\t")
                counts[word] += int(count)
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: malformed count line: {line!r}") from exc
    return FrequencyTable(counts)


def write_oov_curve(curve: Sequence[tuple[int, float]], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("size,oov_percent\n")
        for size, pct in curve:
            handle.write(f"{size},{pct:.2f}\n")
