"""Seed-word extraction and enlargement via shallow morphology and embedding neighbors."""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .corpus import DEFAULT_TOKENIZER, FrequencyTable, Lexicon, TokenizerConfig, tokenize

GLOSSARY = "glossary"
MORPHOLOGICAL = "morphological"


def semantic_tag(iteration: int) -> str:
    return f"semantic:{iteration}"


@dataclass(frozen=True)
class MorphConfig:
    """Shallow-morphology expansion: strip a fixed suffix, match dictionary prefixes.

    ``n_m`` bounds the variants retained per seed; ``l_m`` is the minimal stem
    length (short stems over-generate); ``suffix_strip`` is how many trailing
    characters are removed to form the stem, floored at ``l_m``.
    """

    n_m: int = 10
    l_m: int = 5
    suffix_strip: int = 3

    def __post_init__(self):
        if self.l_m < 1:
            raise ValueError("l_m must be >= 1")
        if self.n_m < 0:
            raise ValueError("n_m must be >= 0")
        if self.suffix_strip < 0:
            raise ValueError("suffix_strip must be >= 0")


@dataclass(frozen=True)
class SemanticConfig:
    """Embedding-neighborhood expansion: n_w neighbors per word, i_w iterations."""

    n_w: int = 40
    i_w: int = 1

    def __post_init__(self):
        if self.n_w < 0:
            raise ValueError("n_w must be >= 0")
        if self.i_w < 1:
            raise ValueError("i_w must be >= 1")


@dataclass
class SeedSet:
    """Seed words with one provenance tag each; the first origin of a word wins."""

    provenance: dict[str, str] = field(default_factory=dict)
    morph_params: MorphConfig | None = None
    semantic_params: SemanticConfig | None = None

    def add(self, word: str, tag: str) -> bool:
        if not word:
            raise ValueError("seed words must be non-empty")
        if word in self.provenance:
            return False
        self.provenance[word] = tag
        return True

    @property
    def words(self) -> frozenset[str]:
        return frozenset(self.provenance)

    def __contains__(self, word: str) -> bool:
        return word in self.provenance

    def __len__(self) -> int:
        return len(self.provenance)

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self.provenance))

    def tagged(self) -> list[tuple[str, str]]:
        return [(w, self.provenance[w]) for w in sorted(self.provenance)]

    def copy(self) -> "SeedSet":
        return SeedSet(dict(self.provenance), self.morph_params, self.semantic_params)


def load_glossary(path: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> list[str]:
    """Tokenize a one-term-per-line glossary; multi-word terms contribute each token."""
    tokens: list[str] = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            tokens.extend(tokenize(line, config))
    return tokens


def extract_seeds(glossary_tokens: Iterable[str], base_lexicon: Lexicon) -> SeedSet:
    """Distinct glossary tokens absent from the base lexicon, tagged glossary."""
    seeds = SeedSet()
    for token in glossary_tokens:
        if token and token not in base_lexicon:
            seeds.add(token, GLOSSARY)
    return seeds


def seed_set_from_words(words: Iterable[str], tag: str = GLOSSARY) -> SeedSet:
    seeds = SeedSet()
    for word in words:
        if word:
            seeds.add(word, tag)
    return seeds


def write_seed_set(seeds: SeedSet, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for word, tag in seeds.tagged():
            handle.write(f"{word}\t{tag}\n")


def read_seed_set(path: str) -> SeedSet:
    seeds = SeedSet()
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) == 1:
                seeds.add(parts[0], GLOSSARY)
            elif len(parts) == 2:
                seeds.add(parts[0], parts[1])
            else:
                raise ValueError(f"{path}:{line_no}: expected 'word<TAB>tag', got {line!r}")
    return seeds


class EmbeddingFormatError(ValueError):
    """Raised for malformed embedding files; the message carries the line number."""


class EmbeddingTable:
    """Word vectors of one fixed dimension, supporting cosine-neighbor scans."""

    def __init__(self, dimension: int, vectors: dict[str, np.ndarray], duplicate_count: int = 0):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension
        self.vectors = vectors
        self.duplicate_count = duplicate_count
        self._scan_cache: tuple[list[str], np.ndarray, np.ndarray] | None = None

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def vector(self, word: str) -> np.ndarray:
        return self.vectors[word]

    def _scan_arrays(self) -> tuple[list[str], np.ndarray, np.ndarray]:
        # precomputed matrix + norms so repeated neighbor queries stay cheap
        if self._scan_cache is None:
            words = sorted(self.vectors)
            matrix = np.stack([self.vectors[w] for w in words]) if words else np.zeros((0, self.dimension))
            norms = np.linalg.norm(matrix, axis=1)
            self._scan_cache = (words, matrix, norms)
        return self._scan_cache


def load_embeddings(path: str) -> EmbeddingTable:
    """Read word2vec text format: a "V D" header, then V lines of "word v1 .. vD".

    Later duplicates of a word overwrite earlier ones and are tallied in
    ``duplicate_count``; structural problems abort with a line-numbered error.
    """
    with open(path, encoding="utf-8") as handle:
        header = handle.readline()
        if not header:
            raise EmbeddingFormatError(f"{path}:1: empty file, expected 'V D' header")
        parts = header.split()
        if len(parts) != 2:
            raise EmbeddingFormatError(f"{path}:1: malformed header {header.strip()!r}, expected 'V D'")
        try:
            declared, dim = int(parts[0]), int(parts[1])
        except ValueError:
            raise EmbeddingFormatError(f"{path}:1: non-integer header fields {header.strip()!r}") from None
        if declared < 0 or dim < 1:
            raise EmbeddingFormatError(f"{path}:1: invalid header values {header.strip()!r}")
        vectors: dict[str, np.ndarray] = {}
        duplicates = 0
        for line_no in range(2, declared + 2):
            line = handle.readline()
            if not line:
                raise EmbeddingFormatError(
                    f"{path}:{line_no}: expected {declared} vector lines, file ended early"
                )
            fields = line.split()
            if len(fields) != dim + 1:
                raise EmbeddingFormatError(
                    f"{path}:{line_no}: expected {dim} components, found {len(fields) - 1}"
                )
            word = fields[0]
            try:
                vec = np.array([float(x) for x in fields[1:]], dtype=np.float64)
            except ValueError:
                raise EmbeddingFormatError(f"{path}:{line_no}: non-numeric vector component") from None
            if word in vectors:
                duplicates += 1
            vectors[word] = vec
        trailer_no = declared + 2
        for line in handle:
            if line.strip():
                raise EmbeddingFormatError(
                    f"{path}:{trailer_no}: more vector lines than the header declares"
                )
            trailer_no += 1
    return EmbeddingTable(dim, vectors, duplicates)


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine similarity is undefined for zero-norm vectors")
    return float(np.dot(u, v) / (nu * nv))


def nearest_neighbors(word: str, table: EmbeddingTable, n: int) -> list[tuple[str, float]]:
    """Top-n other words by cosine similarity, ties broken by ascending word order.

    The scan is exhaustive over the vocabulary.  Zero-norm table entries have
    no defined similarity and are never returned.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if word not in table:
        raise KeyError(word)
    query = table.vector(word)
    qnorm = float(np.linalg.norm(query))
    if qnorm == 0.0:
        raise ValueError(f"query word {word!r} has a zero-norm vector")
    words, matrix, norms = table._scan_arrays()
    with np.errstate(divide="ignore", invalid="ignore"):
        sims = (matrix @ query) / (norms * qnorm)
    sims = np.where(norms > 0.0, sims, -np.inf)
    sims[words.index(word)] = -np.inf
    order = np.lexsort((np.array(words), -sims))
    limit = min(n, len(words) - 1)
    result = []
    for idx in order[:limit]:
        if sims[idx] == -np.inf:
            break
        result.append((words[idx], float(sims[idx])))
    return result


def expand_morphological(seeds: SeedSet, dictionary: FrequencyTable, cfg: MorphConfig) -> SeedSet:
    """Add the most frequent dictionary words sharing each seed's stem.

    The stem keeps the first ``max(l_m, len(seed) - suffix_strip)`` characters;
    seeds shorter than ``l_m`` are not expanded at all.  ``dictionary`` should
    be the full corpus vocabulary rather than a truncated lexicon.
    """
    result = seeds.copy()
    result.morph_params = cfg
    if cfg.n_m == 0:
        return result
    sorted_words = sorted(dictionary.counts)
    for seed in sorted(seeds.words):
        if len(seed) < cfg.l_m:
            continue
        stem = seed[: max(cfg.l_m, len(seed) - cfg.suffix_strip)]
        lo = bisect_left(sorted_words, stem)
        candidates = []
        for word in sorted_words[lo:]:
            if not word.startswith(stem):
                break
            if word != seed:
                candidates.append(word)
        candidates.sort(key=lambda w: (-dictionary[w], w))
        for word in candidates[: cfg.n_m]:
            result.add(word, MORPHOLOGICAL)
    return result


def expand_semantic(
    seeds: SeedSet, table: EmbeddingTable, cfg: SemanticConfig
) -> tuple[SeedSet, tuple[str, ...]]:
    """Grow the seed set with embedding neighbors, iterated over new words.

    Iteration k queries only the words first discovered at iteration k-1, so
    the result for i_w = k is a subset of the result for i_w = k+1.  Seed words
    missing from the embedding vocabulary cannot be queried; they stay in the
    set and are returned as the skipped tuple.
    """
    result = seeds.copy()
    result.semantic_params = cfg
    skipped = tuple(sorted(w for w in seeds.words if w not in table))
    if cfg.n_w == 0:
        return result, skipped
    accumulated = set(seeds.words)
    frontier = sorted(w for w in seeds.words if w in table)
    for iteration in range(1, cfg.i_w + 1):
        discovered: set[str] = set()
        for word in frontier:
            for neighbor, _ in nearest_neighbors(word, table, cfg.n_w):
                if neighbor not in accumulated:
                    discovered.add(neighbor)
        if not discovered:
            break
        accumulated |= discovered
        frontier = sorted(discovered)
        tag = semantic_tag(iteration)
        for word in frontier:
            result.add(word, tag)
    return result, skipped
