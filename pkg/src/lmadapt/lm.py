"""Backoff n-gram models: counting, Witten-Bell estimation, frequency-interpolation
adaptation, pruning, perplexity, and lexicon enlargement."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import Document, FrequencyTable, Lexicon

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

UNIGRAM_FLOOR = 1e-7
_TINY = 1e-12

NGram = tuple[str, ...]


@dataclass(frozen=True)
class AdaptationWeight:
    """Mixing weight for background vs adaptation frequencies, in [0, 1]."""

    value: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"adaptation weight must be in [0, 1], got {self.value}")


class NGramCounts:
    """Integer n-gram counts of orders 1..order over sentence-padded documents.

    The vocabulary is the closed word set used for counting (lexicon plus the
    reserved begin/end/unknown symbols); lexicon words that never occur carry
    no entry but remain part of the vocabulary.
    """

    def __init__(self, order: int, vocabulary: Iterable[str]):
        if order < 1:
            raise ValueError("order must be >= 1")
        self.order = order
        self.vocabulary: frozenset[str] = frozenset(vocabulary) | {BOS, EOS, UNK}
        self.grams: list[dict[NGram, int]] = [dict() for _ in range(order)]
        self.unk_token = UNK

    def get(self, ngram: NGram) -> int:
        n = len(ngram)
        if not 1 <= n <= self.order:
            return 0
        return self.grams[n - 1].get(ngram, 0)

    def add_sentence(self, tokens: Sequence[str]) -> None:
        padded = [BOS] * (self.order - 1) + list(tokens) + [EOS]
        for n in range(1, self.order + 1):
            grams = self.grams[n - 1]
            for i in range(len(padded) - n + 1):
                key = tuple(padded[i : i + n])
                grams[key] = grams.get(key, 0) + 1

    def merge(self, other: "NGramCounts") -> "NGramCounts":
        """Combine shard counts; associative and commutative."""
        if self.order != other.order:
            raise ValueError("cannot merge counts of different orders")
        merged = NGramCounts(self.order, self.vocabulary | other.vocabulary)
        for n in range(self.order):
            grams = dict(self.grams[n])
            for key, c in other.grams[n].items():
                grams[key] = grams.get(key, 0) + c
            merged.grams[n] = grams
        return merged


def count_ngrams(
    corpus_stream: Iterable[Document], lexicon: Lexicon, order: int = 3
) -> NGramCounts:
    """Count all n-gram orders 1..order, one sentence per document.

    Each document is padded with order-1 begin symbols and one end symbol;
    tokens outside the lexicon are replaced by the unknown token first.
    """
    counts = NGramCounts(order, lexicon.words)
    for doc in corpus_stream:
        mapped = [tok if tok in lexicon else UNK for tok in doc.tokens]
        counts.add_sentence(mapped)
    return counts


class NGramModel:
    """Backoff model: per order, n-gram -> (log10 prob, optional log10 backoff).

    ``supporting_counts`` keeps the (possibly fractional) counts the model was
    estimated from, which count-threshold pruning needs; models imported from
    ARPA files do not have them.
    """

    def __init__(
        self,
        order: int,
        entries: list[dict[NGram, list]],
        vocabulary: Iterable[str],
        supporting_counts: list[dict[NGram, float]] | None = None,
    ):
        self.order = order
        self.entries = entries
        self.vocabulary: frozenset[str] = frozenset(vocabulary)
        self.supporting_counts = supporting_counts

    def lookup(self, ngram: NGram) -> tuple[float, float | None] | None:
        """Raw stored entry (log10 prob, log10 bow or None), or None if absent."""
        n = len(ngram)
        if not 1 <= n <= self.order:
            return None
        entry = self.entries[n - 1].get(ngram)
        if entry is None:
            return None
        return entry[0], entry[1]

    def ngram_count(self, n: int) -> int:
        return len(self.entries[n - 1])

    def map_token(self, token: str) -> str:
        return token if (token,) in self.entries[0] else UNK

    def log_prob(self, word: str, context: Sequence[str] = ()) -> float:
        """log10 P(word | context) with standard backoff through shorter contexts."""
        ctx: NGram = tuple(context)[-(self.order - 1) :] if self.order > 1 else ()
        acc = 0.0
        while True:
            entry = self.entries[len(ctx)].get(ctx + (word,))
            if entry is not None:
                return acc + entry[0]
            if not ctx:
                raise KeyError(f"word {word!r} has no unigram entry")
            hist = self.entries[len(ctx) - 1].get(ctx)
            if hist is not None and hist[1] is not None:
                acc += hist[1]
            ctx = ctx[1:]

    def conditional_sum(self, history: Sequence[str]) -> float:
        """Sum of P(w | history) over the full vocabulary; 1.0 for a valid model."""
        return sum(10.0 ** self.log_prob(w, history) for w in self.vocabulary)


def _history_masses(grams: Mapping[NGram, float]) -> dict[NGram, float]:
    masses: dict[NGram, float] = {}
    for ngram, count in grams.items():
        hist = ngram[:-1]
        masses[hist] = masses.get(hist, 0.0) + count
    return masses


def _backed_off_prob(entries: list[dict[NGram, list]], ngram: NGram) -> float:
    """P(w | h) in linear space against the already-built lower orders."""
    acc = 0.0
    while True:
        entry = entries[len(ngram) - 1].get(ngram)
        if entry is not None:
            return 10.0 ** (acc + entry[0])
        if len(ngram) == 1:
            raise KeyError(f"missing unigram for {ngram[0]!r}")
        hist = entries[len(ngram) - 2].get(ngram[:-1])
        if hist is not None and hist[1] is not None:
            acc += hist[1]
        ngram = ngram[1:]


def _estimate_entries(
    count_grams: Sequence[Mapping[NGram, float]],
    vocabulary: frozenset[str],
    order: int,
) -> list[dict[NGram, list]]:
    """Witten-Bell backoff estimation over (possibly fractional) counts.

    Every event keeps c(h,w) / (c(h) + T(h)) where T(h) is the number of
    distinct continuations of h; the reserved mass T(h) / (c(h) + T(h)) goes to
    the backoff distribution.  At the unigram level the reserved mass is spread
    uniformly over zero-count vocabulary words, then everything is floored and
    renormalized so every vocabulary word ends up with nonzero probability.
    """
    if not count_grams[0]:
        raise ValueError("cannot estimate a model from empty unigram counts")
    entries: list[dict[NGram, list]] = [dict() for _ in range(order)]

    unigrams = count_grams[0]
    total = sum(unigrams.values())
    t_root = len(unigrams)
    probs = {ngram[0]: count / (total + t_root) for ngram, count in unigrams.items()}
    unseen = [w for w in vocabulary if (w,) not in unigrams]
    if unseen:
        share = (t_root / (total + t_root)) / len(unseen)
        for w in unseen:
            probs[w] = share
    floored = {w: max(p, UNIGRAM_FLOOR) for w, p in probs.items()}
    norm = sum(floored.values())
    entries[0] = {(w,): [math.log10(p / norm), None] for w, p in floored.items()}

    for n in range(2, order + 1):
        by_history: dict[NGram, dict[str, float]] = {}
        for ngram, count in count_grams[n - 1].items():
            by_history.setdefault(ngram[:-1], {})[ngram[-1]] = count
        for hist, extensions in by_history.items():
            hist_mass = sum(extensions.values())
            t_hist = len(extensions)
            denom = hist_mass + t_hist
            seen = {w: c / denom for w, c in extensions.items()}
            lower_sum = sum(
                _backed_off_prob(entries, hist[1:] + (w,)) for w in extensions
            )
            residual = 1.0 - sum(seen.values())
            backoff_mass = 1.0 - lower_sum
            if backoff_mass <= _TINY:
                # the seen continuations cover the whole backoff distribution,
                # so close the conditional over them instead
                seen = {w: c / hist_mass for w, c in extensions.items()}
                log_bow = 0.0
            else:
                log_bow = math.log10(max(residual, _TINY) / backoff_mass)
            hist_entry = entries[n - 2].get(hist)
            if hist_entry is None:
                raise ValueError(f"inconsistent counts: history {hist!r} unseen at order {n - 1}")
            hist_entry[1] = log_bow
            for w, p in seen.items():
                entries[n - 1][hist + (w,)] = [math.log10(p), None]
    return entries


def estimate_model(counts: NGramCounts, vocabulary: Iterable[str] | None = None) -> NGramModel:
    """Witten-Bell backoff model from counts; ``vocabulary`` may widen the word set."""
    vocab = frozenset(vocabulary) | counts.vocabulary if vocabulary is not None else counts.vocabulary
    grams = [dict(g) for g in counts.grams]
    entries = _estimate_entries(grams, vocab, counts.order)
    supporting = [{k: float(v) for k, v in g.items()} for g in grams]
    return NGramModel(counts.order, entries, vocab, supporting)


def adapt_model(
    bg: NGramCounts, adapt: NGramCounts, w: AdaptationWeight | float
) -> NGramModel:
    """Mix background and adaptation relative frequencies, then re-estimate.

    For every n-gram in the union set, the mixed conditional frequency
    (1-lambda) * c_bg(h,w)/c_bg(h) + lambda * c_ad(h,w)/c_ad(h) is scaled by the
    mixed history mass (1-lambda) * c_bg(h) + lambda * c_ad(h) into a pseudo-count
    and smoothed exactly like estimate_model, over the union vocabulary.  With
    lambda 0 or 1 the pseudo-counts reduce to the corresponding pure counts.  An
    empty side contributes nothing, so the mixture collapses to the other side.
    """
    weight = w if isinstance(w, AdaptationWeight) else AdaptationWeight(float(w))
    lam = weight.value
    if bg.order != adapt.order:
        raise ValueError("background and adaptation counts must share the order")
    order = bg.order
    vocab = bg.vocabulary | adapt.vocabulary
    if not adapt.grams[0]:
        return estimate_model(bg, vocab)
    if not bg.grams[0]:
        return estimate_model(adapt, vocab)

    pseudo: list[dict[NGram, float]] = [dict() for _ in range(order)]
    for n in range(1, order + 1):
        bg_mass = _history_masses(bg.grams[n - 1])
        ad_mass = _history_masses(adapt.grams[n - 1])
        for ngram in set(bg.grams[n - 1]) | set(adapt.grams[n - 1]):
            hist = ngram[:-1]
            mb = bg_mass.get(hist, 0.0)
            ma = ad_mass.get(hist, 0.0)
            f_bg = bg.grams[n - 1].get(ngram, 0) / mb if mb else 0.0
            f_ad = adapt.grams[n - 1].get(ngram, 0) / ma if ma else 0.0
            f_mix = (1.0 - lam) * f_bg + lam * f_ad
            count = f_mix * ((1.0 - lam) * mb + lam * ma)
            if count > 0.0:
                pseudo[n - 1][ngram] = count
    entries = _estimate_entries(pseudo, vocab, order)
    return NGramModel(order, entries, vocab, pseudo)


def prune_model(
    model: NGramModel,
    min_order_counts: Sequence[int] | None = None,
    prob_threshold: float | None = None,
) -> NGramModel:
    """Drop low-evidence n-grams of order >= 2 and recompute backoff weights.

    An n-gram is removed when its supporting count falls below the per-order
    threshold or its probability below ``prob_threshold``; removing an n-gram
    also removes everything that extends it.  Unigrams are never pruned and
    their probabilities never change.
    """
    if min_order_counts is not None:
        if len(min_order_counts) != model.order:
            raise ValueError("need one count threshold per order")
        if any(t < 0 for t in min_order_counts):
            raise ValueError("count thresholds must be >= 0")
        if any(t > 0 for t in min_order_counts[1:]) and model.supporting_counts is None:
            raise ValueError(
                "count-threshold pruning needs supporting counts; "
                "this model (e.g. imported from ARPA) has none"
            )

    kept: list[dict[NGram, list]] = [
        {ng: [entry[0], None] for ng, entry in model.entries[0].items()}
    ]
    removed = 0
    for n in range(2, model.order + 1):
        level: dict[NGram, list] = {}
        threshold = min_order_counts[n - 1] if min_order_counts is not None else 0
        for ngram, entry in model.entries[n - 1].items():
            if n > 2 and ngram[:-1] not in kept[n - 2]:
                removed += 1
                continue
            if threshold > 0:
                support = model.supporting_counts[n - 1].get(ngram, 0.0)
                if support < threshold:
                    removed += 1
                    continue
            if prob_threshold is not None and 10.0 ** entry[0] < prob_threshold:
                removed += 1
                continue
            level[ngram] = [entry[0], None]
        kept.append(level)

    if removed == 0:
        # nothing pruned: keep the original backoff weights bit-for-bit
        entries = [
            {ng: [entry[0], entry[1]] for ng, entry in level.items()}
            for level in model.entries
        ]
        supporting = (
            [dict(level) for level in model.supporting_counts]
            if model.supporting_counts is not None
            else None
        )
        return NGramModel(model.order, entries, model.vocabulary, supporting)

    # recompute backoff weights bottom-up so each level's lookups see final
    # lower-order weights
    for n in range(2, model.order + 1):
        by_history: dict[NGram, list[str]] = {}
        for ngram in kept[n - 1]:
            by_history.setdefault(ngram[:-1], []).append(ngram[-1])
        for hist, words in by_history.items():
            seen_sum = sum(10.0 ** kept[n - 1][hist + (w,)][0] for w in words)
            lower_sum = sum(_backed_off_prob(kept, hist[1:] + (w,)) for w in words)
            backoff_mass = 1.0 - lower_sum
            if backoff_mass <= _TINY:
                log_bow = 0.0
            else:
                log_bow = math.log10(max(1.0 - seen_sum, _TINY) / backoff_mass)
            kept[n - 2][hist][1] = log_bow

    supporting = None
    if model.supporting_counts is not None:
        supporting = [
            {ng: c for ng, c in model.supporting_counts[n].items() if ng in kept[n]}
            for n in range(model.order)
        ]
    return NGramModel(model.order, kept, model.vocabulary, supporting)


@dataclass(frozen=True)
class PerplexityResult:
    perplexity: float
    log10_prob_total: float
    events: int
    oov_mapped_count: int


def perplexity(model: NGramModel, tokens_by_sentence: Iterable[Sequence[str]]) -> PerplexityResult:
    """Per-event perplexity; each sentence contributes len + 1 events (the end
    symbol is scored).  Out-of-vocabulary tokens are scored as the unknown token
    and tallied."""
    total = 0.0
    events = 0
    oov = 0
    ctx_len = model.order - 1
    for sentence in tokens_by_sentence:
        context: NGram = (BOS,) * ctx_len
        for token in sentence:
            word = token
            if (word,) not in model.entries[0]:
                word = UNK
                oov += 1
            total += model.log_prob(word, context)
            events += 1
            if ctx_len:
                context = (context + (word,))[-ctx_len:]
        total += model.log_prob(EOS, context)
        events += 1
    if events == 0:
        raise ValueError("no events to score: empty input")
    return PerplexityResult(10.0 ** (-total / events), total, events, oov)


def build_adapted_lexicon(
    base: Lexicon, adaptation_counts: FrequencyTable, f_min: int = 1
) -> Lexicon:
    """Base lexicon plus adaptation words with count >= f_min, appended in
    (count desc, word asc) order so base ranks are preserved."""
    if f_min < 1:
        raise ValueError("f_min must be >= 1")
    extras = sorted(
        (
            (word, count)
            for word, count in adaptation_counts.items()
            if count >= f_min and word not in base
        ),
        key=lambda item: (-item[1], item[0]),
    )
    return Lexicon(base.words + tuple(word for word, _ in extras))


def write_counts(counts: NGramCounts, path: str) -> None:
    """Dump counts as "count<TAB>token token ..." lines, low orders first."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for n in range(1, counts.order + 1):
            for ngram in sorted(counts.grams[n - 1]):
                handle.write(f"{counts.grams[n - 1][ngram]}\t{' '.join(ngram)}\n")


def read_counts(path: str) -> NGramCounts:
    """Reload a counts dump; the vocabulary is reconstructed from the unigrams,
    so lexicon words that never occurred are not recoverable."""
    parsed: list[tuple[int, NGram]] = []
    order = 0
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                count_field, gram_field = line.split("\t")
                count = int(count_field)
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: malformed counts line: {line!r}") from exc
            ngram = tuple(gram_field.split())
            if not ngram:
                raise ValueError(f"{path}:{line_no}: empty n-gram")
            order = max(order, len(ngram))
            parsed.append((count, ngram))
    if not parsed:
        raise ValueError(f"{path}: no counts found")
    vocab = {ngram[0] for _, ngram in parsed if len(ngram) == 1}
    counts = NGramCounts(order, vocab)
    for count, ngram in parsed:
        counts.grams[len(ngram) - 1][ngram] = (
            counts.grams[len(ngram) - 1].get(ngram, 0) + count
        )
    return counts
