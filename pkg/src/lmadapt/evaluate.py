"""Benchmark scoring: bracket-annotated transcripts, keyword normalization,
edit-distance alignment, WER, and precision/recall over annotated key terms."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import DEFAULT_TOKENIZER, Lexicon, OOVRate, TokenizerConfig, oov_rate, tokenize, two_decimals

MAX_EXPECTED_SPAN = 6

Span = tuple[int, int]  # (start index, length)
Pattern = tuple[str, ...]


class TranscriptFormatError(ValueError):
    """Raised for unbalanced or nested brackets; messages carry the line number."""


@dataclass
class Utterance:
    tokens: tuple[str, ...]
    spans: tuple[Span, ...]

    def span_tokens(self) -> list[Pattern]:
        return [self.tokens[s : s + length] for s, length in self.spans]


@dataclass
class AnnotatedTranscript:
    utterances: list[Utterance] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def parse_transcript(
    text: str, config: TokenizerConfig = DEFAULT_TOKENIZER
) -> AnnotatedTranscript:
    """Parse one utterance per line with key phrases delimited by round brackets.

    Tokens are normalized with the corpus tokenizer.  Nested or unbalanced
    brackets abort; spans longer than the expected maximum are kept but noted
    as warnings, as are empty bracket pairs.
    """
    transcript = AnnotatedTranscript()
    for line_no, line in enumerate(text.split("\n"), 1):
        tokens: list[str] = []
        spans: list[Span] = []
        buffer: list[str] = []
        inside = False
        for ch in line:
            if ch == "(":
                if inside:
                    raise TranscriptFormatError(f"line {line_no}: nested '(' bracket")
                tokens.extend(tokenize("".join(buffer), config))
                buffer = []
                inside = True
            elif ch == ")":
                if not inside:
                    raise TranscriptFormatError(f"line {line_no}: ')' without matching '('")
                inner = tokenize("".join(buffer), config)
                if inner:
                    spans.append((len(tokens), len(inner)))
                    tokens.extend(inner)
                    if len(inner) > MAX_EXPECTED_SPAN:
                        transcript.warnings.append(
                            f"line {line_no}: bracketed span of {len(inner)} tokens "
                            f"exceeds the expected maximum of {MAX_EXPECTED_SPAN}"
                        )
                else:
                    transcript.warnings.append(f"line {line_no}: empty bracket pair dropped")
                buffer = []
                inside = False
            else:
                buffer.append(ch)
        if inside:
            raise TranscriptFormatError(f"line {line_no}: '(' without matching ')'")
        tokens.extend(tokenize("".join(buffer), config))
        transcript.utterances.append(Utterance(tuple(tokens), tuple(spans)))
    # a trailing newline produces a phantom empty final utterance; drop it
    if transcript.utterances and not transcript.utterances[-1].tokens:
        if text.endswith("\n") and not transcript.utterances[-1].spans:
            transcript.utterances.pop()
    return transcript


def collect_iw_patterns(transcript: AnnotatedTranscript) -> set[Pattern]:
    patterns: set[Pattern] = set()
    for utt in transcript.utterances:
        patterns.update(utt.span_tokens())
    return patterns


def _segmentable(pattern: Pattern, others: set[Pattern]) -> bool:
    # can `pattern` be written as a concatenation of members of `others`?
    reachable = [False] * (len(pattern) + 1)
    reachable[0] = True
    for i in range(len(pattern)):
        if not reachable[i]:
            continue
        for piece in others:
            end = i + len(piece)
            if end <= len(pattern) and pattern[i:end] == piece:
                reachable[end] = True
    return reachable[len(pattern)]


def minimal_iw_set(iws: Iterable[Pattern]) -> set[Pattern]:
    """Remove every pattern expressible as a concatenation of other patterns.

    Candidates are scanned longest-first against the current (shrinking) set,
    repeating until nothing more can be removed, so the result is unambiguous
    for this processing order.
    """
    current = set()
    for pattern in iws:
        pattern = tuple(pattern)
        if not pattern:
            raise ValueError("empty pattern in key-phrase set")
        current.add(pattern)
    changed = True
    while changed:
        changed = False
        for pattern in sorted(current, key=lambda p: (-len(p), p)):
            if len(pattern) == 1 or pattern not in current:
                continue
            if _segmentable(pattern, current - {pattern}):
                current.remove(pattern)
                changed = True
    return current


def regenerate(transcript: AnnotatedTranscript, minimal: set[Pattern]) -> AnnotatedTranscript:
    """Discard original spans and re-bracket every occurrence of a minimal pattern.

    Longest patterns are placed first; within one length the scan is left to
    right and only over still-unmarked tokens, so spans never overlap.
    """
    by_length: dict[int, set[Pattern]] = {}
    for pattern in minimal:
        by_length.setdefault(len(pattern), set()).add(pattern)
    result = AnnotatedTranscript(warnings=list(transcript.warnings))
    for utt in transcript.utterances:
        tokens = utt.tokens
        marked = [False] * len(tokens)
        spans: list[Span] = []
        for length in sorted(by_length, reverse=True):
            patterns = by_length[length]
            i = 0
            while i + length <= len(tokens):
                if (
                    not any(marked[i : i + length])
                    and tokens[i : i + length] in patterns
                ):
                    spans.append((i, length))
                    for j in range(i, i + length):
                        marked[j] = True
                    i += length
                else:
                    i += 1
        result.utterances.append(Utterance(tokens, tuple(sorted(spans))))
    return result


def strip_non_iw(transcript: AnnotatedTranscript) -> list[list[str]]:
    """Per utterance, the bracketed items only, each joined with underscores."""
    return [
        ["_".join(utt.tokens[s : s + length]) for s, length in utt.spans]
        for utt in transcript.utterances
    ]


def isolate(iw_items: Sequence[str]) -> list[str]:
    """Split multi-word items back into their component words, order preserved."""
    words: list[str] = []
    for item in iw_items:
        words.extend(item.split("_"))
    return words


@dataclass(frozen=True)
class AlignmentResult:
    substitutions: int
    insertions: int
    deletions: int
    hits: int
    reference_length: int
    trace: tuple[tuple[str, str | None, str | None], ...]

    @property
    def errors(self) -> int:
        return self.substitutions + self.insertions + self.deletions


def align(ref: Sequence[str], hyp: Sequence[str]) -> AlignmentResult:
    """Minimum-edit-distance word alignment with unit costs.

    Cost ties are broken during the backtrace preferring hit, then
    substitution, deletion, insertion, which keeps the op counts deterministic.
    """
    n, m = len(ref), len(hyp)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dp[i][0] = i
    for j in range(1, m + 1):
        dp[0][j] = j
    for i in range(1, n + 1):
        row, prev = dp[i], dp[i - 1]
        for j in range(1, m + 1):
            sub = prev[j - 1] + (ref[i - 1] != hyp[j - 1])
            row[j] = min(sub, prev[j] + 1, row[j - 1] + 1)

    trace: list[tuple[str, str | None, str | None]] = []
    i, j = n, m
    hits = subs = dels = inss = 0
    while i > 0 or j > 0:
        if i and j and ref[i - 1] == hyp[j - 1] and dp[i][j] == dp[i - 1][j - 1]:
            trace.append(("hit", ref[i - 1], hyp[j - 1]))
            hits += 1
            i, j = i - 1, j - 1
        elif i and j and dp[i][j] == dp[i - 1][j - 1] + 1:
            trace.append(("sub", ref[i - 1], hyp[j - 1]))
            subs += 1
            i, j = i - 1, j - 1
        elif i and dp[i][j] == dp[i - 1][j] + 1:
            trace.append(("del", ref[i - 1], None))
            dels += 1
            i -= 1
        else:
            trace.append(("ins", None, hyp[j - 1]))
            inss += 1
            j -= 1
    trace.reverse()
    return AlignmentResult(subs, inss, dels, hits, n, tuple(trace))


def combine_alignments(results: Iterable[AlignmentResult]) -> AlignmentResult:
    subs = inss = dels = hits = ref_len = 0
    traces: list[tuple[str, str | None, str | None]] = []
    for res in results:
        subs += res.substitutions
        inss += res.insertions
        dels += res.deletions
        hits += res.hits
        ref_len += res.reference_length
        traces.extend(res.trace)
    return AlignmentResult(subs, inss, dels, hits, ref_len, tuple(traces))


def wer(a: AlignmentResult) -> float:
    """100 * (S + I + D) / reference length, rounded to two decimals."""
    if a.reference_length == 0:
        raise ValueError("WER is undefined for an empty reference")
    return two_decimals(100.0 * a.errors / a.reference_length)


@dataclass(frozen=True)
class PRFReport:
    matched: int
    hypothesis_count: int
    reference_count: int
    precision: float
    recall: float
    f_measure: float

    def to_json_dict(self) -> dict:
        return {
            "p": two_decimals(self.precision),
            "r": two_decimals(self.recall),
            "f": two_decimals(self.f_measure),
            "matched": self.matched,
            "ref": self.reference_count,
            "hyp": self.hypothesis_count,
        }


def _prf(matched: int, hyp_count: int, ref_count: int) -> PRFReport:
    # empty sides score vacuously perfect, the usual retrieval convention
    precision = matched / hyp_count if hyp_count else 1.0
    recall = matched / ref_count if ref_count else 1.0
    f_measure = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return PRFReport(matched, hyp_count, ref_count, precision, recall, f_measure)


def iw_prf(
    ref_items: Sequence[Sequence[str]],
    hyp_items: Sequence[Sequence[str]],
    scope: str = "utterance",
) -> PRFReport:
    """Precision/recall/F over annotated items, matched as multisets.

    With utterance scope (the default) items only match within the same
    utterance pair; corpus scope pools all items before intersecting.
    """
    if len(ref_items) != len(hyp_items):
        raise ValueError(
            f"utterance count mismatch: {len(ref_items)} reference vs {len(hyp_items)} hypothesis"
        )
    if scope not in ("utterance", "corpus"):
        raise ValueError(f"unknown scope {scope!r}")
    ref_total = sum(len(items) for items in ref_items)
    hyp_total = sum(len(items) for items in hyp_items)
    if scope == "corpus":
        ref_pool: Counter = Counter()
        hyp_pool: Counter = Counter()
        for items in ref_items:
            ref_pool.update(items)
        for items in hyp_items:
            hyp_pool.update(items)
        matched = sum((ref_pool & hyp_pool).values())
    else:
        matched = sum(
            sum((Counter(r) & Counter(h)).values())
            for r, h in zip(ref_items, hyp_items)
        )
    return _prf(matched, hyp_total, ref_total)


@dataclass
class BenchmarkReport:
    wer_percent: float
    alignment: AlignmentResult
    iw: PRFReport
    isol_iw: PRFReport
    oov: OOVRate | None = None

    def to_json_dict(self) -> dict:
        payload = {
            "wer": self.wer_percent,
            "alignment": {
                "substitutions": self.alignment.substitutions,
                "insertions": self.alignment.insertions,
                "deletions": self.alignment.deletions,
                "hits": self.alignment.hits,
                "reference_length": self.alignment.reference_length,
            },
            "iw": self.iw.to_json_dict(),
            "isol_iw": self.isol_iw.to_json_dict(),
            "oov": None,
        }
        if self.oov is not None:
            payload["oov"] = {
                "oov_count": self.oov.oov_count,
                "running_words": self.oov.running_words,
                "percentage": self.oov.percentage,
            }
        return payload

    def to_table(self) -> str:
        a = self.alignment
        lines = [
            f"WER      {self.wer_percent:6.2f}%   "
            f"(Sub={a.substitutions} Ins={a.insertions} Del={a.deletions} REF={a.reference_length})",
            f"IW       P {self.iw.precision:.2f} [ {self.iw.matched} / {self.iw.hypothesis_count} ]   "
            f"R {self.iw.recall:.2f} [ {self.iw.matched} / {self.iw.reference_count} ]   "
            f"F {self.iw.f_measure:.2f}",
            f"Isol-IW  P {self.isol_iw.precision:.2f} [ {self.isol_iw.matched} / {self.isol_iw.hypothesis_count} ]   "
            f"R {self.isol_iw.recall:.2f} [ {self.isol_iw.matched} / {self.isol_iw.reference_count} ]   "
            f"F {self.isol_iw.f_measure:.2f}",
        ]
        if self.oov is not None:
            lines.append(
                f"OOV      {self.oov.percentage:6.2f}%   "
                f"({self.oov.oov_count} / {self.oov.running_words})"
            )
        return "\n".join(lines)


def score_benchmark(
    ref_path: str,
    hyp_path: str,
    lexicon: Lexicon | None = None,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
    scope: str = "utterance",
) -> BenchmarkReport:
    """Full benchmark scoring of a reference/hypothesis transcript pair.

    The minimal key-phrase set is derived from the reference annotations and
    applied to both sides before stripping, matching, and alignment.  When a
    lexicon is given, the reference tokens' OOV rate against it is included.
    """
    with open(ref_path, encoding="utf-8") as handle:
        ref = parse_transcript(handle.read(), config)
    with open(hyp_path, encoding="utf-8") as handle:
        hyp = parse_transcript(handle.read(), config)
    if len(ref.utterances) != len(hyp.utterances):
        raise ValueError(
            f"utterance count mismatch: {len(ref.utterances)} reference lines "
            f"vs {len(hyp.utterances)} hypothesis lines"
        )
    minimal = minimal_iw_set(collect_iw_patterns(ref))
    ref_regen = regenerate(ref, minimal)
    hyp_regen = regenerate(hyp, minimal)

    utterance_alignments = [
        align(r.tokens, h.tokens)
        for r, h in zip(ref_regen.utterances, hyp_regen.utterances)
    ]
    total = combine_alignments(utterance_alignments)

    ref_items = strip_non_iw(ref_regen)
    hyp_items = strip_non_iw(hyp_regen)
    iw_report = iw_prf(ref_items, hyp_items, scope)
    isol_report = iw_prf(
        [isolate(items) for items in ref_items],
        [isolate(items) for items in hyp_items],
        scope,
    )

    oov = None
    if lexicon is not None:
        all_tokens = [tok for utt in ref_regen.utterances for tok in utt.tokens]
        oov = oov_rate(all_tokens, lexicon)
    return BenchmarkReport(wer(total), total, iw_report, isol_report, oov)
