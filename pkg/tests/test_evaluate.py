import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lmadapt.corpus import Lexicon
from lmadapt.evaluate import (
    AnnotatedTranscript,
    TranscriptFormatError,
    Utterance,
    align,
    collect_iw_patterns,
    combine_alignments,
    isolate,
    iw_prf,
    minimal_iw_set,
    parse_transcript,
    regenerate,
    score_benchmark,
    strip_non_iw,
    wer,
)

REF_LINE = (
    "the most of them referred from (pulmonary specialist) (ENTs) "
    "(paediatricians) let's let Boyd try nothing else"
)
HYP_LINE = (
    "in the most of my referred from (pulmonary specialist) ian "
    "(paediatricians) was led by tried nothing"
)


def levenshtein_oracle(ref, hyp):
    """Independent plain edit-distance DP (cost only, no backtrace)."""
    prev = list(range(len(hyp) + 1))
    for i in range(1, len(ref) + 1):
        cur = [i]
        for j in range(1, len(hyp) + 1):
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            cur.append(min(prev[j] + 1, cur[-1] + 1, prev[j - 1] + cost))
        prev = cur
    return prev[-1]


class TestParseTranscript:
    def test_simple_span(self):
        t = parse_transcript("the (dental caries) case")
        assert t.utterances[0].tokens == ("the", "dental", "caries", "case")
        assert t.utterances[0].spans == ((1, 2),)

    def test_unbalanced_open(self):
        with pytest.raises(TranscriptFormatError, match="line 1"):
            parse_transcript("(a")

    def test_unbalanced_close(self):
        with pytest.raises(TranscriptFormatError, match="line 1"):
            parse_transcript("a)")

    def test_nested_brackets(self):
        with pytest.raises(TranscriptFormatError, match="nested"):
            parse_transcript("((a))")

    def test_error_carries_line_number(self):
        with pytest.raises(TranscriptFormatError, match="line 3"):
            parse_transcript("fine\nfine too\n(broken\n")

    def test_benchmark_sample_reference_line(self):
        t = parse_transcript(REF_LINE)
        utt = t.utterances[0]
        assert len(utt.tokens) == 16
        assert utt.span_tokens() == [("pulmonary", "specialist"), ("ents",), ("paediatricians",)]

    def test_long_span_accepted_with_warning(self):
        t = parse_transcript("(one two three four five six seven)")
        assert t.utterances[0].spans == ((0, 7),)
        assert any("exceeds" in w for w in t.warnings)

    def test_empty_brackets_dropped_with_warning(self):
        t = parse_transcript("a () b")
        assert t.utterances[0].spans == ()
        assert any("empty bracket" in w for w in t.warnings)

    def test_one_utterance_per_line(self):
        t = parse_transcript("one line\nanother (IW) line\n")
        assert len(t.utterances) == 2
        assert t.utterances[1].spans == ((1, 1),)


class TestMinimalIWSet:
    def test_pair_plus_composite(self):
        assert minimal_iw_set({("A",), ("B",), ("A", "B")}) == {("A",), ("B",)}

    def test_word_plus_pair_plus_triple(self):
        assert minimal_iw_set({("C",), ("D", "E"), ("C", "D", "E")}) == {("C",), ("D", "E")}

    def test_interleaved_triple_kept(self):
        iws = {("C",), ("D", "E"), ("D", "C", "E")}
        assert minimal_iw_set(iws) == iws

    def test_idempotent(self):
        iws = {("A",), ("B",), ("A", "B"), ("B", "A", "B", "A")}
        once = minimal_iw_set(iws)
        assert minimal_iw_set(once) == once

    def test_no_member_segmentable(self):
        rng = random.Random(2)
        words = ["u", "v", "w", "x"]
        patterns = {
            tuple(rng.choice(words) for _ in range(rng.randint(1, 3))) for _ in range(12)
        }
        minimal = minimal_iw_set(patterns)
        from lmadapt.evaluate import _segmentable

        for pattern in minimal:
            assert not _segmentable(pattern, minimal - {pattern})

    def test_empty_pattern_rejected(self):
        with pytest.raises(ValueError):
            minimal_iw_set({()})

    def test_chained_removals_reach_fixpoint(self):
        # (A B) goes first, then (A B C) becomes segmentable via (A),(B),(C)
        iws = {("A",), ("B",), ("C",), ("A", "B"), ("A", "B", "C")}
        assert minimal_iw_set(iws) == {("A",), ("B",), ("C",)}


class TestRegenerate:
    def _utterance(self, *tokens):
        return AnnotatedTranscript([Utterance(tuple(tokens), ())])

    def test_parts_rebracketed(self):
        t = self._utterance("a", "b")
        out = regenerate(t, {("a",), ("b",)})
        assert out.utterances[0].spans == ((0, 1), (1, 1))

    def test_empty_minimal_set(self):
        t = self._utterance("a", "b")
        assert regenerate(t, set()).utterances[0].spans == ()

    def test_longest_first_greedy(self):
        t = self._utterance("c", "d", "e")
        out = regenerate(t, {("c",), ("d", "e")})
        assert out.utterances[0].spans == ((0, 1), (1, 2))

    def test_original_spans_discarded(self):
        t = AnnotatedTranscript([Utterance(("x", "y"), ((0, 2),))])
        assert regenerate(t, {("y",)}).utterances[0].spans == ((1, 1),)

    def test_spans_never_overlap_and_match_patterns(self):
        rng = random.Random(8)
        words = ["p", "q", "r"]
        minimal = minimal_iw_set(
            {tuple(rng.choice(words) for _ in range(rng.randint(1, 2))) for _ in range(5)}
        )
        for _ in range(20):
            tokens = tuple(rng.choice(words) for _ in range(rng.randint(0, 12)))
            out = regenerate(AnnotatedTranscript([Utterance(tokens, ())]), minimal)
            occupied = set()
            for start, length in out.utterances[0].spans:
                cells = set(range(start, start + length))
                assert not cells & occupied
                occupied |= cells
                assert tokens[start : start + length] in minimal

    def test_regeneration_closure(self):
        minimal = {("a", "b"), ("c",)}
        t = self._utterance("a", "b", "c", "a", "b")
        once = regenerate(t, minimal)
        twice = regenerate(once, minimal)
        assert once.utterances[0].spans == twice.utterances[0].spans


class TestStripAndIsolate:
    def test_no_spans(self):
        t = AnnotatedTranscript([Utterance(("a", "b"), ())])
        assert strip_non_iw(t) == [[]]

    def test_benchmark_sample_items(self):
        t = parse_transcript(REF_LINE)
        minimal = minimal_iw_set(collect_iw_patterns(t))
        items = strip_non_iw(regenerate(t, minimal))
        assert items == [["pulmonary_specialist", "ents", "paediatricians"]]

    def test_single_word_span(self):
        t = AnnotatedTranscript([Utterance(("a",), ((0, 1),))])
        assert strip_non_iw(t) == [["a"]]

    def test_isolate_splits_items(self):
        assert isolate(["pulmonary_specialist", "paediatricians"]) == [
            "pulmonary",
            "specialist",
            "paediatricians",
        ]

    def test_isolate_empty(self):
        assert isolate([]) == []
        assert isolate(["a"]) == ["a"]


class TestAlign:
    def test_identical_sequences(self):
        a = align(["x", "y"], ["x", "y"])
        assert (a.substitutions, a.insertions, a.deletions, a.hits) == (0, 0, 0, 2)

    def test_single_deletion(self):
        a = align(["a", "b", "c"], ["a", "c"])
        assert (a.deletions, a.substitutions, a.insertions) == (1, 0, 0)

    def test_benchmark_sample_pair(self):
        ref = parse_transcript(REF_LINE).utterances[0].tokens
        hyp = parse_transcript(HYP_LINE).utterances[0].tokens
        a = align(ref, hyp)
        assert a.substitutions == 6
        assert a.insertions == 1
        assert a.deletions == 1
        assert a.reference_length == 16

    def test_trace_replays_both_sequences(self):
        ref, hyp = ["a", "b", "c"], ["b", "c", "d"]
        a = align(ref, hyp)
        assert [r for _, r, _ in a.trace if r is not None] == ref
        assert [h for _, _, h in a.trace if h is not None] == hyp
        assert a.hits + a.substitutions + a.deletions == a.reference_length

    @settings(max_examples=200)
    @given(
        st.lists(st.sampled_from("abc"), max_size=12),
        st.lists(st.sampled_from("abc"), max_size=12),
    )
    def test_cost_matches_levenshtein_oracle(self, ref, hyp):
        a = align(ref, hyp)
        assert a.errors == levenshtein_oracle(ref, hyp)
        assert a.hits + a.substitutions + a.deletions == len(ref)
        assert a.hits + a.substitutions + a.insertions == len(hyp)


class TestWER:
    def test_benchmark_sample_value(self):
        ref = parse_transcript(REF_LINE).utterances[0].tokens
        hyp = parse_transcript(HYP_LINE).utterances[0].tokens
        assert wer(align(ref, hyp)) == 50.0

    def test_perfect_alignment(self):
        assert wer(align(["a"], ["a"])) == 0.0

    def test_empty_hypothesis_is_all_deletions(self):
        assert wer(align(["a", "b", "c", "d"], [])) == 100.0

    def test_empty_reference_rejected(self):
        with pytest.raises(ValueError):
            wer(align([], ["a"]))


class TestIWPRF:
    REF_ITEMS = [["pulmonary_specialist", "ents", "paediatricians"]]
    HYP_ITEMS = [["pulmonary_specialist", "paediatricians"]]

    def test_benchmark_sample_iw_row(self):
        report = iw_prf(self.REF_ITEMS, self.HYP_ITEMS)
        assert report.matched == 2
        assert report.precision == pytest.approx(1.0)
        assert round(report.recall, 2) == 0.67
        assert round(report.f_measure, 2) == 0.80

    def test_benchmark_sample_isolated_row(self):
        report = iw_prf(
            [isolate(items) for items in self.REF_ITEMS],
            [isolate(items) for items in self.HYP_ITEMS],
        )
        assert report.matched == 3
        assert report.reference_count == 4
        assert round(report.recall, 2) == 0.75
        assert round(report.f_measure, 2) == 0.86

    def test_empty_hypothesis_vacuous_precision(self):
        report = iw_prf([["a", "b"]], [[]])
        assert report.precision == 1.0
        assert report.recall == 0.0
        assert report.f_measure == 0.0

    def test_multiset_matching(self):
        report = iw_prf([["a", "a", "b"]], [["a", "a", "a"]])
        assert report.matched == 2

    def test_utterance_scope_blocks_cross_line_matches(self):
        ref = [["a"], ["b"]]
        hyp = [["b"], ["a"]]
        assert iw_prf(ref, hyp, scope="utterance").matched == 0
        assert iw_prf(ref, hyp, scope="corpus").matched == 2

    def test_mismatched_utterance_counts_rejected(self):
        with pytest.raises(ValueError):
            iw_prf([["a"]], [["a"], ["b"]])

    def test_bounds(self):
        rng = random.Random(4)
        for _ in range(30):
            ref = [[rng.choice("ab") for _ in range(rng.randint(0, 4))] for _ in range(3)]
            hyp = [[rng.choice("ab") for _ in range(rng.randint(0, 4))] for _ in range(3)]
            r = iw_prf(ref, hyp)
            assert 0.0 <= r.precision <= 1.0
            assert 0.0 <= r.recall <= 1.0
            assert r.f_measure <= max(r.precision, r.recall) + 1e-12
            assert r.matched <= min(r.reference_count, r.hypothesis_count)


class TestScoreBenchmark:
    def test_identical_files(self, write_text):
        content = "a (b c) d\n(e) f\n"
        ref = write_text("ref.txt", content)
        hyp = write_text("hyp.txt", content)
        report = score_benchmark(ref, hyp)
        assert report.wer_percent == 0.0
        assert report.iw.precision == 1.0
        assert report.iw.recall == 1.0
        assert report.isol_iw.f_measure == 1.0

    def test_benchmark_sample_full_row(self, write_text):
        ref = write_text("ref.txt", REF_LINE + "\n")
        hyp = write_text("hyp.txt", HYP_LINE + "\n")
        report = score_benchmark(ref, hyp)
        assert report.wer_percent == 50.0
        assert (report.alignment.substitutions, report.alignment.insertions,
                report.alignment.deletions, report.alignment.reference_length) == (6, 1, 1, 16)
        assert round(report.iw.precision, 2) == 1.00
        assert round(report.iw.recall, 2) == 0.67
        assert round(report.iw.f_measure, 2) == 0.80
        assert round(report.isol_iw.precision, 2) == 1.00
        assert round(report.isol_iw.recall, 2) == 0.75
        assert round(report.isol_iw.f_measure, 2) == 0.86

    def test_annotation_free_files(self, write_text):
        ref = write_text("ref.txt", "plain words here\nmore words\n")
        hyp = write_text("hyp.txt", "plain words there\nmore words\n")
        report = score_benchmark(ref, hyp)
        assert report.iw.matched == 0
        assert report.iw.precision == 1.0  # vacuous
        assert report.wer_percent > 0.0

    def test_line_count_mismatch_rejected(self, write_text):
        ref = write_text("ref.txt", "one\ntwo\n")
        hyp = write_text("hyp.txt", "one\n")
        with pytest.raises(ValueError, match="mismatch"):
            score_benchmark(ref, hyp)

    def test_oov_section_with_lexicon(self, write_text):
        ref = write_text("ref.txt", "alpha (beta)\n")
        hyp = write_text("hyp.txt", "alpha (beta)\n")
        report = score_benchmark(ref, hyp, lexicon=Lexicon(("alpha",)))
        assert report.oov.oov_count == 1
        assert report.oov.percentage == 50.0
        payload = report.to_json_dict()
        assert payload["oov"]["running_words"] == 2
        assert payload["iw"]["p"] == 1.0

    def test_hypothesis_brackets_are_irrelevant(self, write_text):
        # annotations on the hypothesis side are discarded by regeneration
        ref = write_text("ref.txt", "the (dental caries) case\n")
        hyp1 = write_text("hyp1.txt", "the (dental caries) case\n")
        hyp2 = write_text("hyp2.txt", "the dental caries case\n")
        r1 = score_benchmark(ref, hyp1)
        r2 = score_benchmark(ref, hyp2)
        assert r1.to_json_dict() == r2.to_json_dict()


def test_combine_alignments_empty():
    combined = combine_alignments([])
    assert combined.reference_length == 0
    assert combined.trace == ()
