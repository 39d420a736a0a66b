import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lmadapt.corpus import (
    Document,
    FrequencyTable,
    IngestReport,
    Lexicon,
    TokenizerConfig,
    build_frequency_table,
    build_lexicon,
    iter_documents,
    oov_curve,
    oov_rate,
    read_lexicon,
    tokenize,
    two_decimals,
    write_lexicon,
    write_oov_curve,
)

from conftest import make_documents


class TestTokenize:
    def test_empty_line(self):
        assert tokenize("") == []

    def test_punctuation_stripped(self):
        assert tokenize("Dental caries, explained.") == ["dental", "caries", "explained"]

    def test_apostrophe_split_mode(self):
        cfg = TokenizerConfig(split_apostrophes=True)
        assert tokenize("l'igiene", cfg) == ["l'", "igiene"]

    def test_apostrophe_kept_intra_word_by_default(self):
        assert tokenize("l'igiene") == ["l'igiene"]
        assert tokenize("let's") == ["let's"]

    def test_hyphen_kept_intra_word(self):
        assert tokenize("computer-assistita") == ["computer-assistita"]

    def test_digits_retained(self):
        assert tokenize("d3 and 42.") == ["d3", "and", "42"]

    def test_pure_punctuation_dropped(self):
        assert tokenize("... --- !!!") == []

    def test_quotes_and_brackets_stripped(self):
        assert tokenize('"hello" [world]') == ["hello", "world"]

    def test_no_lowercase_mode(self):
        assert tokenize("ENTs", TokenizerConfig(lowercase=False)) == ["ENTs"]

    @given(st.text(max_size=80))
    def test_deterministic_and_clean(self, line):
        first = tokenize(line)
        assert first == tokenize(line)
        for tok in first:
            assert tok
            assert not any(ch.isspace() for ch in tok)


class TestFrequencyTable:
    def test_empty_stream(self):
        table = build_frequency_table([])
        assert len(table) == 0
        assert table.total_running_words == 0

    def test_simple_counts(self):
        table = build_frequency_table(make_documents([["a", "b", "a"]]))
        assert table["a"] == 2 and table["b"] == 1
        assert table.total_running_words == 3

    def test_document_split_is_irrelevant(self):
        split = build_frequency_table(make_documents([["a"], ["a", "b"]]))
        joined = build_frequency_table(make_documents([["a", "a", "b"]]))
        assert split.counts == joined.counts

    @given(st.lists(st.lists(st.sampled_from("abcde"), max_size=5), max_size=10), st.randoms())
    def test_order_independence(self, token_lists, rng):
        table = build_frequency_table(make_documents(token_lists))
        shuffled = list(token_lists)
        rng.shuffle(shuffled)
        assert build_frequency_table(make_documents(shuffled)).counts == table.counts

    def test_merge_is_commutative(self):
        a = build_frequency_table(make_documents([["x", "y"]]))
        b = build_frequency_table(make_documents([["y", "z"]]))
        assert a.merge(b).counts == b.merge(a).counts
        assert a.merge(b).total_running_words == 4


class TestBuildLexicon:
    def test_tie_broken_lexicographically(self):
        table = FrequencyTable(Counter({"a": 5, "b": 3, "c": 3}))
        assert build_lexicon(table, 2).words == ("a", "b")

    def test_n_larger_than_vocabulary(self):
        table = build_frequency_table(make_documents([["x", "y"]]))
        assert set(build_lexicon(table, 10).words) == {"x", "y"}

    def test_singleton(self):
        table = build_frequency_table(make_documents([["x"]]))
        assert build_lexicon(table, 1).words == ("x",)

    def test_size_zero_rejected(self):
        table = build_frequency_table(make_documents([["x"]]))
        with pytest.raises(ValueError):
            build_lexicon(table, 0)

    @given(
        st.dictionaries(st.sampled_from("abcdefgh"), st.integers(1, 50), min_size=1),
        st.integers(1, 8),
        st.integers(0, 4),
    )
    def test_nesting(self, counts, k1, extra):
        table = FrequencyTable(Counter(counts))
        small = build_lexicon(table, k1)
        large = build_lexicon(table, k1 + extra)
        assert large.words[: len(small.words)] == small.words

    def test_duplicate_words_rejected(self):
        with pytest.raises(ValueError):
            Lexicon(("a", "a"))

    def test_rank_queries(self):
        lex = Lexicon(("most", "frequent", "words"))
        assert lex.rank("most") == 1
        assert lex.rank("words") == 3
        assert "absent" not in lex
        with pytest.raises(KeyError):
            lex.rank("absent")


class TestOOVRate:
    def test_benchmark_arithmetic(self):
        # 1089 unknown among 31001 running words
        lex = Lexicon(("known",))
        tokens = ["known"] * (31001 - 1089) + ["zzz"] * 1089
        rate = oov_rate(tokens, lex)
        assert rate.oov_count == 1089
        assert rate.running_words == 31001
        assert rate.percentage == 3.51

    def test_all_in_lexicon(self):
        lex = Lexicon(("a", "b"))
        assert oov_rate(["a", "b", "a"], lex).percentage == 0.0

    def test_empty_lexicon_all_oov(self):
        lex = Lexicon(())
        rate = oov_rate(["x"] * 10, lex)
        assert rate.percentage == 100.0

    def test_zero_running_words(self):
        assert oov_rate([], Lexicon(("a",))).percentage == 0.0


class TestRounding:
    def test_half_up(self):
        assert two_decimals(0.005) == 0.01
        assert two_decimals(0.004999) == 0.0
        assert two_decimals(3.512789) == 3.51
        assert two_decimals(50.0) == 50.0


class TestOOVCurve:
    def test_two_point_curve(self):
        table = build_frequency_table(make_documents([["a"] * 5 + ["b"]]))
        tokens = ["a", "z"]
        assert oov_curve(tokens, table, [1, 2]) == [(1, 50.0), (2, 50.0)]

    def test_full_vocabulary_size(self):
        table = build_frequency_table(make_documents([["a", "b", "c"]]))
        assert oov_curve(["a", "b", "c"], table, [3]) == [(3, 0.0)]

    def test_non_increasing(self):
        rng = random.Random(11)
        tokens = [f"w{rng.randint(0, 30)}" for _ in range(200)]
        table = build_frequency_table(make_documents([tokens]))
        extra = [f"w{rng.randint(0, 60)}" for _ in range(100)]
        curve = oov_curve(tokens + extra, table, [1, 2, 5, 10, 20, 31])
        rates = [pct for _, pct in curve]
        assert all(a >= b for a, b in zip(rates, rates[1:]))

    def test_zero_size_rejected(self):
        table = build_frequency_table(make_documents([["a"]]))
        with pytest.raises(ValueError):
            oov_curve(["a"], table, [0, 1])

    def test_non_increasing_sizes_rejected(self):
        table = build_frequency_table(make_documents([["a"]]))
        with pytest.raises(ValueError):
            oov_curve(["a"], table, [2, 1])
        with pytest.raises(ValueError):
            oov_curve(["a"], table, [])


class TestCorpusIO:
    def test_documents_are_numbered_lines(self, tmp_path):
        path = tmp_path / "corpus.txt"
        path.write_text("First line.\n\nthird LINE\n", encoding="utf-8")
        docs = list(iter_documents(str(path)))
        assert [d.id for d in docs] == [1, 2, 3]
        assert docs[0].tokens == ("first", "line")
        assert docs[1].tokens == ()
        assert docs[2].tokens == ("third", "line")

    def test_invalid_utf8_line_skipped_and_counted(self, tmp_path):
        path = tmp_path / "dirty.txt"
        path.write_bytes(b"good line\n\xff\xfe broken\nanother good\n")
        report = IngestReport()
        docs = list(iter_documents(str(path), report=report))
        assert [d.tokens for d in docs] == [("good", "line"), ("another", "good")]
        assert report.lines_read == 3
        assert report.lines_skipped == 1

    def test_lexicon_file_roundtrip_and_determinism(self, tmp_path):
        table = build_frequency_table(make_documents([["b", "a", "b", "c", "c"]]))
        lex = build_lexicon(table, 3)
        p1, p2 = tmp_path / "lex1.txt", tmp_path / "lex2.txt"
        write_lexicon(lex, str(p1), table)
        write_lexicon(lex, str(p2), table)
        assert p1.read_bytes() == p2.read_bytes()
        assert read_lexicon(str(p1)).words == lex.words
        assert p1.read_text(encoding="utf-8").splitlines()[0] == "b\t2"

    def test_oov_curve_csv(self, tmp_path):
        path = tmp_path / "curve.csv"
        write_oov_curve([(1, 50.0), (2, 0.0)], str(path))
        assert path.read_text(encoding="utf-8") == "size,oov_percent\n1,50.00\n2,0.00\n"
