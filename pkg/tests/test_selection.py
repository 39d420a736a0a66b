import random

import pytest

from lmadapt.corpus import Document, Lexicon
from lmadapt.seeds import seed_set_from_words
from lmadapt.selection import (
    extract_context_snippets,
    filter_corpus_files,
    select_documents,
)

from conftest import make_documents

LEX = Lexicon(("la", "carie", "dentale", "a", "b", "c", "d", "e", "f"))


def brute_force_select(token_lists, seed_words, lexicon):
    """Oracle: re-derive the selection by direct definition."""
    triggers = {w for w in seed_words if w not in lexicon}
    return [
        i for i, toks in enumerate(token_lists) if any(t in triggers for t in toks)
    ]


class TestSelectDocuments:
    def test_empty_seed_set_selects_nothing(self):
        docs = make_documents([["la", "carie"]])
        selected, report = select_documents(iter(docs), seed_set_from_words([]), LEX)
        assert list(selected) == []
        assert report.warning is not None

    def test_in_lexicon_seed_never_triggers(self):
        docs = make_documents([["la", "carie", "dentale"]])
        seeds = seed_set_from_words(["carie"])
        selected, report = select_documents(iter(docs), seeds, LEX)
        assert list(selected) == []
        assert report.warning is not None  # every seed is inside the lexicon

    def test_document_without_seed_not_selected(self):
        docs = make_documents([["la", "carie", "dentale"]])
        seeds = seed_set_from_words(["bruxismo"])
        selected, report = select_documents(iter(docs), seeds, LEX)
        assert list(selected) == []
        assert report.documents_scanned == 1
        assert report.documents_selected == 0

    def test_three_document_corpus_matches_oracle(self):
        token_lists = [
            ["la", "carie", "dentale"],
            ["la", "bruxismo", "carie"],
            ["dentale", "a", "b"],
        ]
        docs = make_documents(token_lists)
        seeds = seed_set_from_words(["bruxismo", "carie"])
        selected, report = select_documents(iter(docs), seeds, LEX)
        got = [d.id - 1 for d in selected]
        assert got == brute_force_select(token_lists, seeds.words, LEX)
        assert report.documents_scanned == 3
        assert report.documents_selected == 1
        assert report.seed_hits == {"bruxismo": 1}

    def test_order_preserved_and_documents_untouched(self):
        token_lists = [["x", "zz"], ["zz"], ["x"], ["zz", "zz"]]
        docs = make_documents(token_lists)
        seeds = seed_set_from_words(["zz"])
        selected, report = select_documents(iter(docs), seeds, Lexicon(("x",)))
        out = list(selected)
        assert [d.id for d in out] == [1, 2, 4]
        assert all(d.tokens == tuple(token_lists[d.id - 1]) for d in out)
        assert report.seed_hits["zz"] == 4

    def test_monotone_in_seed_set(self):
        rng = random.Random(5)
        vocab = ["a", "b", "c", "s1", "s2", "s3"]
        token_lists = [
            [rng.choice(vocab) for _ in range(rng.randint(1, 6))] for _ in range(60)
        ]
        lexicon = Lexicon(("a", "b", "c"))
        small = seed_set_from_words(["s1"])
        large = seed_set_from_words(["s1", "s2", "s3"])
        got_small, _ = select_documents(iter(make_documents(token_lists)), small, lexicon)
        got_large, _ = select_documents(iter(make_documents(token_lists)), large, lexicon)
        ids_small = {d.id for d in got_small}
        ids_large = {d.id for d in got_large}
        assert ids_small <= ids_large


class TestContextSnippets:
    SEEDS = seed_set_from_words(["s"])
    LEX = Lexicon(("a", "b", "c", "d", "e", "f"))

    def test_window_covering_whole_document(self):
        doc = Document(1, ("a", "s", "b"))
        assert extract_context_snippets(doc, self.SEEDS, self.LEX, 10) == [("a", "s", "b")]

    def test_window_zero_yields_seed_tokens(self):
        doc = Document(1, ("a", "s", "b", "s"))
        assert extract_context_snippets(doc, self.SEEDS, self.LEX, 0) == [("s",), ("s",)]

    def test_disjoint_windows(self):
        doc = Document(1, ("a", "b", "s", "c", "d", "e", "s", "f"))
        spans = extract_context_snippets(doc, self.SEEDS, self.LEX, 1)
        assert spans == [("b", "s", "c"), ("e", "s", "f")]

    def test_overlapping_windows_merge(self):
        doc = Document(1, ("a", "s", "b", "s", "c"))
        assert extract_context_snippets(doc, self.SEEDS, self.LEX, 1) == [("a", "s", "b", "s", "c")]

    def test_no_hits(self):
        doc = Document(1, ("a", "b"))
        assert extract_context_snippets(doc, self.SEEDS, self.LEX, 2) == []

    def test_negative_window_rejected(self):
        with pytest.raises(ValueError):
            extract_context_snippets(Document(1, ("s",)), self.SEEDS, self.LEX, -1)


class TestFilterCorpusFiles:
    def test_selected_lines_byte_identical(self, tmp_path):
        lines = [
            "The carie case, explained.",
            "Nothing here at all.",
            "About BRUXISMO and more?",
        ]
        src = tmp_path / "corpus.txt"
        src.write_text("\n".join(lines) + "\n", encoding="utf-8")
        out = tmp_path / "adapt.txt"
        seeds = seed_set_from_words(["bruxismo"])
        report = filter_corpus_files([str(src)], seeds, LEX, str(out))
        assert report.documents_scanned == 3
        assert report.documents_selected == 1
        selected = out.read_text(encoding="utf-8").splitlines()
        assert selected == ["About BRUXISMO and more?"]
        original = src.read_text(encoding="utf-8").splitlines()
        assert all(line in original for line in selected)

    def test_context_window_writes_snippets(self, tmp_path):
        src = tmp_path / "corpus.txt"
        src.write_text("a b zz c d e zz f\n", encoding="utf-8")
        out = tmp_path / "adapt.txt"
        seeds = seed_set_from_words(["zz"])
        filter_corpus_files([str(src)], seeds, Lexicon(("a", "b", "c", "d", "e", "f")), str(out), context_window=1)
        assert out.read_text(encoding="utf-8") == "b zz c\ne zz f\n"

    def test_empty_trigger_set_writes_empty_file(self, tmp_path):
        src = tmp_path / "corpus.txt"
        src.write_text("la carie\n", encoding="utf-8")
        out = tmp_path / "adapt.txt"
        report = filter_corpus_files([str(src)], seed_set_from_words(["carie"]), LEX, str(out))
        assert out.read_text(encoding="utf-8") == ""
        assert report.warning is not None

    def test_report_json_shape(self, tmp_path):
        src = tmp_path / "corpus.txt"
        src.write_text("zz zz\nplain\n", encoding="utf-8")
        out = tmp_path / "adapt.txt"
        report = filter_corpus_files([str(src)], seed_set_from_words(["zz"]), Lexicon(("plain",)), str(out))
        payload = report.to_json_dict()
        assert payload["documents_scanned"] == 2
        assert payload["documents_selected"] == 1
        assert payload["seed_hits"] == {"zz": 2}
