import random

import pytest

from lmadapt.corpus import Document, Lexicon


def make_documents(token_lists):
    return [Document(i, tuple(toks)) for i, toks in enumerate(token_lists, 1)]


@pytest.fixture
def docs_factory():
    return make_documents


def random_corpus(rng: random.Random, n_sentences=20, vocab_size=8, max_len=6):
    """Random token-list corpus over a small vocabulary (empty lines allowed)."""
    vocab = [f"w{i}" for i in range(vocab_size)]
    return [
        [rng.choice(vocab) for _ in range(rng.randint(0, max_len))]
        for _ in range(n_sentences)
    ]


@pytest.fixture
def write_text(tmp_path):
    def _write(name, content):
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        return str(path)

    return _write
