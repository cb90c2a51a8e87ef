"""Shared builders for the test suite: tiny corpora and embedding tables."""

import pathlib

import numpy as np

from essayplan.corpus import Corpus, Document, Sentence
from essayplan.embeddings import EmbeddingTable

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def make_sentence(doc_id, index, tokens, raw=None, tag=None):
    return Sentence(
        doc_id=doc_id,
        index=index,
        tokens=tuple(tokens),
        raw=" ".join(tokens) if raw is None else raw,
        tag=tag,
    )


def make_document(doc_id, sentences):
    return Document(
        id=doc_id,
        sentences=tuple(
            make_sentence(doc_id, i, tokens) for i, tokens in enumerate(sentences)
        ),
    )


def make_corpus(spec):
    """Build a corpus from {doc_id: [token list, ...]}."""
    return Corpus(
        documents=tuple(
            make_document(doc_id, sentences) for doc_id, sentences in spec.items()
        )
    )


def random_table(words, dim, seed):
    rng = np.random.default_rng(seed)
    return EmbeddingTable(
        dim=dim, vectors={w: rng.normal(size=dim) for w in sorted(set(words))}
    )
