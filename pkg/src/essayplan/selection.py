"""Sentence selection for an argument's word set, with feedback expansion.

Scoring supports a counting method (how many supporting words a sentence
covers) and an embedding method (cosine between the averaged word vectors of
the supporting set and of the sentence). Feedback expansion mines new
supporting words out of the sentences already selected, so selection can run
in rounds with a growing word set.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, replace

from .corpus import CONCLUSION, INTRODUCTION, PROMPT, Corpus, Document, Sentence
from .embeddings import EmbeddingTable, average_embedding, cosine

SELECTION_METHODS = ("counting", "embedding")


@dataclass(frozen=True)
class ScoredSentence:
    sentence: Sentence
    score: float

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise ValueError(f"score must be finite, got {self.score}")


@dataclass(frozen=True)
class SelectionConfig:
    method: str = "counting"
    top_k: int = 10
    max_per_document: int = 2
    min_sentence_tokens: int = 1
    stopwords: frozenset = frozenset()

    def __post_init__(self):
        if self.method not in SELECTION_METHODS:
            raise ValueError(
                f"unknown selection method {self.method!r}; "
                f"expected one of {SELECTION_METHODS}"
            )
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.max_per_document < 1:
            raise ValueError("max_per_document must be >= 1")
        if self.min_sentence_tokens < 1:
            raise ValueError("min_sentence_tokens must be >= 1")
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))


def score_sentence(
    supporting_words,
    sentence: Sentence,
    method: str = "counting",
    table: EmbeddingTable | None = None,
) -> float:
    """Score one sentence against a supporting word set.

    counting: the number of distinct supporting words present in the sentence.
    embedding: cosine between the average vectors of the word set and of the
    sentence tokens (skipping out-of-vocabulary tokens on both sides).
    """
    words = set(supporting_words)
    if not words:
        raise ValueError("supporting word set must be non-empty")
    if method == "counting":
        return float(len(words.intersection(sentence.tokens)))
    if method == "embedding":
        if table is None:
            raise ValueError("embedding method requires an embedding table")
        return cosine(
            average_embedding(table, sorted(words)),
            average_embedding(table, sentence.tokens),
        )
    raise ValueError(f"unknown scoring method {method!r}")


def select_sentences(
    supporting_words,
    corpus: Corpus,
    config: SelectionConfig,
    table: EmbeddingTable | None = None,
):
    """Rank corpus sentences for a word set and keep the top ones.

    Sentences shorter than min_sentence_tokens are never scored; with the
    embedding method, sentences that cannot be embedded at all are skipped.
    Ranking is (score desc, doc_id asc, index asc); duplicate token sequences
    keep only the first; at most max_per_document sentences per document; at
    most top_k overall. An empty result is allowed.
    """
    scored = []
    for sentence in corpus.iter_sentences():
        if len(sentence.tokens) < config.min_sentence_tokens:
            continue
        try:
            value = score_sentence(
                supporting_words, sentence, method=config.method, table=table
            )
        except ValueError:
            if config.method == "embedding":
                continue
            raise
        scored.append(ScoredSentence(sentence=sentence, score=value))

    scored.sort(key=lambda s: (-s.score, s.sentence.doc_id, s.sentence.index))

    selected = []
    seen_tokens = set()
    per_document: Counter = Counter()
    for item in scored:
        if item.sentence.tokens in seen_tokens:
            continue
        if per_document[item.sentence.doc_id] >= config.max_per_document:
            continue
        seen_tokens.add(item.sentence.tokens)
        per_document[item.sentence.doc_id] += 1
        selected.append(item)
        if len(selected) == config.top_k:
            break
    return selected


def feedback_expand(
    supporting_words,
    selected,
    method: str = "counting",
    k: int = 10,
    table: EmbeddingTable | None = None,
    stopwords=frozenset(),
):
    """Mine new supporting words from already-selected sentences.

    Candidates are the tokens of the selected sentences minus the current
    word set minus stopwords. counting scores a candidate by its token
    frequency across the sentences; embedding scores by cosine between the
    candidate's vector and the average vector of the current word set
    (candidates without a vector are dropped). Returns at most k words by
    (score desc, word asc), always disjoint from the input set.
    """
    if not selected:
        raise ValueError("no selected sentences to expand from")
    if k < 1:
        raise ValueError("k must be >= 1")
    words = set(supporting_words)
    excluded = words | set(stopwords)

    if method == "counting":
        frequencies: Counter = Counter()
        for item in selected:
            for token in item.sentence.tokens:
                if token not in excluded:
                    frequencies[token] += 1
        ranked = sorted(frequencies.items(), key=lambda kv: (-kv[1], kv[0]))
        return [word for word, _ in ranked[:k]]

    if method == "embedding":
        if table is None:
            raise ValueError("embedding method requires an embedding table")
        centroid = average_embedding(table, sorted(words))
        candidates = set()
        for item in selected:
            for token in item.sentence.tokens:
                if token not in excluded and token in table:
                    candidates.add(token)
        if not candidates:
            return []
        ranked = sorted(
            ((word, cosine(table[word], centroid)) for word in candidates),
            key=lambda kv: (-kv[1], kv[0]),
        )
        return [word for word, _ in ranked[:k]]

    raise ValueError(f"unknown feedback method {method!r}")


def load_stopwords(path) -> frozenset:
    """Read a stopword file: UTF-8, one token per line, blanks ignored."""
    with open(path, encoding="utf-8") as handle:
        return frozenset(line.strip() for line in handle if line.strip())


def tag_discourse(doc: Document) -> Document:
    """Assign positional discourse tags: first sentence Introduction, last
    Conclusion, everything between Prompt. A single-sentence document is all
    Introduction."""
    n = len(doc)
    tagged = []
    for sentence in doc.sentences:
        if sentence.index == 0:
            tag = INTRODUCTION
        elif sentence.index == n - 1:
            tag = CONCLUSION
        else:
            tag = PROMPT
        tagged.append(replace(sentence, tag=tag))
    return Document(id=doc.id, sentences=tuple(tagged))
