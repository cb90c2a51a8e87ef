"""Tokenized document collections: ingestion, validation, persistence, splits.

Documents arrive pre-tokenized (one JSON record per line, see `ingest_corpus`).
Tokens are compared byte-exact; no normalization is applied. The original
sentence order within a document is what the ordering evaluation treats as
ground truth, so it is preserved everywhere.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field

INTRODUCTION = "Introduction"
PROMPT = "Prompt"
CONCLUSION = "Conclusion"
OTHER = "Other"
DISCOURSE_TAGS = (INTRODUCTION, PROMPT, CONCLUSION, OTHER)


@dataclass(frozen=True)
class Sentence:
    """One tokenized sentence, addressed by (doc_id, index)."""

    doc_id: str
    index: int
    tokens: tuple[str, ...]
    raw: str
    tag: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ValueError(
                f"sentence {self.doc_id}[{self.index}]: tokens must be non-empty"
            )
        if self.index < 0:
            raise ValueError(f"sentence index must be >= 0, got {self.index}")
        if self.tag is not None and self.tag not in DISCOURSE_TAGS:
            raise ValueError(
                f"unknown discourse tag {self.tag!r}; expected one of {DISCOURSE_TAGS}"
            )


@dataclass(frozen=True)
class Document:
    """Ordered sentences under one id; sentence indices are exactly 0..n-1."""

    id: str
    sentences: tuple[Sentence, ...]

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        for position, sentence in enumerate(self.sentences):
            if sentence.index != position:
                raise ValueError(
                    f"document {self.id!r}: sentence at position {position} "
                    f"has index {sentence.index}"
                )
            if sentence.doc_id != self.id:
                raise ValueError(
                    f"document {self.id!r}: sentence carries doc_id "
                    f"{sentence.doc_id!r}"
                )

    def __len__(self) -> int:
        return len(self.sentences)


@dataclass(frozen=True)
class Corpus:
    """A document collection plus its token frequency table."""

    documents: tuple[Document, ...]
    vocabulary: Counter = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        seen = set()
        for document in self.documents:
            if document.id in seen:
                raise ValueError(f"duplicate document id {document.id!r}")
            seen.add(document.id)
        vocabulary = Counter()
        for sentence in self.iter_sentences():
            vocabulary.update(sentence.tokens)
        object.__setattr__(self, "vocabulary", vocabulary)

    def __len__(self) -> int:
        return len(self.documents)

    def iter_sentences(self):
        for document in self.documents:
            yield from document.sentences

    @property
    def num_sentences(self) -> int:
        return sum(len(d) for d in self.documents)


def _sentence_from_record(doc_id: str, index: int, record: dict) -> Sentence:
    if not isinstance(record, dict):
        raise ValueError("sentence entry is not an object")
    if "tokens" not in record:
        raise ValueError("sentence entry missing 'tokens'")
    tokens = record["tokens"]
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise ValueError("'tokens' must be a list of strings")
    if not tokens:
        raise ValueError("'tokens' must be non-empty")
    raw = record.get("raw", " ".join(tokens))
    if not isinstance(raw, str):
        raise ValueError("'raw' must be a string")
    return Sentence(
        doc_id=doc_id, index=index, tokens=tuple(tokens), raw=raw,
        tag=record.get("tag"),
    )


def ingest_corpus(path: str, format: str = "jsonl") -> Corpus:
    """Read a corpus file (one JSON document record per line, UTF-8).

    Each record is ``{"id": ..., "sentences": [{"raw": ..., "tokens": [...]},
    ...]}``. Malformed records raise ValueError carrying the line number;
    duplicate document ids are rejected.
    """
    if format != "jsonl":
        raise ValueError(f"unsupported corpus format {format!r}")
    documents = []
    seen_ids = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: invalid JSON ({exc.msg})") from exc
            try:
                if not isinstance(record, dict):
                    raise ValueError("record is not an object")
                doc_id = record.get("id")
                if not isinstance(doc_id, str) or not doc_id:
                    raise ValueError("record missing string 'id'")
                if doc_id in seen_ids:
                    raise ValueError(
                        f"duplicate document id {doc_id!r} "
                        f"(first seen on line {seen_ids[doc_id]})"
                    )
                sentences_field = record.get("sentences")
                if not isinstance(sentences_field, list) or not sentences_field:
                    raise ValueError("record needs a non-empty 'sentences' list")
                sentences = tuple(
                    _sentence_from_record(doc_id, i, entry)
                    for i, entry in enumerate(sentences_field)
                )
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: {exc}") from None
            seen_ids[doc_id] = line_no
            documents.append(Document(id=doc_id, sentences=sentences))
    return Corpus(documents=tuple(documents))


def save_corpus(corpus: Corpus, path: str) -> None:
    """Write a corpus back to JSON Lines; re-ingesting yields an equal corpus."""
    with open(path, "w", encoding="utf-8") as handle:
        for document in corpus.documents:
            entries = []
            for sentence in document.sentences:
                entry = {"raw": sentence.raw, "tokens": list(sentence.tokens)}
                if sentence.tag is not None:
                    entry["tag"] = sentence.tag
                entries.append(entry)
            record = {"id": document.id, "sentences": entries}
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def split_holdout(corpus: Corpus, fraction: float, seed: int) -> tuple[Corpus, Corpus]:
    """Partition documents into (train, holdout), deterministically per seed.

    The holdout gets ``round(fraction * N)`` documents, clamped to [1, N-1];
    document order within each side follows the original corpus order.
    """
    n = len(corpus.documents)
    if n < 2:
        raise ValueError(f"need at least 2 documents to split, corpus has {n}")
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    size = min(max(round(fraction * n), 1), n - 1)
    holdout_indices = set(random.Random(seed).sample(range(n), size))
    train_docs = tuple(
        d for i, d in enumerate(corpus.documents) if i not in holdout_indices
    )
    holdout_docs = tuple(
        d for i, d in enumerate(corpus.documents) if i in holdout_indices
    )
    return Corpus(documents=train_docs), Corpus(documents=holdout_docs)
