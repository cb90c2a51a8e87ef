"""Word vectors: storage, similarity queries, averaging, skipgram training.

The trainer is a plain skipgram-with-negative-sampling implementation over a
tokenized corpus, single-threaded and fully seeded so two runs with the same
inputs produce identical tables. The exported vector for each word is the sum
of its input and context rows, which makes words that systematically co-occur
land near each other even on tiny corpora.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    """word -> dense vector map; every vector has length `dim`."""

    dim: int
    vectors: dict

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if not self.vectors:
            raise ValueError("embedding table must not be empty")
        converted = {}
        for word, vector in self.vectors.items():
            array = np.asarray(vector, dtype=np.float64)
            if array.shape != (self.dim,):
                raise ValueError(
                    f"vector for {word!r} has shape {array.shape}, expected ({self.dim},)"
                )
            converted[word] = array
        object.__setattr__(self, "vectors", converted)

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def __getitem__(self, word: str) -> np.ndarray:
        try:
            return self.vectors[word]
        except KeyError:
            raise ValueError(f"word {word!r} not in embedding table") from None

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class SkipgramConfig:
    dim: int = 50
    window: int = 5
    negatives: int = 5
    epochs: int = 10
    learning_rate: float = 0.025
    min_count: int = 1
    seed: int = 1

    def __post_init__(self):
        for name in ("dim", "window", "negatives", "epochs", "min_count"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")


def cosine(a, b) -> float:
    """Cosine similarity of two equal-length, nonzero vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"vector shapes differ: {a.shape} vs {b.shape}")
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise ValueError("cosine is undefined for an all-zero vector")
    return float(np.clip(a.dot(b) / (norm_a * norm_b), -1.0, 1.0))


def nearest_neighbors(table: EmbeddingTable, word: str, k: int):
    """Top-k in-table neighbors of `word` by cosine, best first.

    The query word itself is excluded; ties are broken by lexicographic word
    order. Zero-norm entries cannot be ranked and are skipped.
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    if word not in table:
        raise ValueError(f"word {word!r} not in embedding table")
    query = table[word]
    if np.linalg.norm(query) == 0.0:
        raise ValueError(f"word {word!r} has a zero vector; no neighbors defined")
    scored = []
    for other, vector in table.vectors.items():
        if other == word or np.linalg.norm(vector) == 0.0:
            continue
        scored.append((other, cosine(query, vector)))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]


def average_embedding(table: EmbeddingTable, words) -> np.ndarray:
    """Component-wise mean over the in-vocabulary words; OOV words are skipped."""
    known = [table[w] for w in words if w in table]
    if not known:
        missing = sorted(set(words))
        raise ValueError(f"no in-vocabulary words to average; OOV: {missing}")
    return np.mean(known, axis=0)


def _log_sigmoid(x: float) -> float:
    return -np.logaddexp(0.0, -x)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.clip(x, -500.0, 500.0)))


def negative_sampling_loss_grad(center, positive, negatives):
    """Loss and gradients for one (center, context) pair with sampled negatives.

    loss = -log sigmoid(u_pos . v) - sum_k log sigmoid(-u_k . v)

    Returns (loss, grad_center, grad_positive, grad_negatives) where
    grad_negatives has one row per negative vector.
    """
    v = np.asarray(center, dtype=np.float64)
    u_pos = np.asarray(positive, dtype=np.float64)
    u_neg = np.asarray(negatives, dtype=np.float64).reshape(-1, v.shape[0])

    pos_score = float(u_pos.dot(v))
    neg_scores = u_neg.dot(v)
    loss = -_log_sigmoid(pos_score) - float(np.sum(-np.logaddexp(0.0, neg_scores)))

    g_pos = _sigmoid(pos_score) - 1.0
    g_neg = _sigmoid(neg_scores)
    grad_center = g_pos * u_pos + g_neg.dot(u_neg)
    grad_positive = g_pos * v
    grad_negatives = np.outer(g_neg, v)
    return loss, grad_center, grad_positive, grad_negatives


def train_skipgram(corpus: Corpus, config: SkipgramConfig) -> EmbeddingTable:
    """Train skipgram embeddings with negative sampling over the corpus.

    Contexts never cross sentence boundaries, the window is a fixed span on
    each side of the center word, and negatives are drawn from the unigram
    distribution raised to 0.75, skipping draws that hit the positive target.
    Deterministic given `config.seed`.
    """
    if len(corpus.documents) == 0:
        raise ValueError("corpus is empty")
    kept = sorted(
        (w for w, c in corpus.vocabulary.items() if c >= config.min_count),
        key=lambda w: (-corpus.vocabulary[w], w),
    )
    if not kept:
        raise ValueError(
            f"no word reaches min_count={config.min_count}; vocabulary is empty"
        )
    word_index = {w: i for i, w in enumerate(kept)}
    n = len(kept)

    rng = np.random.default_rng(config.seed)
    input_vecs = (rng.random((n, config.dim)) - 0.5) / config.dim
    context_vecs = np.zeros((n, config.dim))

    weights = np.array(
        [corpus.vocabulary[w] for w in kept], dtype=np.float64
    ) ** 0.75
    noise_cdf = np.cumsum(weights / weights.sum())

    lr = config.learning_rate
    for _ in range(config.epochs):
        for sentence in corpus.iter_sentences():
            ids = [word_index[t] for t in sentence.tokens if t in word_index]
            for position, center in enumerate(ids):
                lo = max(0, position - config.window)
                hi = min(len(ids), position + config.window + 1)
                for context_position in range(lo, hi):
                    if context_position == position:
                        continue
                    target = ids[context_position]
                    v = input_vecs[center]
                    accum = np.zeros(config.dim)
                    # positive target (label 1), then sampled negatives (label 0)
                    draws = np.searchsorted(
                        noise_cdf, rng.random(config.negatives)
                    )
                    for label, out in [(1.0, target)] + [
                        (0.0, int(d)) for d in draws if int(d) != target
                    ]:
                        g = lr * (label - _sigmoid(float(v.dot(context_vecs[out]))))
                        accum += g * context_vecs[out]
                        context_vecs[out] += g * v
                    input_vecs[center] += accum

    combined = input_vecs + context_vecs
    return EmbeddingTable(
        dim=config.dim, vectors={w: combined[i] for w, i in word_index.items()}
    )


def save_embeddings(table: EmbeddingTable, path: str) -> None:
    """Write the table in word2vec text format: header, then one word per line."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"{len(table)} {table.dim}\n")
        for word, vector in table.vectors.items():
            values = " ".join(repr(float(v)) for v in vector)
            handle.write(f"{word} {values}\n")


def load_embeddings(path: str) -> EmbeddingTable:
    """Read a word2vec-text-format table; malformed lines carry line numbers."""
    with open(path, encoding="utf-8") as handle:
        header = handle.readline()
        parts = header.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:1: header must be '<vocab_size> <dim>'")
        try:
            vocab_size, dim = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"{path}:1: header must hold two integers") from None
        vectors = {}
        for line_no, line in enumerate(handle, start=2):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split(" ")
            if len(fields) != dim + 1:
                raise ValueError(
                    f"{path}:{line_no}: expected {dim} values for "
                    f"{fields[0]!r}, got {len(fields) - 1}"
                )
            word = fields[0]
            if word in vectors:
                raise ValueError(f"{path}:{line_no}: duplicate word {word!r}")
            try:
                vectors[word] = np.array([float(x) for x in fields[1:]])
            except ValueError:
                raise ValueError(f"{path}:{line_no}: non-numeric value") from None
        if len(vectors) != vocab_size:
            raise ValueError(
                f"{path}: header promises {vocab_size} words, file has {len(vectors)}"
            )
    return EmbeddingTable(dim=dim, vectors=vectors)
