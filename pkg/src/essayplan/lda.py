"""Latent Dirichlet Allocation via collapsed Gibbs sampling.

Supplies topic-distribution word vectors for topic expansion and clustering.
The sampler is deliberately plain: one chain, seeded, single final sample for
the topic-word table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus


@dataclass(frozen=True, eq=False)
class LdaModel:
    """Topic-word probabilities phi (K x V) over an ordered vocabulary."""

    num_topics: int
    alpha: float
    beta: float
    phi: np.ndarray
    vocabulary: tuple

    def __post_init__(self):
        object.__setattr__(self, "vocabulary", tuple(self.vocabulary))
        object.__setattr__(self, "phi", np.asarray(self.phi, dtype=np.float64))
        k, v = self.num_topics, len(self.vocabulary)
        if self.phi.shape != (k, v):
            raise ValueError(f"phi shape {self.phi.shape} != ({k}, {v})")
        if not np.all(self.phi > 0.0):
            raise ValueError("phi must be strictly positive")
        row_sums = self.phi.sum(axis=1)
        if not np.allclose(row_sums, 1.0, atol=1e-9):
            raise ValueError(f"phi rows must sum to 1, got {row_sums}")
        object.__setattr__(
            self, "_word_index", {w: i for i, w in enumerate(self.vocabulary)}
        )

    def __contains__(self, word: str) -> bool:
        return word in self._word_index

    def word_column(self, word: str) -> np.ndarray:
        try:
            return self.phi[:, self._word_index[word]]
        except KeyError:
            raise ValueError(f"word {word!r} not in topic model vocabulary") from None


def train_lda(
    corpus: Corpus,
    num_topics: int,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 500,
    seed: int = 1,
) -> LdaModel:
    """Fit LDA by collapsed Gibbs sampling; deterministic given `seed`.

    phi is taken from the final sample: phi[k, w] = (n_kw + beta) / (n_k + V*beta).
    """
    if num_topics < 1:
        raise ValueError(f"num_topics must be >= 1, got {num_topics}")
    if alpha is None:
        alpha = 50.0 / num_topics
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")

    vocabulary = tuple(sorted(corpus.vocabulary))
    if not vocabulary:
        raise ValueError("corpus has an empty vocabulary")
    word_index = {w: i for i, w in enumerate(vocabulary)}
    v_size = len(vocabulary)
    k = num_topics

    doc_tokens = [
        [word_index[t] for s in document.sentences for t in s.tokens]
        for document in corpus.documents
    ]
    total_tokens = sum(len(tokens) for tokens in doc_tokens)

    rng = np.random.default_rng(seed)
    assignments = [rng.integers(0, k, size=len(tokens)) for tokens in doc_tokens]

    topic_word = np.zeros((k, v_size), dtype=np.int64)
    topic_totals = np.zeros(k, dtype=np.int64)
    doc_topic = np.zeros((len(doc_tokens), k), dtype=np.int64)
    for d, (tokens, zs) in enumerate(zip(doc_tokens, assignments)):
        for w, z in zip(tokens, zs):
            topic_word[z, w] += 1
            topic_totals[z] += 1
            doc_topic[d, z] += 1

    for _ in range(iterations):
        for d, (tokens, zs) in enumerate(zip(doc_tokens, assignments)):
            for position, w in enumerate(tokens):
                z = zs[position]
                topic_word[z, w] -= 1
                topic_totals[z] -= 1
                doc_topic[d, z] -= 1
                weights = (
                    (doc_topic[d] + alpha)
                    * (topic_word[:, w] + beta)
                    / (topic_totals + v_size * beta)
                )
                cdf = np.cumsum(weights)
                z = int(np.searchsorted(cdf, rng.random() * cdf[-1]))
                z = min(z, k - 1)
                zs[position] = z
                topic_word[z, w] += 1
                topic_totals[z] += 1
                doc_topic[d, z] += 1
        if int(topic_totals.sum()) != total_tokens:
            raise RuntimeError("Gibbs counts desynchronized from token count")

    phi = (topic_word + beta) / (topic_totals + v_size * beta)[:, None]
    return LdaModel(
        num_topics=k, alpha=alpha, beta=beta, phi=phi, vocabulary=vocabulary
    )


def topic_vector(model: LdaModel, word: str) -> np.ndarray:
    """The word's normalized topic distribution: phi[:, w] / sum(phi[:, w])."""
    column = model.word_column(word)
    return column / column.sum()


def save_lda(model: LdaModel, path: str) -> None:
    """Persist as text: "K V alpha beta" header, vocabulary line, K prob rows."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(
            f"{model.num_topics} {len(model.vocabulary)} "
            f"{model.alpha!r} {model.beta!r}\n"
        )
        handle.write(" ".join(model.vocabulary) + "\n")
        for row in model.phi:
            handle.write(" ".join(repr(float(p)) for p in row) + "\n")


def load_lda(path: str) -> LdaModel:
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().split()
        if len(header) != 4:
            raise ValueError(f"{path}:1: header must be 'K V alpha beta'")
        try:
            k, v_size = int(header[0]), int(header[1])
            alpha, beta = float(header[2]), float(header[3])
        except ValueError:
            raise ValueError(f"{path}:1: malformed header values") from None
        vocabulary = tuple(handle.readline().split())
        if len(vocabulary) != v_size:
            raise ValueError(
                f"{path}:2: expected {v_size} vocabulary words, got {len(vocabulary)}"
            )
        rows = []
        for line_no, line in enumerate(handle, start=3):
            if not line.strip():
                continue
            values = line.split()
            if len(values) != v_size:
                raise ValueError(
                    f"{path}:{line_no}: expected {v_size} probabilities, "
                    f"got {len(values)}"
                )
            rows.append([float(x) for x in values])
        if len(rows) != k:
            raise ValueError(f"{path}: expected {k} topic rows, got {len(rows)}")
    return LdaModel(
        num_topics=k, alpha=alpha, beta=beta, phi=np.array(rows),
        vocabulary=vocabulary,
    )
