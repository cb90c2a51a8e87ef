"""Pairwise sentence coherence: two bag-of-words cosines, an averaged
embedding cosine, and a trainable recursive composition network.

The trainable variant folds each sentence's word vectors left to right into a
single vector, scores the concatenated pair through one tanh hidden layer and
a 2-way softmax, and reads coherence as the probability of the "follows"
class. Training contrasts real adjacent pairs against corrupted ones where
the second sentence is replaced at random, under a cross-entropy loss, with
gradients derived by hand so they can be checked against finite differences.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, Sentence
from .embeddings import EmbeddingTable, average_embedding, cosine

COHERENCE_VARIANTS = ("bow_boolean", "bow_frequency", "embed_average", "recursive_nn")

TRUE_PAIR = "true_pair"
CORRUPTED = "corrupted"

# parameter block names, in persistence order
PARAM_BLOCKS = ("w_comp", "b_comp", "w_score", "b_score", "w_out", "b_out")


@dataclass(frozen=True, eq=False)
class RecnnParams:
    """Weights for composition (d x 2d), the scoring hidden layer (h x 2d),
    and the 2-way output layer (2 x h)."""

    dim: int
    hidden: int
    w_comp: np.ndarray
    b_comp: np.ndarray
    w_score: np.ndarray
    b_score: np.ndarray
    w_out: np.ndarray
    b_out: np.ndarray

    def __post_init__(self):
        if self.dim < 1 or self.hidden < 1:
            raise ValueError("dim and hidden must be >= 1")
        expected = {
            "w_comp": (self.dim, 2 * self.dim),
            "b_comp": (self.dim,),
            "w_score": (self.hidden, 2 * self.dim),
            "b_score": (self.hidden,),
            "w_out": (2, self.hidden),
            "b_out": (2,),
        }
        for name, shape in expected.items():
            value = np.asarray(getattr(self, name), dtype=np.float64)
            if value.shape != shape:
                raise ValueError(
                    f"{name} must have shape {shape}, got {value.shape}"
                )
            if not np.all(np.isfinite(value)):
                raise ValueError(f"{name} contains non-finite entries")
            object.__setattr__(self, name, value)

    def blocks(self) -> dict:
        return {name: getattr(self, name) for name in PARAM_BLOCKS}

    def with_blocks(self, blocks: dict) -> "RecnnParams":
        return RecnnParams(dim=self.dim, hidden=self.hidden, **blocks)


def init_recnn_params(dim: int, hidden: int, seed: int = 1) -> RecnnParams:
    rng = np.random.default_rng(seed)

    def uniform(shape):
        return rng.uniform(-0.01, 0.01, size=shape)

    return RecnnParams(
        dim=dim,
        hidden=hidden,
        w_comp=uniform((dim, 2 * dim)),
        b_comp=uniform((dim,)),
        w_score=uniform((hidden, 2 * dim)),
        b_score=uniform((hidden,)),
        w_out=uniform((2, hidden)),
        b_out=uniform((2,)),
    )


@dataclass(frozen=True, eq=False)
class CoherenceModel:
    variant: str
    params: RecnnParams | None = None
    table: EmbeddingTable | None = None

    def __post_init__(self):
        if self.variant not in COHERENCE_VARIANTS:
            raise ValueError(
                f"unknown coherence variant {self.variant!r}; "
                f"expected one of {COHERENCE_VARIANTS}"
            )
        if self.variant == "recursive_nn" and (
            self.params is None or self.table is None
        ):
            raise ValueError("recursive_nn requires params and an embedding table")
        if self.variant == "embed_average" and self.table is None:
            raise ValueError("embed_average requires an embedding table")


@dataclass(frozen=True)
class PairSample:
    s1: Sentence
    s2: Sentence
    label: str
    s2_star: Sentence | None = None

    def __post_init__(self):
        if self.label not in (TRUE_PAIR, CORRUPTED):
            raise ValueError(f"unknown pair label {self.label!r}")
        if self.label == TRUE_PAIR:
            if self.s2_star is not None:
                raise ValueError("true pairs carry no replacement sentence")
            if self.s1.doc_id != self.s2.doc_id or self.s2.index != self.s1.index + 1:
                raise ValueError("true pair sentences must be document-adjacent")
        elif self.s2_star is None:
            raise ValueError("corrupted pairs need a replacement sentence")

    @property
    def second(self) -> Sentence:
        """The sentence actually scored in second position."""
        return self.s2 if self.label == TRUE_PAIR else self.s2_star

    @property
    def target_class(self) -> int:
        return 1 if self.label == TRUE_PAIR else 0


@dataclass(frozen=True)
class RecnnTrainConfig:
    learning_rate: float = 0.05
    epochs: int = 20
    hidden_size: int = 20
    negatives_per_positive: int = 1
    seed: int = 1

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.epochs < 1 or self.hidden_size < 1 or self.negatives_per_positive < 1:
            raise ValueError(
                "epochs, hidden_size and negatives_per_positive must be >= 1"
            )


def _known_vectors(table: EmbeddingTable, sentence: Sentence):
    vectors = [table[t] for t in sentence.tokens if t in table]
    if not vectors:
        raise ValueError(
            f"sentence {sentence.doc_id}[{sentence.index}] has no "
            "in-vocabulary tokens"
        )
    return vectors


def _fold(params: RecnnParams, vectors):
    """Left-branching fold; returns the state sequence v_0..v_{m-1}."""
    states = [np.asarray(vectors[0], dtype=np.float64)]
    for vector in vectors[1:]:
        stacked = np.concatenate([states[-1], vector])
        states.append(np.tanh(params.w_comp @ stacked + params.b_comp))
    return states


def compose_sentence(sentence: Sentence, model: CoherenceModel) -> np.ndarray:
    """Compose a sentence into a dense vector under the model's variant.

    embed_average takes the mean of in-vocabulary token vectors. recursive_nn
    folds token vectors left to right, starting from the first in-vocabulary
    token's embedding; a single usable token comes back unchanged.
    """
    if model.variant == "embed_average":
        try:
            return average_embedding(model.table, sentence.tokens)
        except ValueError as exc:
            raise ValueError(
                f"sentence {sentence.doc_id}[{sentence.index}] cannot be "
                f"composed: {exc}"
            ) from exc
    if model.variant == "recursive_nn":
        vectors = _known_vectors(model.table, sentence)
        return _fold(model.params, vectors)[-1]
    raise ValueError(f"variant {model.variant!r} defines no sentence vector")


def _bag(sentence: Sentence, vocabulary, boolean: bool) -> np.ndarray:
    counts = Counter(sentence.tokens)
    values = [counts[word] for word in vocabulary]
    bag = np.array(values, dtype=np.float64)
    if boolean:
        bag = (bag > 0).astype(np.float64)
    return bag


def _softmax2(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


def _pair_probabilities(params: RecnnParams, v1: np.ndarray, v2: np.ndarray):
    stacked = np.concatenate([v1, v2])
    pre_hidden = params.w_score @ stacked + params.b_score
    hidden = np.tanh(pre_hidden)
    logits = params.w_out @ hidden + params.b_out
    return _softmax2(logits), hidden, stacked


def score_pair(model: CoherenceModel, s1: Sentence, s2: Sentence) -> float:
    """Score how well s2 follows s1: cosine in [-1,1] for the bag and
    embedding variants, the follows-class probability in (0,1) for
    recursive_nn."""
    if model.variant in ("bow_boolean", "bow_frequency"):
        vocabulary = sorted(set(s1.tokens) | set(s2.tokens))
        boolean = model.variant == "bow_boolean"
        bag1 = _bag(s1, vocabulary, boolean)
        bag2 = _bag(s2, vocabulary, boolean)
        for sentence, bag in ((s1, bag1), (s2, bag2)):
            if not bag.any():
                raise ValueError(
                    f"sentence {sentence.doc_id}[{sentence.index}] has an "
                    "empty bag of words"
                )
        return cosine(bag1, bag2)
    if model.variant == "embed_average":
        return cosine(compose_sentence(s1, model), compose_sentence(s2, model))
    probabilities, _, _ = _pair_probabilities(
        model.params,
        compose_sentence(s1, model),
        compose_sentence(s2, model),
    )
    return float(probabilities[1])


def sample_pairs(corpus: Corpus, negatives_per_positive: int = 1, seed: int = 1):
    """Build the training stream: one true sample per adjacent sentence pair,
    plus negatives_per_positive corrupted samples whose replacement is drawn
    uniformly from all corpus sentences except the true second sentence."""
    if negatives_per_positive < 1:
        raise ValueError("negatives_per_positive must be >= 1")
    all_sentences = list(corpus.iter_sentences())
    adjacent = []
    for doc in corpus.documents:
        for i in range(len(doc) - 1):
            adjacent.append((doc.sentences[i], doc.sentences[i + 1]))
    if not adjacent:
        raise ValueError("corpus has no adjacent sentence pairs to sample")

    rng = random.Random(seed)
    samples = []
    for s1, s2 in adjacent:
        samples.append(PairSample(s1=s1, s2=s2, label=TRUE_PAIR))
        for _ in range(negatives_per_positive):
            while True:
                candidate = all_sentences[rng.randrange(len(all_sentences))]
                if not (
                    candidate.doc_id == s2.doc_id and candidate.index == s2.index
                ):
                    break
            samples.append(
                PairSample(s1=s1, s2=s2, label=CORRUPTED, s2_star=candidate)
            )
    return samples


def pair_loss_and_gradients(
    params: RecnnParams,
    table: EmbeddingTable,
    s1: Sentence,
    s2: Sentence,
    target_class: int,
):
    """Cross-entropy loss -log P_target for one ordered sentence pair, plus
    analytic gradients for every parameter block. Word vectors are treated as
    constants."""
    if target_class not in (0, 1):
        raise ValueError(f"target_class must be 0 or 1, got {target_class}")
    vectors1 = _known_vectors(table, s1)
    vectors2 = _known_vectors(table, s2)
    states1 = _fold(params, vectors1)
    states2 = _fold(params, vectors2)

    probabilities, hidden, stacked = _pair_probabilities(
        params, states1[-1], states2[-1]
    )
    loss = -float(np.log(probabilities[target_class]))

    d_logits = probabilities.copy()
    d_logits[target_class] -= 1.0
    grads = {
        "w_out": np.outer(d_logits, hidden),
        "b_out": d_logits,
    }
    d_hidden = params.w_out.T @ d_logits
    d_pre_hidden = d_hidden * (1.0 - hidden**2)
    grads["w_score"] = np.outer(d_pre_hidden, stacked)
    grads["b_score"] = d_pre_hidden
    d_stacked = params.w_score.T @ d_pre_hidden

    d = params.dim
    grads["w_comp"] = np.zeros_like(params.w_comp)
    grads["b_comp"] = np.zeros_like(params.b_comp)
    for states, vectors, d_state in (
        (states1, vectors1, d_stacked[:d]),
        (states2, vectors2, d_stacked[d:]),
    ):
        upstream = d_state
        for t in range(len(states) - 1, 0, -1):
            d_pre = upstream * (1.0 - states[t] ** 2)
            inputs = np.concatenate([states[t - 1], vectors[t]])
            grads["w_comp"] += np.outer(d_pre, inputs)
            grads["b_comp"] += d_pre
            upstream = (params.w_comp.T @ d_pre)[:d]
    return loss, grads


def train_recnn(corpus: Corpus, table: EmbeddingTable, config: RecnnTrainConfig):
    """Train the recursive coherence model by plain SGD.

    True adjacent pairs target class 1, corrupted pairs class 0. Parameters
    start uniform in [-0.01, 0.01]; word vectors stay frozen. Returns the
    trained parameters and the per-epoch average loss.
    """
    samples = sample_pairs(
        corpus, negatives_per_positive=config.negatives_per_positive, seed=config.seed
    )
    params = init_recnn_params(table.dim, config.hidden_size, seed=config.seed)
    order_rng = random.Random(config.seed + 1)

    epoch_losses = []
    for epoch in range(config.epochs):
        order = list(range(len(samples)))
        order_rng.shuffle(order)
        total = 0.0
        for position in order:
            sample = samples[position]
            loss, grads = pair_loss_and_gradients(
                params, table, sample.s1, sample.second, sample.target_class
            )
            if not np.isfinite(loss):
                raise RuntimeError(
                    f"non-finite loss {loss} at epoch {epoch + 1}, "
                    f"sample {position}"
                )
            total += loss
            if config.learning_rate:
                updated = {
                    name: block - config.learning_rate * grads[name]
                    for name, block in params.blocks().items()
                }
                params = params.with_blocks(updated)
        epoch_losses.append(total / len(samples))
    return params, epoch_losses


def save_recnn_params(params: RecnnParams, path) -> None:
    """Write parameters as text: a "d h" header, then each block row-major,
    one row per line."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"{params.dim} {params.hidden}\n")
        for name in PARAM_BLOCKS:
            block = np.atleast_2d(getattr(params, name))
            for row in block:
                handle.write(" ".join(repr(float(x)) for x in row) + "\n")


def load_recnn_params(path) -> RecnnParams:
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    if not lines:
        raise ValueError(f"{path}:1: missing header line")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"{path}:1: header must be 'dim hidden', got {lines[0]!r}")
    try:
        dim, hidden = int(header[0]), int(header[1])
    except ValueError as exc:
        raise ValueError(f"{path}:1: non-integer header field") from exc
    if dim < 1 or hidden < 1:
        raise ValueError(f"{path}:1: dim and hidden must be >= 1")

    shapes = {
        "w_comp": (dim, 2 * dim),
        "b_comp": (1, dim),
        "w_score": (hidden, 2 * dim),
        "b_score": (1, hidden),
        "w_out": (2, hidden),
        "b_out": (1, 2),
    }
    blocks = {}
    line_no = 1
    for name, (rows, columns) in shapes.items():
        block = np.empty((rows, columns))
        for r in range(rows):
            line_no += 1
            if line_no > len(lines):
                raise ValueError(f"{path}:{line_no}: unexpected end of file in {name}")
            fields = lines[line_no - 1].split()
            if len(fields) != columns:
                raise ValueError(
                    f"{path}:{line_no}: expected {columns} values for {name}, "
                    f"got {len(fields)}"
                )
            try:
                block[r] = [float(f) for f in fields]
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: non-numeric value") from exc
        blocks[name] = block if name.startswith("w_") else block[0]
    if line_no != len(lines):
        raise ValueError(f"{path}:{line_no + 1}: trailing content after parameters")
    return RecnnParams(dim=dim, hidden=hidden, **blocks)
