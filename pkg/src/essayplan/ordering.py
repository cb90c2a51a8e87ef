"""Sentence ordering: decode a coherent sequence from pairwise scores.

Decoders maximize the chain objective, the sum of coherence scores over
adjacent positions. Greedy extends one sentence at a time; the exact decoder
runs dynamic programming over (visited-set, last-sentence) states; beam
search covers sets too large for the exact decoder. Orders are evaluated by
directed bigram accuracy against the gold sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coherence import CoherenceModel, score_pair
from .corpus import Corpus

DECODERS = ("greedy", "dp", "beam")

DEFAULT_MAX_EXACT = 12


@dataclass(frozen=True, eq=False)
class CoherenceMatrix:
    """Pairwise scores where entry (i, j) weights sentence j following
    sentence i. The diagonal is never read."""

    scores: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 2 or scores.shape[0] != scores.shape[1]:
            raise ValueError(f"scores must be square, got shape {scores.shape}")
        off_diagonal = scores[~np.eye(scores.shape[0], dtype=bool)]
        if off_diagonal.size and not np.all(np.isfinite(off_diagonal)):
            raise ValueError("off-diagonal scores must be finite")
        object.__setattr__(self, "scores", scores)

    @property
    def n(self) -> int:
        return self.scores.shape[0]


@dataclass(frozen=True)
class Ordering:
    permutation: tuple

    def __post_init__(self):
        permutation = tuple(int(i) for i in self.permutation)
        if sorted(permutation) != list(range(len(permutation))):
            raise ValueError(
                f"not a permutation of 0..{len(permutation) - 1}: {permutation}"
            )
        object.__setattr__(self, "permutation", permutation)

    def __iter__(self):
        return iter(self.permutation)

    def __len__(self):
        return len(self.permutation)

    def __getitem__(self, position):
        return self.permutation[position]


def chain_score(matrix: CoherenceMatrix, order) -> float:
    """Sum of adjacent-pair scores along an order, accumulated left to
    right."""
    sequence = list(order)
    total = 0.0
    for left, right in zip(sequence, sequence[1:]):
        total += matrix.scores[left][right]
    return float(total)


def build_matrix(sentences, model: CoherenceModel) -> CoherenceMatrix:
    """Score every ordered sentence pair under the model."""
    if not sentences:
        raise ValueError("need at least one sentence")
    n = len(sentences)
    scores = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                scores[i][j] = score_pair(model, sentences[i], sentences[j])
    return CoherenceMatrix(scores=scores)


def _check_start(matrix: CoherenceMatrix, start: int) -> None:
    if not 0 <= start < matrix.n:
        raise ValueError(f"start index {start} outside [0, {matrix.n})")


def order_greedy(matrix: CoherenceMatrix, start: int) -> Ordering:
    """From start, repeatedly append the unvisited sentence with the highest
    score after the current one; ties go to the smallest index."""
    _check_start(matrix, start)
    order = [start]
    remaining = set(range(matrix.n)) - {start}
    while remaining:
        current = order[-1]
        order.append(
            max(remaining, key=lambda j: (matrix.scores[current][j], -j))
        )
        remaining.remove(order[-1])
    return Ordering(permutation=tuple(order))


def order_exact_dp(
    matrix: CoherenceMatrix, start: int, max_n: int = DEFAULT_MAX_EXACT
) -> Ordering:
    """Optimal chain-objective order via DP over (visited-set, last) states.

    Exact but exponential in n, so refuses instances above max_n; ties
    resolve to the lexicographically smallest permutation.
    """
    _check_start(matrix, start)
    n = matrix.n
    if n > max_n:
        raise ValueError(
            f"{n} sentences exceeds the exact decoder limit {max_n}; "
            "use order_beam instead"
        )
    # state: (visited mask, last index) -> (score, lexicographically
    # smallest path achieving it)
    states = {(1 << start, start): (0.0, (start,))}
    for _ in range(n - 1):
        frontier: dict = {}
        for (mask, last), (score, path) in states.items():
            for nxt in range(n):
                bit = 1 << nxt
                if mask & bit:
                    continue
                candidate = (score + matrix.scores[last][nxt], path + (nxt,))
                key = (mask | bit, nxt)
                best = frontier.get(key)
                if (
                    best is None
                    or candidate[0] > best[0]
                    or (candidate[0] == best[0] and candidate[1] < best[1])
                ):
                    frontier[key] = candidate
        states = frontier
    best_score = None
    best_path = None
    for score, path in states.values():
        if (
            best_score is None
            or score > best_score
            or (score == best_score and path < best_path)
        ):
            best_score, best_path = score, path
    return Ordering(permutation=best_path)


def order_beam(matrix: CoherenceMatrix, start: int, beam_width: int) -> Ordering:
    """Beam search over partial orders under the chain objective.

    Width 1 reproduces order_greedy exactly; ties at every pruning step
    resolve by partial-permutation lexicographic order.
    """
    _check_start(matrix, start)
    if beam_width < 1:
        raise ValueError("beam_width must be >= 1")
    beam = [(0.0, (start,))]
    for _ in range(matrix.n - 1):
        candidates = []
        for score, path in beam:
            visited = set(path)
            last = path[-1]
            for nxt in range(matrix.n):
                if nxt not in visited:
                    candidates.append(
                        (score + matrix.scores[last][nxt], path + (nxt,))
                    )
        candidates.sort(key=lambda item: (-item[0], item[1]))
        beam = candidates[:beam_width]
    return Ordering(permutation=beam[0][1])


def _adjacent_pairs(order):
    sequence = list(order)
    return set(zip(sequence, sequence[1:]))


def bigram_accuracy(pred, gold) -> float:
    """Fraction of the predicted order's directed adjacent pairs that also
    appear in the gold order."""
    pred_sequence = list(pred)
    gold_sequence = list(gold)
    if len(pred_sequence) < 2:
        raise ValueError("orders must contain at least 2 items")
    if len(set(pred_sequence)) != len(pred_sequence):
        raise ValueError("predicted order repeats an item")
    if set(pred_sequence) != set(gold_sequence) or len(pred_sequence) != len(
        gold_sequence
    ):
        raise ValueError("predicted and gold orders cover different items")
    matches = _adjacent_pairs(pred_sequence) & _adjacent_pairs(gold_sequence)
    return len(matches) / (len(pred_sequence) - 1)


def evaluate_holdout(
    holdout: Corpus,
    model: CoherenceModel,
    decoder: str = "dp",
    beam_width: int = 5,
    max_n: int = DEFAULT_MAX_EXACT,
    pooling: str = "document",
) -> dict:
    """Reorder each holdout document from its true first sentence and report
    bigram accuracy.

    Documents with fewer than 2 sentences are skipped and counted. The mean
    is unweighted over documents by default; pooling="bigram" divides total
    matched pairs by total pairs instead. Documents too long for the exact
    decoder fall back to beam search.
    """
    if decoder not in DECODERS:
        raise ValueError(f"unknown decoder {decoder!r}; expected one of {DECODERS}")
    if pooling not in ("document", "bigram"):
        raise ValueError(f"unknown pooling {pooling!r}")
    rows = []
    skipped = 0
    matched_total = 0.0
    pairs_total = 0
    for doc in holdout.documents:
        n = len(doc)
        if n < 2:
            skipped += 1
            continue
        matrix = build_matrix(doc.sentences, model)
        if decoder == "greedy":
            predicted = order_greedy(matrix, 0)
        elif decoder == "beam" or n > max_n:
            predicted = order_beam(matrix, 0, beam_width)
        else:
            predicted = order_exact_dp(matrix, 0, max_n)
        accuracy = bigram_accuracy(predicted, range(n))
        rows.append({"id": doc.id, "n": n, "accuracy": accuracy})
        matched_total += accuracy * (n - 1)
        pairs_total += n - 1
    if not rows:
        raise ValueError("no holdout document has at least 2 sentences")
    if pooling == "document":
        mean = sum(row["accuracy"] for row in rows) / len(rows)
    else:
        mean = matched_total / pairs_total
    return {
        "decoder": decoder,
        "model": model.variant,
        "mean_accuracy": mean,
        "documents": rows,
        "skipped": skipped,
    }
