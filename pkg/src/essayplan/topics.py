"""Topic understanding: expansion backends plus word clustering into arguments.

Expansion finds words related to the topic (thesaurus rules, topic-model
vectors, or embedding neighbors); clustering separates them into groups, each
of which becomes one argument supporting the topic. Both steps are pure
functions over immutable resources.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingTable, cosine, nearest_neighbors
from .lda import LdaModel, topic_vector
from .thesaurus import ThesExpansionConfig, Thesaurus, expand_thesaurus

logger = logging.getLogger(__name__)

EXPANSION_BACKENDS = ("thes", "tm", "we")
CLUSTER_ALGORITHMS = ("kmeans", "affinity_propagation")


@dataclass(frozen=True, eq=False)
class Argument:
    """One cluster of supporting words; each argument backs one paragraph."""

    id: int
    supporting_words: tuple
    centroid: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "supporting_words", tuple(self.supporting_words))
        if not self.supporting_words:
            raise ValueError("argument needs at least one supporting word")


@dataclass(frozen=True)
class ClusterConfig:
    algorithm: str = "kmeans"
    k: int = 3
    max_iterations: int = 200
    damping: float = 0.9
    preference: float | str = "median"
    min_cluster_size: int = 3
    seed: int = 1

    def __post_init__(self):
        if self.algorithm not in CLUSTER_ALGORITHMS:
            raise ValueError(
                f"unknown clustering algorithm {self.algorithm!r}; "
                f"expected one of {CLUSTER_ALGORITHMS}"
            )
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not 0.0 < self.damping < 1.0:
            raise ValueError(f"damping must lie in (0, 1), got {self.damping}")
        if self.min_cluster_size < 1:
            raise ValueError("min_cluster_size must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True, eq=False)
class KMeansResult:
    clusters: tuple          # index tuples, one per cluster
    centroids: np.ndarray    # k x d
    inertia_history: tuple   # inertia after each completed iteration
    iterations: int


@dataclass(frozen=True, eq=False)
class APResult:
    exemplars: tuple         # sorted exemplar indices
    assignment: tuple        # point -> exemplar index
    iterations: int
    converged: bool


def expand_topic(
    topic: str,
    backend: str,
    k: int,
    *,
    thesaurus: Thesaurus | None = None,
    thes_config: ThesExpansionConfig | None = None,
    lda_model: LdaModel | None = None,
    table: EmbeddingTable | None = None,
):
    """Expand a topic word into at most k scored candidates, topic excluded."""
    if backend not in EXPANSION_BACKENDS:
        raise ValueError(
            f"unknown expansion backend {backend!r}; expected one of "
            f"{EXPANSION_BACKENDS}"
        )
    if k < 1:
        raise ValueError("k must be >= 1: expansion must retain at least one word")

    if backend == "thes":
        if thesaurus is None:
            raise ValueError("backend 'thes' requires a thesaurus")
        config = thes_config if thes_config is not None else ThesExpansionConfig()
        return expand_thesaurus(thesaurus, topic, config)[:k]

    if backend == "we":
        if table is None:
            raise ValueError("backend 'we' requires an embedding table")
        return nearest_neighbors(table, topic, k)

    if lda_model is None:
        raise ValueError("backend 'tm' requires a topic model")
    query = topic_vector(lda_model, topic)
    scored = []
    for word in lda_model.vocabulary:
        if word == topic:
            continue
        scored.append((word, cosine(query, topic_vector(lda_model, word))))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]


def _nearest_centroid(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    distances = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return distances.argmin(axis=1)


def _kmeans_pp_init(points: np.ndarray, k: int, rng) -> np.ndarray:
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    while len(chosen) < k:
        d2 = ((points[:, None, :] - points[chosen][None, :, :]) ** 2).sum(axis=2)
        weights = d2.min(axis=1)
        weights[chosen] = 0.0
        total = weights.sum()
        if total == 0.0:
            # all remaining points coincide with chosen centers
            remaining = [i for i in range(n) if i not in chosen]
            chosen.append(remaining[0])
            continue
        draw = rng.random() * total
        chosen.append(int(np.searchsorted(np.cumsum(weights), draw)))
    return points[chosen].copy()


def kmeans(points, k: int, max_iterations: int = 200, seed: int = 1) -> KMeansResult:
    """Lloyd's algorithm with k-means++ seeding, seeded and deterministic.

    Stops when assignments stabilize or max_iterations is reached. An empty
    cluster is repaired by moving in the point currently farthest from its
    centroid. Inertia is recorded after each iteration and never increases.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ValueError("points must be a non-empty 2-D array")
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")

    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(points, k, rng)
    labels = None
    inertia_history = []
    iterations = 0
    for _ in range(max_iterations):
        new_labels = _nearest_centroid(points, centroids)

        # repair empty clusters before updating centroids
        for cluster in range(k):
            if np.any(new_labels == cluster):
                continue
            distances = np.linalg.norm(points - centroids[new_labels], axis=1)
            sizes = np.bincount(new_labels, minlength=k)
            movable = sizes[new_labels] > 1
            if not movable.any():
                continue
            candidates = np.where(movable)[0]
            farthest = candidates[int(np.argmax(distances[candidates]))]
            new_labels[farthest] = cluster
            centroids[cluster] = points[farthest]

        for cluster in range(k):
            members = points[new_labels == cluster]
            if len(members):
                centroids[cluster] = members.mean(axis=0)
        iterations += 1
        inertia = float(((points - centroids[new_labels]) ** 2).sum())
        inertia_history.append(inertia)
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels

    clusters = tuple(
        tuple(int(i) for i in np.where(labels == cluster)[0]) for cluster in range(k)
    )
    return KMeansResult(
        clusters=clusters,
        centroids=centroids,
        inertia_history=tuple(inertia_history),
        iterations=iterations,
    )


def affinity_propagation(
    similarity,
    damping: float = 0.9,
    max_iterations: int = 200,
    preference: float | str = "median",
) -> APResult:
    """Responsibility/availability message passing over a similarity matrix.

    The diagonal is set to `preference` ("median" uses the median off-diagonal
    similarity), and the matrix receives tiny fixed-seed noise so exactly
    symmetric inputs still settle on a definite exemplar set. The loop stops
    once the exemplar set has been stable for 10 consecutive iterations, or at
    max_iterations. Every exemplar is assigned to itself; every other point
    goes to its most similar exemplar.
    """
    s = np.array(similarity, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"similarity must be square, got shape {s.shape}")
    if not 0.0 < damping < 1.0:
        raise ValueError(f"damping must lie in (0, 1), got {damping}")
    n = s.shape[0]
    if n == 1:
        return APResult(exemplars=(0,), assignment=(0,), iterations=0, converged=True)

    if preference == "median":
        off_diagonal = s[~np.eye(n, dtype=bool)]
        preference_value = float(np.median(off_diagonal))
    else:
        preference_value = float(preference)
    np.fill_diagonal(s, preference_value)

    # tiny seeded noise so exactly symmetric inputs still resolve to a
    # definite exemplar set instead of oscillating on the tie
    noise_rng = np.random.default_rng(0)
    s = s + 1e-12 * (np.abs(s) + 1.0) * noise_rng.standard_normal((n, n))

    responsibilities = np.zeros((n, n))
    availabilities = np.zeros((n, n))
    previous_exemplars = None
    stable_for = 0
    iterations = 0
    converged = False
    for iterations in range(1, max_iterations + 1):
        # responsibilities: r(i,k) = s(i,k) - max_{k' != k} (a(i,k') + s(i,k'))
        combined = availabilities + s
        best_index = combined.argmax(axis=1)
        best = combined[np.arange(n), best_index]
        masked = combined.copy()
        masked[np.arange(n), best_index] = -np.inf
        second_best = masked.max(axis=1)
        row_max = np.full((n, n), best[:, None])
        row_max[np.arange(n), best_index] = second_best
        responsibilities = damping * responsibilities + (1.0 - damping) * (s - row_max)

        # availabilities: a(i,k) = min(0, r(k,k) + sum_{i' not in {i,k}} max(0, r(i',k)))
        positive = np.maximum(responsibilities, 0.0)
        np.fill_diagonal(positive, 0.0)
        column_sums = positive.sum(axis=0)
        fresh = np.minimum(
            0.0, responsibilities.diagonal()[None, :] + column_sums[None, :] - positive
        )
        np.fill_diagonal(fresh, column_sums)
        availabilities = damping * availabilities + (1.0 - damping) * fresh

        exemplars = tuple(
            int(i)
            for i in np.where(responsibilities.diagonal() + availabilities.diagonal() > 0)[0]
        )
        if exemplars == previous_exemplars:
            stable_for += 1
            if exemplars and stable_for >= 10:
                converged = True
                break
        else:
            stable_for = 0
        previous_exemplars = exemplars

    exemplars = tuple(
        int(i)
        for i in np.where(responsibilities.diagonal() + availabilities.diagonal() > 0)[0]
    )
    if not exemplars:
        criterion = responsibilities.diagonal() + availabilities.diagonal()
        exemplars = (int(np.argmax(criterion)),)

    assignment = []
    exemplar_array = np.array(exemplars)
    for i in range(n):
        if i in exemplars:
            assignment.append(i)
        else:
            scores = s[i, exemplar_array]
            assignment.append(int(exemplar_array[int(np.argmax(scores))]))
    return APResult(
        exemplars=exemplars,
        assignment=tuple(assignment),
        iterations=iterations,
        converged=converged,
    )


def cluster_arguments(
    words,
    representation: str,
    config: ClusterConfig,
    *,
    table: EmbeddingTable | None = None,
    lda_model: LdaModel | None = None,
):
    """Embed words, cluster them, and return the surviving Arguments.

    OOV words are dropped (with a logged count); clusters smaller than
    config.min_cluster_size are discarded. Arguments come back ordered by
    size descending, then by their smallest member word, with ids 0..m-1.
    """
    if representation not in ("tm", "we"):
        raise ValueError(f"unknown representation {representation!r}")
    if representation == "we" and table is None:
        raise ValueError("representation 'we' requires an embedding table")
    if representation == "tm" and lda_model is None:
        raise ValueError("representation 'tm' requires a topic model")

    kept_words = []
    vectors = []
    dropped = 0
    for word in words:
        if representation == "we":
            if word in table:
                kept_words.append(word)
                vectors.append(table[word])
            else:
                dropped += 1
        else:
            if word in lda_model:
                kept_words.append(word)
                vectors.append(topic_vector(lda_model, word))
            else:
                dropped += 1
    if dropped:
        logger.warning("dropped %d out-of-vocabulary words before clustering", dropped)
    if not kept_words:
        raise ValueError(f"all {dropped} words are out of vocabulary; nothing to cluster")

    points = np.array(vectors)
    if config.algorithm == "kmeans":
        result = kmeans(
            points,
            k=min(config.k, len(kept_words)),
            max_iterations=config.max_iterations,
            seed=config.seed,
        )
        groups = [list(cluster) for cluster in result.clusters]
        centroids = [result.centroids[i] for i in range(len(groups))]
    else:
        n = len(kept_words)
        similarity = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                if i != j:
                    similarity[i, j] = cosine(points[i], points[j])
        result = affinity_propagation(
            similarity,
            damping=config.damping,
            max_iterations=config.max_iterations,
            preference=config.preference,
        )
        by_exemplar: dict[int, list[int]] = {e: [] for e in result.exemplars}
        for i, exemplar in enumerate(result.assignment):
            by_exemplar[exemplar].append(i)
        groups = [by_exemplar[e] for e in result.exemplars]
        centroids = [points[e] for e in result.exemplars]

    surviving = [
        (sorted(group), centroid)
        for group, centroid in zip(groups, centroids)
        if len(group) >= config.min_cluster_size
    ]
    surviving.sort(key=lambda item: (-len(item[0]), min(kept_words[i] for i in item[0])))
    return [
        Argument(
            id=argument_id,
            supporting_words=tuple(kept_words[i] for i in group),
            centroid=centroid,
        )
        for argument_id, (group, centroid) in enumerate(surviving)
    ]
