"""End-to-end essay generation: expand a topic into arguments, select and
bootstrap supporting sentences per argument, order each paragraph with a
coherence decoder, and assemble the extractive essay plus a full trace.

Every stage is deterministic given the config, resources and topic, so two
runs produce byte-identical essay text and trace JSON.
"""

from __future__ import annotations

import logging
import pathlib
from dataclasses import dataclass

from .coherence import CoherenceModel, RecnnParams, load_recnn_params
from .corpus import INTRODUCTION, Corpus, Sentence, ingest_corpus
from .embeddings import EmbeddingTable, load_embeddings
from .lda import LdaModel, load_lda
from .ordering import (
    DECODERS,
    DEFAULT_MAX_EXACT,
    build_matrix,
    order_beam,
    order_exact_dp,
    order_greedy,
)
from .selection import (
    SelectionConfig,
    feedback_expand,
    load_stopwords,
    select_sentences,
    tag_discourse,
)
from .thesaurus import Thesaurus, load_thesaurus
from .topics import (
    Argument,
    ClusterConfig,
    cluster_arguments,
    expand_topic,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    corpus_path: str = ""
    expansion_backend: str = "we"
    expansion_k: int = 20
    cluster_representation: str = "we"
    cluster: ClusterConfig = ClusterConfig()
    selection: SelectionConfig = SelectionConfig()
    feedback_method: str = "counting"
    feedback_rounds: int = 1
    feedback_words_per_round: int = 5
    coherence_variant: str = "bow_boolean"
    decoder: str = "dp"
    beam_width: int = 5
    embeddings_path: str | None = None
    thesaurus_path: str | None = None
    lda_path: str | None = None
    recnn_path: str | None = None
    stopwords_path: str | None = None
    seed: int = 1

    def __post_init__(self):
        if self.feedback_rounds < 0:
            raise ValueError("feedback_rounds must be >= 0")
        if self.feedback_words_per_round < 1:
            raise ValueError("feedback_words_per_round must be >= 1")
        if self.decoder not in DECODERS:
            raise ValueError(
                f"unknown decoder {self.decoder!r}; expected one of {DECODERS}"
            )
        if self.cluster_representation not in ("tm", "we"):
            raise ValueError(
                f"unknown cluster representation {self.cluster_representation!r}"
            )


# flat config keys -> constructor plumbing; values parsed by the given type
_SCALAR_KEYS = {
    "expansion.backend": ("expansion_backend", str),
    "expansion.k": ("expansion_k", int),
    "cluster.representation": ("cluster_representation", str),
    "feedback.method": ("feedback_method", str),
    "feedback.rounds": ("feedback_rounds", int),
    "feedback.words_per_round": ("feedback_words_per_round", int),
    "coherence.variant": ("coherence_variant", str),
    "ordering.decoder": ("decoder", str),
    "ordering.beam_width": ("beam_width", int),
    "resources.corpus": ("corpus_path", str),
    "resources.embeddings": ("embeddings_path", str),
    "resources.thesaurus": ("thesaurus_path", str),
    "resources.lda": ("lda_path", str),
    "resources.recnn": ("recnn_path", str),
    "resources.stopwords": ("stopwords_path", str),
    "seed": ("seed", int),
}

_CLUSTER_KEYS = {
    "cluster.algorithm": ("algorithm", str),
    "cluster.k": ("k", int),
    "cluster.max_iterations": ("max_iterations", int),
    "cluster.damping": ("damping", float),
    "cluster.preference": ("preference", lambda v: v if v == "median" else float(v)),
    "cluster.min_cluster_size": ("min_cluster_size", int),
    "cluster.seed": ("seed", int),
}

_SELECTION_KEYS = {
    "selection.method": ("method", str),
    "selection.top_k": ("top_k", int),
    "selection.max_per_document": ("max_per_document", int),
    "selection.min_sentence_tokens": ("min_sentence_tokens", int),
}


_PATH_FIELDS = (
    "corpus_path",
    "embeddings_path",
    "thesaurus_path",
    "lda_path",
    "recnn_path",
    "stopwords_path",
)


def load_pipeline_config(path) -> PipelineConfig:
    """Parse a flat key=value config file with namespaced keys.

    Blank lines and '#' comments are ignored. Unknown keys are errors so a
    typo cannot silently fall back to a default. Relative resource paths are
    resolved against the config file's directory.
    """
    scalars: dict = {}
    cluster: dict = {}
    selection: dict = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ValueError(
                    f"{path}:{line_no}: expected key=value, got {stripped!r}"
                )
            key, _, raw_value = stripped.partition("=")
            key = key.strip()
            raw_value = raw_value.strip()
            try:
                if key in _SCALAR_KEYS:
                    field, parse = _SCALAR_KEYS[key]
                    scalars[field] = parse(raw_value)
                elif key in _CLUSTER_KEYS:
                    field, parse = _CLUSTER_KEYS[key]
                    cluster[field] = parse(raw_value)
                elif key in _SELECTION_KEYS:
                    field, parse = _SELECTION_KEYS[key]
                    selection[field] = parse(raw_value)
                else:
                    raise ValueError(f"unknown config key {key!r}")
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: {exc}") from None
    base = pathlib.Path(path).resolve().parent
    for field in _PATH_FIELDS:
        value = scalars.get(field)
        if value and not pathlib.Path(value).is_absolute():
            scalars[field] = str(base / value)
    return PipelineConfig(
        cluster=ClusterConfig(**cluster),
        selection=SelectionConfig(**selection),
        **scalars,
    )


def config_to_dict(config: PipelineConfig) -> dict:
    """JSON-safe snapshot of a config, for the trace report."""
    cluster = config.cluster
    selection = config.selection
    return {
        "corpus_path": config.corpus_path,
        "expansion": {"backend": config.expansion_backend, "k": config.expansion_k},
        "cluster": {
            "representation": config.cluster_representation,
            "algorithm": cluster.algorithm,
            "k": cluster.k,
            "max_iterations": cluster.max_iterations,
            "damping": cluster.damping,
            "preference": cluster.preference,
            "min_cluster_size": cluster.min_cluster_size,
            "seed": cluster.seed,
        },
        "selection": {
            "method": selection.method,
            "top_k": selection.top_k,
            "max_per_document": selection.max_per_document,
            "min_sentence_tokens": selection.min_sentence_tokens,
            "stopwords": sorted(selection.stopwords),
        },
        "feedback": {
            "method": config.feedback_method,
            "rounds": config.feedback_rounds,
            "words_per_round": config.feedback_words_per_round,
        },
        "coherence": {"variant": config.coherence_variant},
        "ordering": {"decoder": config.decoder, "beam_width": config.beam_width},
        "resources": {
            "embeddings": config.embeddings_path,
            "thesaurus": config.thesaurus_path,
            "lda": config.lda_path,
            "recnn": config.recnn_path,
            "stopwords": config.stopwords_path,
        },
        "seed": config.seed,
    }


@dataclass(frozen=True, eq=False)
class PipelineResources:
    corpus: Corpus
    table: EmbeddingTable | None = None
    thesaurus: Thesaurus | None = None
    lda_model: LdaModel | None = None
    recnn_params: RecnnParams | None = None
    stopwords: frozenset = frozenset()


def load_resources(config: PipelineConfig) -> PipelineResources:
    """Load every resource the config references, checking that the chosen
    backends have what they need."""
    if not config.corpus_path:
        raise ValueError("config names no corpus (resources.corpus)")
    corpus = ingest_corpus(config.corpus_path)
    table = load_embeddings(config.embeddings_path) if config.embeddings_path else None
    thesaurus = (
        load_thesaurus(config.thesaurus_path) if config.thesaurus_path else None
    )
    lda_model = load_lda(config.lda_path) if config.lda_path else None
    recnn_params = load_recnn_params(config.recnn_path) if config.recnn_path else None
    stopwords = (
        load_stopwords(config.stopwords_path) if config.stopwords_path else frozenset()
    )

    requirements = []
    if config.expansion_backend == "thes" and thesaurus is None:
        requirements.append("expansion backend 'thes' needs resources.thesaurus")
    if config.expansion_backend == "we" and table is None:
        requirements.append("expansion backend 'we' needs resources.embeddings")
    if config.expansion_backend == "tm" and lda_model is None:
        requirements.append("expansion backend 'tm' needs resources.lda")
    if config.cluster_representation == "we" and table is None:
        requirements.append("cluster representation 'we' needs resources.embeddings")
    if config.cluster_representation == "tm" and lda_model is None:
        requirements.append("cluster representation 'tm' needs resources.lda")
    if config.selection.method == "embedding" and table is None:
        requirements.append("selection method 'embedding' needs resources.embeddings")
    if config.feedback_method == "embedding" and table is None:
        requirements.append("feedback method 'embedding' needs resources.embeddings")
    if config.coherence_variant in ("embed_average", "recursive_nn") and table is None:
        requirements.append(
            f"coherence variant {config.coherence_variant!r} needs "
            "resources.embeddings"
        )
    if config.coherence_variant == "recursive_nn" and recnn_params is None:
        requirements.append("coherence variant 'recursive_nn' needs resources.recnn")
    if requirements:
        raise ValueError("; ".join(requirements))
    return PipelineResources(
        corpus=corpus,
        table=table,
        thesaurus=thesaurus,
        lda_model=lda_model,
        recnn_params=recnn_params,
        stopwords=stopwords,
    )


@dataclass(frozen=True, eq=False)
class Paragraph:
    argument: Argument
    sentences: tuple

    def __post_init__(self):
        if not self.sentences:
            raise ValueError("paragraph must contain at least one sentence")


@dataclass(frozen=True, eq=False)
class Essay:
    topic: str
    paragraphs: tuple

    def text(self) -> str:
        """Plain-text rendering, one paragraph per block, blank-line
        separated."""
        blocks = [
            " ".join(sentence.raw for sentence in paragraph.sentences)
            for paragraph in self.paragraphs
        ]
        return "\n\n".join(blocks) + "\n"


def _decode(config: PipelineConfig, matrix, start: int):
    if config.decoder == "greedy":
        return order_greedy(matrix, start)
    if config.decoder == "beam" or matrix.n > DEFAULT_MAX_EXACT:
        return order_beam(matrix, start, config.beam_width)
    return order_exact_dp(matrix, start)


def _sentence_ref(sentence: Sentence) -> dict:
    return {
        "doc_id": sentence.doc_id,
        "index": sentence.index,
        "tag": sentence.tag,
        "raw": sentence.raw,
    }


def generate_essay(topic: str, config: PipelineConfig, resources=None):
    """Run the whole pipeline for one topic; returns (Essay, trace dict).

    Stages: expansion, clustering into arguments, per-argument selection
    with feedback rounds, cross-argument deduplication (first argument
    wins), per-paragraph coherence decoding starting from the best
    Introduction-tagged sentence when one exists. The trace records every
    intermediate artifact.
    """
    if resources is None:
        resources = load_resources(config)
    corpus = Corpus(
        documents=tuple(tag_discourse(doc) for doc in resources.corpus.documents)
    )

    try:
        expansion = expand_topic(
            topic,
            config.expansion_backend,
            config.expansion_k,
            thesaurus=resources.thesaurus,
            lda_model=resources.lda_model,
            table=resources.table,
        )
    except ValueError as exc:
        raise ValueError(
            f"expansion backend {config.expansion_backend!r} failed: {exc}"
        ) from exc
    if not expansion:
        raise ValueError(
            f"expansion backend {config.expansion_backend!r} produced no words "
            f"for topic {topic!r}"
        )

    arguments = cluster_arguments(
        [word for word, _ in expansion],
        config.cluster_representation,
        config.cluster,
        table=resources.table,
        lda_model=resources.lda_model,
    )
    if not arguments:
        raise ValueError(
            "no argument survived clustering; every cluster fell below "
            f"min_cluster_size={config.cluster.min_cluster_size}"
        )

    stopwords = resources.stopwords | config.selection.stopwords
    coherence_model = CoherenceModel(
        variant=config.coherence_variant,
        params=resources.recnn_params,
        table=resources.table,
    )

    argument_traces = []
    paragraphs = []
    used_tokens: set = set()
    for argument in arguments:
        words = set(argument.supporting_words)
        selected = select_sentences(words, corpus, config.selection, resources.table)
        rounds = [
            {
                "round": 0,
                "words_added": [],
                "selected": [
                    dict(_sentence_ref(s.sentence), score=s.score) for s in selected
                ],
            }
        ]
        for round_no in range(1, config.feedback_rounds + 1):
            if not selected:
                break
            added = feedback_expand(
                words,
                selected,
                method=config.feedback_method,
                k=config.feedback_words_per_round,
                table=resources.table,
                stopwords=stopwords,
            )
            words |= set(added)
            selected = select_sentences(
                words, corpus, config.selection, resources.table
            )
            rounds.append(
                {
                    "round": round_no,
                    "words_added": added,
                    "selected": [
                        dict(_sentence_ref(s.sentence), score=s.score)
                        for s in selected
                    ],
                }
            )

        # cross-argument dedup: earlier (larger) arguments keep the sentence
        kept = [s for s in selected if s.sentence.tokens not in used_tokens]
        trace_entry = {
            "id": argument.id,
            "supporting_words": list(argument.supporting_words),
            "final_words": sorted(words),
            "rounds": rounds,
            "dropped": False,
        }
        if not kept:
            logger.warning(
                "argument %d has no sentences after selection and dedup; dropped",
                argument.id,
            )
            trace_entry["dropped"] = True
            trace_entry["paragraph"] = []
            argument_traces.append(trace_entry)
            continue
        for item in kept:
            used_tokens.add(item.sentence.tokens)

        sentences = [item.sentence for item in kept]
        start = 0
        for position, item in enumerate(kept):
            if item.sentence.tag == INTRODUCTION:
                start = position
                break
        matrix = build_matrix(sentences, coherence_model)
        order = _decode(config, matrix, start)
        ordered = [sentences[i] for i in order]
        paragraphs.append(Paragraph(argument=argument, sentences=tuple(ordered)))
        trace_entry["start"] = start
        trace_entry["order"] = list(order)
        trace_entry["paragraph"] = [_sentence_ref(s) for s in ordered]
        argument_traces.append(trace_entry)

    if not paragraphs:
        raise ValueError("every argument was dropped; nothing to assemble")

    essay = Essay(topic=topic, paragraphs=tuple(paragraphs))
    trace = {
        "topic": topic,
        "config": config_to_dict(config),
        "expansion": [{"word": word, "score": score} for word, score in expansion],
        "arguments": argument_traces,
        "essay": {
            "paragraphs": [
                [sentence.raw for sentence in paragraph.sentences]
                for paragraph in essay.paragraphs
            ]
        },
    }
    return essay, trace
