"""Planning-based extractive essay generation.

A topic word is expanded into related words, the words are clustered into
arguments, each argument retrieves and bootstraps supporting sentences from
a corpus, and each paragraph is ordered by a pairwise coherence model.
"""

from .coherence import (
    CoherenceModel,
    PairSample,
    RecnnParams,
    RecnnTrainConfig,
    compose_sentence,
    load_recnn_params,
    pair_loss_and_gradients,
    sample_pairs,
    save_recnn_params,
    score_pair,
    train_recnn,
)
from .corpus import (
    CONCLUSION,
    INTRODUCTION,
    PROMPT,
    Corpus,
    Document,
    Sentence,
    ingest_corpus,
    save_corpus,
    split_holdout,
)
from .embeddings import (
    EmbeddingTable,
    SkipgramConfig,
    average_embedding,
    cosine,
    load_embeddings,
    nearest_neighbors,
    save_embeddings,
    train_skipgram,
)
from .lda import LdaModel, load_lda, save_lda, topic_vector, train_lda
from .ordering import (
    CoherenceMatrix,
    Ordering,
    bigram_accuracy,
    build_matrix,
    chain_score,
    evaluate_holdout,
    order_beam,
    order_exact_dp,
    order_greedy,
)
from .pipeline import (
    Essay,
    Paragraph,
    PipelineConfig,
    PipelineResources,
    generate_essay,
    load_pipeline_config,
    load_resources,
)
from .selection import (
    ScoredSentence,
    SelectionConfig,
    feedback_expand,
    load_stopwords,
    score_sentence,
    select_sentences,
    tag_discourse,
)
from .thesaurus import (
    ThesExpansionConfig,
    Thesaurus,
    ThesaurusEntry,
    expand_thesaurus,
    load_thesaurus,
)
from .topics import (
    Argument,
    ClusterConfig,
    affinity_propagation,
    cluster_arguments,
    expand_topic,
    kmeans,
)

__version__ = "0.1.0"
