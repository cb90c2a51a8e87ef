"""Sentence scoring, ranked selection, feedback expansion, discourse tags."""

import numpy as np
import pytest

from conftest import make_corpus, make_document, make_sentence
from essayplan.corpus import CONCLUSION, INTRODUCTION, PROMPT
from essayplan.embeddings import EmbeddingTable, average_embedding, cosine
from essayplan.selection import (
    ScoredSentence,
    SelectionConfig,
    feedback_expand,
    load_stopwords,
    score_sentence,
    select_sentences,
    tag_discourse,
)


class TestScoreSentence:
    def test_counting_matches_brute_force(self):
        """Independent set-membership counter over random word sets."""
        rng = np.random.default_rng(41)
        vocabulary = [f"w{i}" for i in range(30)]
        for _ in range(300):
            words = set(rng.choice(vocabulary, size=int(rng.integers(1, 9)),
                                   replace=False))
            tokens = [vocabulary[int(i)]
                      for i in rng.integers(0, 30, size=int(rng.integers(1, 13)))]
            sentence = make_sentence("d", 0, tokens)
            expected = float(sum(1 for w in set(words) if w in tokens))
            assert score_sentence(words, sentence) == expected

    def test_counting_ignores_token_multiplicity(self):
        sentence = make_sentence("d", 0, ["a", "a", "a", "b"])
        assert score_sentence({"a"}, sentence) == 1.0

    def test_embedding_is_cosine_of_averages(self):
        table = EmbeddingTable(dim=2, vectors={
            "a": [1.0, 0.0], "b": [0.0, 1.0], "c": [1.0, 1.0],
        })
        sentence = make_sentence("d", 0, ["c", "b"])
        expected = cosine(
            average_embedding(table, ["a", "b"]),
            average_embedding(table, ["c", "b"]),
        )
        value = score_sentence({"a", "b"}, sentence, method="embedding", table=table)
        assert value == pytest.approx(expected)

    def test_empty_word_set_rejected(self):
        with pytest.raises(ValueError, match="non-empty"):
            score_sentence(set(), make_sentence("d", 0, ["a"]))

    def test_embedding_requires_table(self):
        with pytest.raises(ValueError, match="requires an embedding table"):
            score_sentence({"a"}, make_sentence("d", 0, ["a"]), method="embedding")

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError, match="unknown scoring method"):
            score_sentence({"a"}, make_sentence("d", 0, ["a"]), method="tfidf")


class TestSelectSentences:
    corpus = make_corpus({
        "d1": [["a", "b", "c"], ["a", "b"], ["z"]],
        "d2": [["a", "b", "c"], ["a"], ["b", "c"]],
    })

    def test_ranking_and_tie_breaks(self):
        selected = select_sentences({"a", "b", "c"}, self.corpus,
                                    SelectionConfig(top_k=4))
        refs = [(s.sentence.doc_id, s.sentence.index, s.score) for s in selected]
        # d2[0] duplicates d1[0]'s tokens and is dropped; ties go to the
        # smaller doc_id, then the smaller index
        assert refs == [
            ("d1", 0, 3.0), ("d1", 1, 2.0), ("d2", 2, 2.0), ("d2", 1, 1.0),
        ]

    def test_duplicate_token_sequences_keep_first(self):
        selected = select_sentences({"a"}, self.corpus, SelectionConfig(top_k=10))
        sequences = [s.sentence.tokens for s in selected]
        assert len(sequences) == len(set(sequences))

    def test_max_per_document_cap(self):
        corpus = make_corpus({
            "d1": [["a", "x"], ["a", "y"], ["a", "z"]],
            "d2": [["a", "q"]],
        })
        selected = select_sentences({"a"}, corpus,
                                    SelectionConfig(max_per_document=2))
        from collections import Counter
        per_doc = Counter(s.sentence.doc_id for s in selected)
        assert per_doc == {"d1": 2, "d2": 1}

    def test_top_k_truncates(self):
        selected = select_sentences({"a"}, self.corpus, SelectionConfig(top_k=2))
        assert len(selected) == 2

    def test_short_sentences_never_scored(self):
        selected = select_sentences(
            {"z"}, self.corpus, SelectionConfig(min_sentence_tokens=2)
        )
        assert ("d1", 2) not in [(s.sentence.doc_id, s.sentence.index)
                                 for s in selected]

    def test_zero_score_sentences_still_rank(self):
        selected = select_sentences({"nothere"}, self.corpus,
                                    SelectionConfig(top_k=3))
        assert len(selected) == 3
        assert all(s.score == 0.0 for s in selected)

    def test_embedding_skips_unembeddable_sentences(self):
        table = EmbeddingTable(dim=2, vectors={"a": [1.0, 0.0], "b": [0.5, 0.5]})
        corpus = make_corpus({"d": [["a", "b"], ["z"]]})
        selected = select_sentences(
            {"a"}, corpus, SelectionConfig(method="embedding"), table=table
        )
        assert [(s.sentence.doc_id, s.sentence.index) for s in selected] == [("d", 0)]

    def test_config_validation(self):
        with pytest.raises(ValueError, match="unknown selection method"):
            SelectionConfig(method="random")
        with pytest.raises(ValueError, match="top_k"):
            SelectionConfig(top_k=0)
        with pytest.raises(ValueError, match="max_per_document"):
            SelectionConfig(max_per_document=0)


class TestFeedbackExpand:
    def selected(self, token_lists):
        return [
            ScoredSentence(sentence=make_sentence("d", i, tokens), score=1.0)
            for i, tokens in enumerate(token_lists)
        ]

    def test_counting_scores_by_frequency(self):
        selected = self.selected([["seen", "fresh", "fresh"], ["fresh", "rare"]])
        assert feedback_expand({"seen"}, selected) == ["fresh", "rare"]

    def test_always_disjoint_from_input_words(self):
        rng = np.random.default_rng(13)
        vocabulary = [f"w{i}" for i in range(20)]
        for _ in range(50):
            words = set(rng.choice(vocabulary, size=5, replace=False))
            token_lists = [
                [vocabulary[int(i)] for i in rng.integers(0, 20, size=6)]
                for _ in range(3)
            ]
            result = feedback_expand(words, self.selected(token_lists), k=10)
            assert not set(result) & words

    def test_stopwords_excluded(self):
        selected = self.selected([["the", "fresh", "the"]])
        assert feedback_expand({"seen"}, selected, stopwords={"the"}) == ["fresh"]

    def test_tie_breaks_alphabetical(self):
        selected = self.selected([["bb", "aa"]])
        assert feedback_expand({"seen"}, selected) == ["aa", "bb"]

    def test_k_truncates(self):
        selected = self.selected([["aa", "bb", "cc"]])
        assert feedback_expand({"seen"}, selected, k=2) == ["aa", "bb"]

    def test_embedding_ranks_by_centroid_cosine(self):
        table = EmbeddingTable(dim=2, vectors={
            "seed": [1.0, 0.0], "near": [0.9, 0.1], "far": [0.0, 1.0],
        })
        selected = self.selected([["near", "far", "oovword"]])
        result = feedback_expand(
            {"seed"}, selected, method="embedding", k=2, table=table
        )
        assert result == ["near", "far"]

    def test_embedding_with_no_candidates_returns_empty(self):
        table = EmbeddingTable(dim=2, vectors={"seed": [1.0, 0.0]})
        selected = self.selected([["oovword"]])
        assert feedback_expand(
            {"seed"}, selected, method="embedding", table=table
        ) == []

    def test_empty_selection_rejected(self):
        with pytest.raises(ValueError, match="no selected sentences"):
            feedback_expand({"a"}, [])

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError, match="k must be"):
            feedback_expand({"a"}, self.selected([["b"]]), k=0)

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError, match="unknown feedback method"):
            feedback_expand({"a"}, self.selected([["b"]]), method="pmi")


class TestLoadStopwords:
    def test_reads_one_token_per_line(self, tmp_path):
        path = tmp_path / "stop.txt"
        path.write_text("the\n\n  a  \nof\n", encoding="utf-8")
        assert load_stopwords(str(path)) == frozenset({"the", "a", "of"})


class TestTagDiscourse:
    def test_positional_tags(self):
        doc = tag_discourse(make_document("d", [["a"], ["b"], ["c"], ["d"]]))
        assert [s.tag for s in doc.sentences] == [
            INTRODUCTION, PROMPT, PROMPT, CONCLUSION,
        ]

    def test_single_sentence_is_introduction(self):
        doc = tag_discourse(make_document("d", [["a"]]))
        assert [s.tag for s in doc.sentences] == [INTRODUCTION]

    def test_two_sentences_split_introduction_conclusion(self):
        doc = tag_discourse(make_document("d", [["a"], ["b"]]))
        assert [s.tag for s in doc.sentences] == [INTRODUCTION, CONCLUSION]

    def test_content_otherwise_unchanged(self):
        original = make_document("d", [["a", "b"], ["c"]])
        tagged = tag_discourse(original)
        assert tagged.id == original.id
        assert [s.tokens for s in tagged.sentences] == [
            s.tokens for s in original.sentences
        ]
        assert [s.raw for s in tagged.sentences] == [
            s.raw for s in original.sentences
        ]
