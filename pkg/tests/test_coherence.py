"""Coherence scoring variants, pair sampling, training, gradient checks."""

import numpy as np
import pytest

from conftest import make_corpus, make_sentence, random_table
from essayplan.coherence import (
    CORRUPTED,
    PARAM_BLOCKS,
    TRUE_PAIR,
    CoherenceModel,
    PairSample,
    RecnnParams,
    RecnnTrainConfig,
    compose_sentence,
    init_recnn_params,
    load_recnn_params,
    pair_loss_and_gradients,
    sample_pairs,
    save_recnn_params,
    score_pair,
    train_recnn,
)


def zero_params(dim, hidden):
    return RecnnParams(
        dim=dim, hidden=hidden,
        w_comp=np.zeros((dim, 2 * dim)), b_comp=np.zeros(dim),
        w_score=np.zeros((hidden, 2 * dim)), b_score=np.zeros(hidden),
        w_out=np.zeros((2, hidden)), b_out=np.zeros(2),
    )


class TestRecnnParams:
    def test_shape_validation(self):
        with pytest.raises(ValueError, match="w_comp must have shape"):
            RecnnParams(
                dim=3, hidden=2,
                w_comp=np.zeros((3, 3)), b_comp=np.zeros(3),
                w_score=np.zeros((2, 6)), b_score=np.zeros(2),
                w_out=np.zeros((2, 2)), b_out=np.zeros(2),
            )

    def test_non_finite_rejected(self):
        params = zero_params(2, 2)
        blocks = params.blocks()
        blocks["b_out"] = np.array([np.nan, 0.0])
        with pytest.raises(ValueError, match="non-finite"):
            params.with_blocks(blocks)

    def test_blocks_round_trip(self):
        params = init_recnn_params(3, 4, seed=2)
        again = params.with_blocks(params.blocks())
        for name in PARAM_BLOCKS:
            np.testing.assert_array_equal(getattr(again, name), getattr(params, name))


class TestInitRecnnParams:
    def test_values_within_bounds(self):
        params = init_recnn_params(5, 6, seed=3)
        for name in PARAM_BLOCKS:
            block = getattr(params, name)
            assert np.all(np.abs(block) <= 0.01)

    def test_deterministic(self):
        first = init_recnn_params(4, 3, seed=9)
        second = init_recnn_params(4, 3, seed=9)
        np.testing.assert_array_equal(first.w_comp, second.w_comp)


class TestCoherenceModel:
    def test_unknown_variant_rejected(self):
        with pytest.raises(ValueError, match="unknown coherence variant"):
            CoherenceModel(variant="lstm")

    def test_recursive_nn_needs_params_and_table(self):
        with pytest.raises(ValueError, match="params and an embedding table"):
            CoherenceModel(variant="recursive_nn")

    def test_embed_average_needs_table(self):
        with pytest.raises(ValueError, match="embedding table"):
            CoherenceModel(variant="embed_average")


class TestPairSample:
    s1 = make_sentence("d", 0, ["a"])
    s2 = make_sentence("d", 1, ["b"])
    other = make_sentence("e", 0, ["c"])

    def test_true_pair_must_be_adjacent(self):
        with pytest.raises(ValueError, match="document-adjacent"):
            PairSample(s1=self.s1, s2=self.other, label=TRUE_PAIR)

    def test_true_pair_carries_no_replacement(self):
        with pytest.raises(ValueError, match="no replacement"):
            PairSample(s1=self.s1, s2=self.s2, label=TRUE_PAIR, s2_star=self.other)

    def test_corrupted_needs_replacement(self):
        with pytest.raises(ValueError, match="replacement"):
            PairSample(s1=self.s1, s2=self.s2, label=CORRUPTED)

    def test_second_and_target_class(self):
        true_pair = PairSample(s1=self.s1, s2=self.s2, label=TRUE_PAIR)
        corrupted = PairSample(
            s1=self.s1, s2=self.s2, label=CORRUPTED, s2_star=self.other
        )
        assert true_pair.second is self.s2
        assert true_pair.target_class == 1
        assert corrupted.second is self.other
        assert corrupted.target_class == 0


class TestScorePairAnalytic:
    def test_boolean_bag_overlap(self):
        model = CoherenceModel(variant="bow_boolean")
        value = score_pair(
            model, make_sentence("d", 0, ["a", "b"]), make_sentence("d", 1, ["a", "c"])
        )
        assert value == pytest.approx(0.5, abs=1e-9)

    def test_frequency_bag_overlap(self):
        model = CoherenceModel(variant="bow_frequency")
        value = score_pair(
            model,
            make_sentence("d", 0, ["a", "a", "b"]),
            make_sentence("d", 1, ["a", "b", "b"]),
        )
        assert value == pytest.approx(0.8, abs=1e-9)

    def test_boolean_ignores_multiplicity(self):
        model = CoherenceModel(variant="bow_boolean")
        single = score_pair(
            model, make_sentence("d", 0, ["a", "b"]), make_sentence("d", 1, ["a", "c"])
        )
        repeated = score_pair(
            model,
            make_sentence("d", 0, ["a", "a", "a", "b"]),
            make_sentence("d", 1, ["a", "c", "c"]),
        )
        assert repeated == pytest.approx(single, abs=1e-12)

    def test_identical_sentences_score_one(self):
        model = CoherenceModel(variant="bow_frequency")
        s1 = make_sentence("d", 0, ["a", "b", "a"])
        s2 = make_sentence("d", 1, ["a", "b", "a"])
        assert score_pair(model, s1, s2) == pytest.approx(1.0)

    def test_disjoint_sentences_score_zero(self):
        model = CoherenceModel(variant="bow_boolean")
        s1 = make_sentence("d", 0, ["a", "b"])
        s2 = make_sentence("d", 1, ["c", "d"])
        assert score_pair(model, s1, s2) == pytest.approx(0.0)

    def test_embed_average_matches_direct_cosine(self):
        table = random_table(["a", "b", "c"], dim=4, seed=6)
        model = CoherenceModel(variant="embed_average", table=table)
        s1 = make_sentence("d", 0, ["a", "b"])
        s2 = make_sentence("d", 1, ["b", "c"])
        expected = np.dot(
            (table["a"] + table["b"]) / 2, (table["b"] + table["c"]) / 2
        ) / (
            np.linalg.norm((table["a"] + table["b"]) / 2)
            * np.linalg.norm((table["b"] + table["c"]) / 2)
        )
        assert score_pair(model, s1, s2) == pytest.approx(float(expected))

    def test_all_zero_parameters_score_exactly_half(self):
        table = random_table(["a", "b", "c"], dim=3, seed=1)
        model = CoherenceModel(
            variant="recursive_nn", params=zero_params(3, 4), table=table
        )
        s1 = make_sentence("d", 0, ["a", "b"])
        s2 = make_sentence("d", 1, ["c"])
        assert score_pair(model, s1, s2) == 0.5


class TestComposeSentence:
    table = random_table(["a", "b", "c"], dim=3, seed=10)

    def test_single_token_passes_through(self):
        params = init_recnn_params(3, 2, seed=1)
        model = CoherenceModel(variant="recursive_nn", params=params, table=self.table)
        vector = compose_sentence(make_sentence("d", 0, ["b"]), model)
        np.testing.assert_array_equal(vector, self.table["b"])

    def test_two_token_fold_matches_manual_tanh(self):
        params = init_recnn_params(3, 2, seed=4)
        model = CoherenceModel(variant="recursive_nn", params=params, table=self.table)
        vector = compose_sentence(make_sentence("d", 0, ["a", "c"]), model)
        stacked = np.concatenate([self.table["a"], self.table["c"]])
        np.testing.assert_allclose(
            vector, np.tanh(params.w_comp @ stacked + params.b_comp)
        )

    def test_oov_tokens_skipped_before_folding(self):
        params = init_recnn_params(3, 2, seed=4)
        model = CoherenceModel(variant="recursive_nn", params=params, table=self.table)
        with_oov = compose_sentence(make_sentence("d", 0, ["zz", "a", "c"]), model)
        without = compose_sentence(make_sentence("d", 0, ["a", "c"]), model)
        np.testing.assert_array_equal(with_oov, without)

    def test_fully_oov_sentence_rejected(self):
        params = init_recnn_params(3, 2, seed=4)
        model = CoherenceModel(variant="recursive_nn", params=params, table=self.table)
        with pytest.raises(ValueError, match=r"d\[0\] has no in-vocabulary"):
            compose_sentence(make_sentence("d", 0, ["zz"]), model)

    def test_embed_average_variant(self):
        model = CoherenceModel(variant="embed_average", table=self.table)
        vector = compose_sentence(make_sentence("d", 0, ["a", "b"]), model)
        np.testing.assert_allclose(vector, (self.table["a"] + self.table["b"]) / 2)

    def test_bag_variants_define_no_vector(self):
        model = CoherenceModel(variant="bow_boolean")
        with pytest.raises(ValueError, match="no sentence vector"):
            compose_sentence(make_sentence("d", 0, ["a"]), model)


class TestPairGradients:
    """Every analytic gradient block must match central finite differences."""

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(19)
        table = random_table([f"t{i}" for i in range(8)], dim=4, seed=2)
        step = 1e-5
        worst = 0.0
        for trial in range(6):
            params = init_recnn_params(4, 3, seed=trial)
            n1 = int(rng.integers(1, 6))
            n2 = int(rng.integers(1, 6))
            s1 = make_sentence("d", 0, [f"t{int(i)}" for i in rng.integers(0, 8, n1)])
            s2 = make_sentence("d", 1, [f"t{int(i)}" for i in rng.integers(0, 8, n2)])
            target = int(rng.integers(0, 2))
            loss, grads = pair_loss_and_gradients(params, table, s1, s2, target)
            assert np.isfinite(loss) and loss > 0.0
            for name in PARAM_BLOCKS:
                block = np.asarray(getattr(params, name))
                analytic = grads[name]
                it = np.nditer(block, flags=["multi_index"])
                for _ in it:
                    index = it.multi_index
                    blocks = params.blocks()
                    bumped = blocks[name].copy()
                    bumped[index] += step
                    blocks[name] = bumped
                    up = pair_loss_and_gradients(
                        params.with_blocks(blocks), table, s1, s2, target
                    )[0]
                    bumped = bumped.copy()
                    bumped[index] -= 2 * step
                    blocks[name] = bumped
                    down = pair_loss_and_gradients(
                        params.with_blocks(blocks), table, s1, s2, target
                    )[0]
                    numeric = (up - down) / (2 * step)
                    denom = max(abs(analytic[index]), abs(numeric), 1e-6)
                    worst = max(worst, abs(analytic[index] - numeric) / denom)
        assert worst < 1e-4

    def test_bad_target_rejected(self):
        table = random_table(["a"], dim=2, seed=1)
        params = init_recnn_params(2, 2, seed=1)
        with pytest.raises(ValueError, match="target_class"):
            pair_loss_and_gradients(
                params, table, make_sentence("d", 0, ["a"]),
                make_sentence("d", 1, ["a"]), 2,
            )


class TestSamplePairs:
    corpus = make_corpus({
        "d1": [["a"], ["b"], ["c"]],
        "d2": [["d"], ["e"]],
    })

    def test_counts(self):
        samples = sample_pairs(self.corpus, negatives_per_positive=2, seed=1)
        assert len(samples) == 9  # 3 adjacent pairs, each with 2 negatives
        assert sum(1 for s in samples if s.label == TRUE_PAIR) == 3
        assert sum(1 for s in samples if s.label == CORRUPTED) == 6

    def test_replacement_never_equals_true_second(self):
        for seed in range(5):
            for sample in sample_pairs(self.corpus, seed=seed):
                if sample.label == CORRUPTED:
                    assert (
                        sample.s2_star.doc_id, sample.s2_star.index
                    ) != (sample.s2.doc_id, sample.s2.index)

    def test_deterministic_given_seed(self):
        first = sample_pairs(self.corpus, seed=3)
        second = sample_pairs(self.corpus, seed=3)
        assert [
            (s.label, s.second.doc_id, s.second.index) for s in first
        ] == [(s.label, s.second.doc_id, s.second.index) for s in second]

    def test_no_adjacent_pairs_rejected(self):
        corpus = make_corpus({"d1": [["a"]], "d2": [["b"]]})
        with pytest.raises(ValueError, match="no adjacent sentence pairs"):
            sample_pairs(corpus)


class TestTrainRecnn:
    corpus = make_corpus({
        "d1": [["a", "b"], ["b", "c"], ["c", "a"]],
        "d2": [["b", "a"], ["a", "c"]],
    })
    table = random_table(["a", "b", "c"], dim=4, seed=8)

    def test_zero_learning_rate_keeps_initial_parameters(self):
        config = RecnnTrainConfig(learning_rate=0.0, epochs=3, hidden_size=3, seed=5)
        params, losses = train_recnn(self.corpus, self.table, config)
        initial = init_recnn_params(self.table.dim, 3, seed=5)
        for name in PARAM_BLOCKS:
            np.testing.assert_array_equal(getattr(params, name), getattr(initial, name))
        assert len(losses) == 3
        assert losses[0] == pytest.approx(losses[-1], rel=1e-9)

    def test_training_changes_parameters(self):
        config = RecnnTrainConfig(learning_rate=0.1, epochs=2, hidden_size=3, seed=5)
        params, losses = train_recnn(self.corpus, self.table, config)
        initial = init_recnn_params(self.table.dim, 3, seed=5)
        assert not np.array_equal(params.w_out, initial.w_out)
        assert all(np.isfinite(loss) for loss in losses)

    def test_deterministic_given_seed(self):
        config = RecnnTrainConfig(learning_rate=0.1, epochs=2, hidden_size=3, seed=2)
        first, first_losses = train_recnn(self.corpus, self.table, config)
        second, second_losses = train_recnn(self.corpus, self.table, config)
        np.testing.assert_array_equal(first.w_comp, second.w_comp)
        assert first_losses == second_losses

    def test_config_validation(self):
        with pytest.raises(ValueError, match="learning_rate"):
            RecnnTrainConfig(learning_rate=-0.1)
        with pytest.raises(ValueError, match=">= 1"):
            RecnnTrainConfig(epochs=0)


class TestRecnnParamsIO:
    def test_round_trip_is_exact(self, tmp_path):
        params = init_recnn_params(3, 4, seed=11)
        path = str(tmp_path / "params.txt")
        save_recnn_params(params, path)
        again = load_recnn_params(path)
        assert (again.dim, again.hidden) == (3, 4)
        for name in PARAM_BLOCKS:
            np.testing.assert_array_equal(getattr(again, name), getattr(params, name))

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "params.txt"
        path.write_text("3\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":1: header"):
            load_recnn_params(str(path))

    def test_truncated_file_rejected(self, tmp_path):
        good = tmp_path / "good.txt"
        save_recnn_params(init_recnn_params(2, 2, seed=1), str(good))
        lines = good.read_text(encoding="utf-8").splitlines()
        bad = tmp_path / "bad.txt"
        bad.write_text("\n".join(lines[:-2]) + "\n", encoding="utf-8")
        with pytest.raises(ValueError, match="unexpected end of file"):
            load_recnn_params(str(bad))

    def test_trailing_content_rejected(self, tmp_path):
        good = tmp_path / "good.txt"
        save_recnn_params(init_recnn_params(2, 2, seed=1), str(good))
        bad = tmp_path / "bad.txt"
        bad.write_text(
            good.read_text(encoding="utf-8") + "0.1 0.2\n", encoding="utf-8"
        )
        with pytest.raises(ValueError, match="trailing content"):
            load_recnn_params(str(bad))

    def test_wrong_arity_names_block(self, tmp_path):
        path = tmp_path / "params.txt"
        path.write_text("2 2\n0.1 0.2 0.3\n", encoding="utf-8")
        with pytest.raises(ValueError, match="expected 4 values for w_comp"):
            load_recnn_params(str(path))
