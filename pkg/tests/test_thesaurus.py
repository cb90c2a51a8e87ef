"""Thesaurus loading and rule-based topic expansion."""

import pytest

from essayplan.thesaurus import (
    ThesExpansionConfig,
    Thesaurus,
    ThesaurusEntry,
    expand_thesaurus,
    load_thesaurus,
)


def build(entries):
    return Thesaurus(entries={
        head: ThesaurusEntry(
            synonyms=frozenset(spec.get("syn", ())),
            antonyms=frozenset(spec.get("ant", ())),
            hypernyms=frozenset(spec.get("hyper", ())),
        )
        for head, spec in entries.items()
    })


class TestThesaurus:
    def test_contains(self):
        thesaurus = build({"music": {"syn": ["melody"]}})
        assert "music" in thesaurus
        assert "melody" not in thesaurus

    def test_self_relation_rejected(self):
        with pytest.raises(ValueError, match="lists itself"):
            build({"music": {"syn": ["music"]}})


class TestLoadThesaurus:
    def test_parses_relations(self, tmp_path):
        path = tmp_path / "thes.tsv"
        path.write_text(
            "# comment\n"
            "music\tsyn\tmelody\n"
            "music\thyper\tart\n"
            "\n"
            "music\tant\tnoise\n"
            "music\tsyn\tmusic\n",  # self-relation: silently skipped
            encoding="utf-8",
        )
        thesaurus = load_thesaurus(str(path))
        entry = thesaurus.entries["music"]
        assert entry.synonyms == {"melody"}
        assert entry.hypernyms == {"art"}
        assert entry.antonyms == {"noise"}

    def test_wrong_arity_names_line(self, tmp_path):
        path = tmp_path / "thes.tsv"
        path.write_text("music\tsyn\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":1: expected 3"):
            load_thesaurus(str(path))

    def test_unknown_relation_rejected(self, tmp_path):
        path = tmp_path / "thes.tsv"
        path.write_text("music\tmeronym\tkey\n", encoding="utf-8")
        with pytest.raises(ValueError, match="unknown relation 'meronym'"):
            load_thesaurus(str(path))

    def test_empty_field_rejected(self, tmp_path):
        path = tmp_path / "thes.tsv"
        path.write_text("music\tsyn\t\n", encoding="utf-8")
        with pytest.raises(ValueError, match="empty head or word"):
            load_thesaurus(str(path))


class TestExpandThesaurus:
    """Three derivation rules; score counts distinct (seed, rule) derivations."""

    thesaurus = build({
        "a": {"syn": ["b", "c"], "ant": ["x"]},
        "x": {"ant": ["a", "d"]},
        "b": {"syn": ["c"]},
    })

    def test_depth_one_rules(self):
        result = expand_thesaurus(self.thesaurus, "a", ThesExpansionConfig(
            depth=1, min_token_length=1))
        # synonyms b and c, antonym-of-antonym d; the topic itself is excluded
        assert result == [("b", 1), ("c", 1), ("d", 1)]

    def test_raw_antonyms_never_emitted(self):
        words = [w for w, _ in expand_thesaurus(
            self.thesaurus, "a", ThesExpansionConfig(depth=2, min_token_length=1))]
        assert "x" not in words

    def test_second_round_adds_derivations(self):
        result = expand_thesaurus(self.thesaurus, "a", ThesExpansionConfig(
            depth=2, min_token_length=1))
        # c is reachable from both a and b, so it scores 2 and ranks first
        assert result == [("c", 2), ("b", 1), ("d", 1)]

    def test_hypernym_rule(self):
        thesaurus = build({"tune": {"hyper": ["music"]}})
        result = expand_thesaurus(thesaurus, "tune", ThesExpansionConfig())
        assert result == [("music", 1)]

    def test_min_score_filter(self):
        result = expand_thesaurus(self.thesaurus, "a", ThesExpansionConfig(
            depth=2, min_token_length=1, min_score=2))
        assert result == [("c", 2)]

    def test_min_token_length_filter(self):
        thesaurus = build({"big": {"syn": ["go", "vast"]}})
        result = expand_thesaurus(thesaurus, "big", ThesExpansionConfig(
            min_token_length=3))
        assert result == [("vast", 1)]

    def test_max_words_truncates(self):
        result = expand_thesaurus(self.thesaurus, "a", ThesExpansionConfig(
            depth=1, min_token_length=1, max_words=2))
        assert [w for w, _ in result] == ["b", "c"]

    def test_unknown_topic_rejected(self):
        with pytest.raises(ValueError, match="'zzz' not present"):
            expand_thesaurus(self.thesaurus, "zzz", ThesExpansionConfig())

    def test_config_validation(self):
        with pytest.raises(ValueError, match="depth"):
            ThesExpansionConfig(depth=0)
        with pytest.raises(ValueError, match="min_score"):
            ThesExpansionConfig(min_score=0)
        with pytest.raises(ValueError, match="max_words"):
            ThesExpansionConfig(max_words=0)
