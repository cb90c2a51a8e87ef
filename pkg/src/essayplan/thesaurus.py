"""Rule-based topic expansion over a synonym/antonym/hypernym resource.

Candidates are generated per seed by three rules: synonym-of, hypernym-of,
and antonym-of-an-antonym. Raw antonyms are never emitted. A propagation
round turns the words found so far into fresh seeds; a word's confidence is
the number of distinct (seed, rule) derivations that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

RELATIONS = ("syn", "ant", "hyper")

RULE_SYNONYM = "synonym"
RULE_HYPERNYM = "hypernym"
RULE_ANTONYM_OF_ANTONYM = "antonym_of_antonym"


@dataclass(frozen=True)
class ThesaurusEntry:
    synonyms: frozenset = frozenset()
    antonyms: frozenset = frozenset()
    hypernyms: frozenset = frozenset()


@dataclass(frozen=True)
class Thesaurus:
    """word -> relation sets; no relation set may contain its head word."""

    entries: dict

    def __post_init__(self):
        for head, entry in self.entries.items():
            for relation in (entry.synonyms, entry.antonyms, entry.hypernyms):
                if head in relation:
                    raise ValueError(
                        f"thesaurus entry {head!r} lists itself as a relation"
                    )

    def __contains__(self, word: str) -> bool:
        return word in self.entries


@dataclass(frozen=True)
class ThesExpansionConfig:
    depth: int = 1
    min_token_length: int = 2
    min_score: int = 1
    max_words: int = 50

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if self.min_token_length < 0:
            raise ValueError("min_token_length must be >= 0")
        if self.min_score < 1:
            raise ValueError(f"min_score must be >= 1, got {self.min_score}")
        if self.max_words < 1:
            raise ValueError(f"max_words must be >= 1, got {self.max_words}")


def load_thesaurus(path: str) -> Thesaurus:
    """Read a TSV relation file: one "<head>\\t<relation>\\t<word>" per line.

    Relations are syn, ant, hyper. Blank lines and '#' comments are skipped,
    and so are self-relations.
    """
    collected: dict[str, dict[str, set]] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            stripped = line.rstrip("\n")
            if not stripped.strip() or stripped.lstrip().startswith("#"):
                continue
            fields = stripped.split("\t")
            if len(fields) != 3:
                raise ValueError(
                    f"{path}:{line_no}: expected 3 tab-separated fields, "
                    f"got {len(fields)}"
                )
            head, relation, word = fields
            if relation not in RELATIONS:
                raise ValueError(
                    f"{path}:{line_no}: unknown relation {relation!r}; "
                    f"expected one of {RELATIONS}"
                )
            if not head or not word:
                raise ValueError(f"{path}:{line_no}: empty head or word")
            if head == word:
                continue
            collected.setdefault(head, {r: set() for r in RELATIONS})[relation].add(word)
    entries = {
        head: ThesaurusEntry(
            synonyms=frozenset(sets["syn"]),
            antonyms=frozenset(sets["ant"]),
            hypernyms=frozenset(sets["hyper"]),
        )
        for head, sets in collected.items()
    }
    return Thesaurus(entries=entries)


def expand_thesaurus(thesaurus: Thesaurus, topic: str, config: ThesExpansionConfig):
    """Expand a topic word into scored related words, best first.

    Each propagation round applies the three rules to every unprocessed seed;
    score(word) counts its distinct (seed, rule) derivations over all rounds.
    Output excludes the topic, is filtered by min_token_length and min_score,
    sorted by (score desc, word asc), and truncated to max_words.
    """
    if topic not in thesaurus:
        raise ValueError(f"topic {topic!r} not present in thesaurus")

    entries = thesaurus.entries
    derivations: set[tuple[str, str, str]] = set()  # (candidate, seed, rule)
    processed: set[str] = set()
    frontier = [topic]
    for _ in range(config.depth):
        found: set[str] = set()
        for seed in frontier:
            if seed in processed or seed not in entries:
                continue
            processed.add(seed)
            entry = entries[seed]
            for word in entry.synonyms:
                derivations.add((word, seed, RULE_SYNONYM))
                found.add(word)
            for word in entry.hypernyms:
                derivations.add((word, seed, RULE_HYPERNYM))
                found.add(word)
            for antonym in entry.antonyms:
                if antonym not in entries:
                    continue
                for word in entries[antonym].antonyms:
                    derivations.add((word, seed, RULE_ANTONYM_OF_ANTONYM))
                    found.add(word)
        frontier = sorted(found - processed)
        if not frontier:
            break

    counts: dict[str, set] = {}
    for candidate, seed, rule in derivations:
        if candidate == topic or len(candidate) < config.min_token_length:
            continue
        counts.setdefault(candidate, set()).add((seed, rule))
    ranked = [
        (word, len(pairs))
        for word, pairs in counts.items()
        if len(pairs) >= config.min_score
    ]
    ranked.sort(key=lambda item: (-item[1], item[0]))
    return ranked[: config.max_words]
