import json

import pytest

from sensesearch.expansion import (
    ExpandedQuery,
    SyntaxProfile,
    UnknownSyntaxProfileError,
    expand_query,
    render_query,
)
from sensesearch.lexicon import UnknownSenseError, load_lexicon


def test_all_senses_is_passthrough(mini_java):
    q = expand_query(mini_java, "java", "all")
    assert q == ExpandedQuery("java", None, (), "none")
    assert render_query(q) == "java"


def test_coffee_sense_expands_with_hyponyms(mini_java):
    q = expand_query(mini_java, "java", "java:n:2")
    assert q.source_relation == "hyponym"
    assert q.expansion_terms == ("espresso", "mocha")
    assert render_query(q) == 'java ("espresso" OR "mocha")'


def test_programming_sense_falls_back_to_hypernyms(mini_java):
    q = expand_query(mini_java, "java", "java:n:3")
    assert q.source_relation == "hypernym"
    assert q.expansion_terms == ("programming language",)
    assert render_query(q) == 'java ("programming language")'


def test_island_sense_uses_hypernym(mini_java):
    q = expand_query(mini_java, "java", "java:n:1")
    assert q.source_relation == "hypernym"
    assert q.expansion_terms == ("island",)


def test_unknown_sense_rejected(mini_java):
    with pytest.raises(UnknownSenseError):
        expand_query(mini_java, "java", "java:n:9")
    with pytest.raises(UnknownSenseError):
        expand_query(mini_java, "java", "island:n:1")


def test_empty_term_rejected(mini_java):
    with pytest.raises(ValueError):
        expand_query(mini_java, "", "all")


def test_cap_limits_terms(mini_java):
    q = expand_query(mini_java, "java", "java:n:2", max_terms=1)
    assert q.expansion_terms == ("espresso",)


def test_hyponym_terms_emptied_by_dedup_fall_back(tmp_path):
    # the only hyponym lemma is the query term itself, so hypernyms win
    path = tmp_path / "degenerate.json"
    path.write_text(
        json.dumps(
            {
                "synsets": [
                    {
                        "id": "A",
                        "pos": "noun",
                        "lemmas": ["thing"],
                        "relations": [["hyponym", "B"], ["hypernym", "C"]],
                    },
                    {"id": "B", "pos": "noun", "lemmas": ["thing"]},
                    {"id": "C", "pos": "noun", "lemmas": ["whole"]},
                ]
            }
        )
    )
    lexicon = load_lexicon(path)
    q = expand_query(lexicon, "thing", "thing:n:1")
    assert q.source_relation == "hypernym"
    assert q.expansion_terms == ("whole",)


def test_cosynonym_fallback_and_passthrough(tmp_path):
    path = tmp_path / "isolated.json"
    path.write_text(
        json.dumps(
            {
                "synsets": [
                    {"id": "A", "pos": "noun", "lemmas": ["solo", "alone"]},
                    {"id": "B", "pos": "noun", "lemmas": ["single"]},
                ]
            }
        )
    )
    lexicon = load_lexicon(path)
    q = expand_query(lexicon, "solo", "solo:n:1")
    assert q.source_relation == "synonym"
    assert q.expansion_terms == ("alone",)
    q = expand_query(lexicon, "single", "single:n:1")
    assert q.is_passthrough
    assert q.source_relation == "none"
    assert render_query(q) == "single"


def test_never_mixes_relations(mini_java):
    for choice in ("java:n:1", "java:n:2", "java:n:3"):
        q = expand_query(mini_java, "java", choice)
        assert q.source_relation in ("hyponym", "hypernym", "synonym", "none")


def test_terms_exclude_original_and_duplicates(mini_java):
    for choice in ("java:n:1", "java:n:2", "java:n:3"):
        q = expand_query(mini_java, "java", choice)
        lowered = [t.lower() for t in q.expansion_terms]
        assert "java" not in lowered
        assert len(set(lowered)) == len(lowered)


def test_determinism(mini_java):
    assert expand_query(mini_java, "java", "java:n:2") == expand_query(
        mini_java, "java", "java:n:2"
    )


def test_unknown_syntax_profile(mini_java):
    q = expand_query(mini_java, "java", "java:n:2")
    with pytest.raises(UnknownSyntaxProfileError):
        render_query(q, syntax="klingon")


def test_custom_syntax_profile(mini_java):
    q = expand_query(mini_java, "java", "java:n:2")
    profiles = {"pipes": SyntaxProfile(name="pipes", or_keyword="|", quote="'")}
    assert render_query(q, "pipes", profiles) == "java ('espresso' | 'mocha')"
