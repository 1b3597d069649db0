import json

import pytest

from sensesearch.lexicon import (
    LexiconError,
    LexiconParseError,
    UnknownSenseError,
    UnknownSynsetError,
    format_sense_id,
    load_lexicon,
    parse_data_line,
    parse_sense_id,
)

from conftest import MINI_JAVA


class TestFixtureLoading:
    def test_mini_java_shape(self, mini_java):
        assert len(mini_java.synsets) == 15
        assert mini_java.source.endswith("mini-java.json")

    def test_empty_fixture(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text('{"synsets":[]}')
        lexicon = load_lexicon(path)
        assert lexicon.synsets == {}
        assert lexicon.senses_of("anything") == []

    def test_missing_file(self, tmp_path):
        with pytest.raises(LexiconError):
            load_lexicon(tmp_path / "nope.json")

    def test_malformed_json_reports_location(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"synsets": [\n  {"id": }\n]}')
        with pytest.raises(LexiconParseError) as excinfo:
            load_lexicon(path)
        assert excinfo.value.line == 2
        assert str(path) in str(excinfo.value)

    def test_dangling_relation_rejected(self, tmp_path):
        path = tmp_path / "dangling.json"
        path.write_text(
            '{"synsets":[{"id":"A","pos":"noun","lemmas":["a"],'
            '"relations":[["hypernym","MISSING"]]}]}'
        )
        with pytest.raises(LexiconError, match="dangling"):
            load_lexicon(path)

    def test_self_loop_rejected(self, tmp_path):
        path = tmp_path / "loop.json"
        path.write_text(
            '{"synsets":[{"id":"A","pos":"noun","lemmas":["a"],'
            '"relations":[["hypernym","A"]]}]}'
        )
        with pytest.raises(LexiconError, match="self-loop"):
            load_lexicon(path)

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "dup.json"
        record = '{"id":"A","pos":"noun","lemmas":["a"],"relations":[]}'
        path.write_text(f'{{"synsets":[{record},{record}]}}')
        with pytest.raises(LexiconError, match="duplicate"):
            load_lexicon(path)


class TestSenses:
    def test_java_has_three_noun_senses(self, mini_java):
        senses = mini_java.senses_of("java", "noun")
        assert [s.ordinal for s in senses] == [1, 2, 3]
        assert [s.id for s in senses] == ["java:n:1", "java:n:2", "java:n:3"]

    def test_lookup_is_case_insensitive(self, mini_java):
        assert mini_java.senses_of("JaVa") == mini_java.senses_of("java")

    def test_unknown_lemma_yields_empty(self, mini_java):
        assert mini_java.senses_of("qwxzv") == []

    def test_order_stable_across_calls(self, mini_java):
        assert mini_java.senses_of("java") == mini_java.senses_of("java")

    def test_sense_id_roundtrip(self, mini_java):
        for sense in mini_java.senses_of("java"):
            lemma, pos, ordinal = parse_sense_id(sense.id)
            assert (lemma, pos, ordinal) == (sense.lemma, sense.pos, sense.ordinal)
            assert format_sense_id(lemma, pos, ordinal) == sense.id

    def test_multiword_sense_id_roundtrip(self, mini_java):
        (sense,) = mini_java.senses_of("programming language")
        assert sense.id == "programming language:n:1"
        assert parse_sense_id(sense.id) == ("programming language", "noun", 1)

    def test_unknown_sense_id(self, mini_java):
        with pytest.raises(UnknownSenseError):
            mini_java.sense("java:n:9")
        with pytest.raises(UnknownSenseError):
            mini_java.sense("not-a-sense")

    def test_resolve_sense_choice(self, mini_java):
        assert mini_java.resolve_sense_choice("java", "all") == "all"
        assert mini_java.resolve_sense_choice("java", "2") == "java:n:2"
        assert mini_java.resolve_sense_choice("java", "java:n:3") == "java:n:3"
        with pytest.raises(UnknownSenseError):
            mini_java.resolve_sense_choice("java", "9")
        with pytest.raises(UnknownSenseError):
            mini_java.resolve_sense_choice("java", "island:n:1")


class TestSummaries:
    def test_gloss_is_returned_verbatim(self, mini_java):
        sense = mini_java.sense("java:n:2")
        assert mini_java.sense_summary(sense) == (
            "a beverage consisting of an infusion of ground coffee beans"
        )

    def test_fallback_uses_direct_relations(self, tmp_path):
        path = tmp_path / "nogloss.json"
        path.write_text(
            json.dumps(
                {
                    "synsets": [
                        {
                            "id": "X",
                            "pos": "noun",
                            "lemmas": ["java"],
                            "relations": [
                                ["hypernym", "H"],
                                ["hyponym", "E"],
                                ["hyponym", "M"],
                            ],
                        },
                        {"id": "H", "pos": "noun", "lemmas": ["beverage", "drink"]},
                        {"id": "E", "pos": "noun", "lemmas": ["espresso"]},
                        {"id": "M", "pos": "noun", "lemmas": ["mocha"]},
                    ]
                }
            )
        )
        lexicon = load_lexicon(path)
        sense = lexicon.sense("java:n:1")
        assert lexicon.sense_summary(sense) == (
            "hypernyms: beverage, drink; hyponyms: espresso, mocha"
        )

    def test_fallback_isolated_synset(self, tmp_path):
        path = tmp_path / "isolated.json"
        path.write_text(
            '{"synsets":[{"id":"A","pos":"noun","lemmas":["solo"],"relations":[]}]}'
        )
        lexicon = load_lexicon(path)
        summary = lexicon.sense_summary(lexicon.sense("solo:n:1"))
        assert summary == "hypernyms: (none); hyponyms: (none)"

    def test_summary_never_empty(self, mini_java):
        for key in mini_java.index:
            for sense in mini_java.senses_of(key[0]):
                assert mini_java.sense_summary(sense)

    def test_overview_matches_fixture_glosses(self, mini_java):
        entries = mini_java.sense_overview("java")
        assert len(entries) == 3
        fixture = json.loads(MINI_JAVA.read_text())
        glosses = [s["gloss"] for s in fixture["synsets"][:3]]
        assert [summary for _, summary in entries] == glosses

    def test_overview_unknown_lemma(self, mini_java):
        assert mini_java.sense_overview("qwxzv") == []


class TestRelations:
    def test_related_in_stored_order(self, mini_java):
        assert [s.id for s in mini_java.related("S2", "hyponym")] == ["S13", "S14"]
        assert [s.id for s in mini_java.related("S1", "hypernym")] == ["S4"]

    def test_absent_relation_is_empty(self, mini_java):
        assert mini_java.related("S2", "part-meronym") == []

    def test_unknown_synset(self, mini_java):
        with pytest.raises(UnknownSynsetError):
            mini_java.related("S99", "hypernym")
        with pytest.raises(UnknownSynsetError):
            mini_java.hypernym_paths("S99")

    def test_symmetric_closure(self, mini_java):
        from sensesearch.lexicon import RECIPROCAL

        for synset in mini_java.synsets.values():
            for rel, target in synset.relations:
                back = mini_java.synsets[target].targets(RECIPROCAL[rel])
                assert synset.id in back

    def test_part_holonym_closure(self, mini_java):
        assert [s.id for s in mini_java.related("S15", "part-meronym")] == ["S1"]

    def test_hypernym_paths(self, mini_java):
        island = mini_java.sense("java:n:1").synset_id
        assert mini_java.hypernym_paths(island) == [["S4", "S5", "S7", "S8"]]
        coffee = mini_java.sense("java:n:2").synset_id
        assert mini_java.hypernym_paths(coffee) == [["S6", "S9", "S8"]]

    def test_root_has_single_empty_path(self, mini_java):
        assert mini_java.hypernym_paths("S8") == [[]]

    def test_cycle_is_broken(self, tmp_path):
        path = tmp_path / "cycle.json"
        path.write_text(
            json.dumps(
                {
                    "synsets": [
                        {"id": "A", "pos": "noun", "lemmas": ["a"], "relations": [["hypernym", "B"]]},
                        {"id": "B", "pos": "noun", "lemmas": ["b"], "relations": [["hypernym", "A"]]},
                    ]
                }
            )
        )
        lexicon = load_lexicon(path)
        assert lexicon.hypernym_paths("A") == [["B"]]


class TestRoundTrip:
    def test_fixture_roundtrip_is_graph_identical(self, mini_java, tmp_path):
        out = tmp_path / "rt.json"
        out.write_text(json.dumps(mini_java.to_fixture_dict()))
        reparsed = load_lexicon(out)
        assert reparsed.synsets == mini_java.synsets
        assert reparsed.index == mini_java.index


class TestWndb:
    SPEC_FRAGMENT = (
        "00000003 06 n 02 java 0 coffee 0 002 @ 00000006 n 0000 ~ 00000013 n 0000 "
        "| a beverage consisting of coffee"
    )

    def test_fragment_parses_to_specified_synset(self):
        synset = parse_data_line(self.SPEC_FRAGMENT)
        assert synset.id == "n00000003"
        assert synset.lemmas == ("java", "coffee")
        assert synset.targets("hypernym") == ("n00000006",)
        assert synset.targets("hyponym") == ("n00000013",)
        assert synset.gloss == "a beverage consisting of coffee"

    def test_fragment_missing_gloss_rejected(self):
        with pytest.raises(LexiconError):
            parse_data_line("00000003 06 n 01 java 0 000")

    def test_underscores_become_spaces(self):
        line = "00000010 06 n 01 programming_language 0 000 | gloss text"
        assert parse_data_line(line).lemmas == ("programming language",)

    def test_instance_pointers_fold(self):
        line = "00000001 06 n 01 x 0 002 @i 00000002 n 0000 ~i 00000003 n 0000 | g"
        synset = parse_data_line(line)
        assert synset.targets("hypernym") == ("n00000002",)
        assert synset.targets("hyponym") == ("n00000003",)

    def test_unhonored_pointers_dropped(self):
        line = "00000001 06 n 01 x 0 002 ! 00000002 n 0101 = 00000003 n 0000 | g"
        assert parse_data_line(line).relations == ()

    def test_mini_wndb_matches_fixture_graph(self, mini_wndb, mini_java):
        lexicon = load_lexicon(mini_wndb)
        senses = lexicon.senses_of("java", "noun")
        assert [s.id for s in senses] == ["java:n:1", "java:n:2", "java:n:3"]
        chain = lexicon.hypernym_paths(senses[1].synset_id)
        lemma_chain = [lexicon.synsets[sid].lemmas[0] for sid in chain[0]]
        assert lemma_chain == ["beverage", "food", "entity"]
        assert lexicon.senses_of("brew", "verb")[0].id == "brew:v:1"
        # graph shape mirrors the JSON fixture lemma-for-lemma
        for key, synset_ids in mini_java.index.items():
            wndb_ids = lexicon.index.get(key, ())
            assert len(wndb_ids) == len(synset_ids)
            for sid_fixture, sid_wndb in zip(synset_ids, wndb_ids):
                assert set(mini_java.synsets[sid_fixture].lemmas) == set(
                    lexicon.synsets[sid_wndb].lemmas
                )

    def test_wndb_roundtrips_through_fixture_format(self, mini_wndb, tmp_path):
        lexicon = load_lexicon(mini_wndb)
        out = tmp_path / "wndb-rt.json"
        out.write_text(json.dumps(lexicon.to_fixture_dict()))
        reparsed = load_lexicon(out)
        assert reparsed.synsets == lexicon.synsets
        assert reparsed.index == lexicon.index

    def test_malformed_line_reports_location(self, mini_wndb):
        data = mini_wndb / "data.noun"
        content = data.read_text()
        data.write_text(content + "00000099 06 n ZZ broken 0 000 | bad count\n")
        with pytest.raises(LexiconParseError) as excinfo:
            load_lexicon(mini_wndb)
        err = excinfo.value
        assert err.path.endswith("data.noun")
        assert err.line == len(content.splitlines()) + 1
        assert err.offset == len(content.encode())

    def test_empty_dir_rejected(self, tmp_path):
        with pytest.raises(LexiconError, match="no index/data"):
            load_lexicon(tmp_path)
