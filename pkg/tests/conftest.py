import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sensesearch.config import load_config
from sensesearch.lexicon import load_lexicon
from sensesearch.service import build_context

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"
MINI_JAVA = FIXTURES / "mini-java.json"
CORPUS_DIR = FIXTURES / "corpus"
CONFIG_FILE = FIXTURES / "config.yaml"


@pytest.fixture(scope="session")
def mini_java():
    return load_lexicon(MINI_JAVA)


@pytest.fixture(scope="session")
def app_config():
    return load_config(CONFIG_FILE)


@pytest.fixture()
def context(app_config):
    return build_context(app_config)


@pytest.fixture()
def client(context):
    from fastapi.testclient import TestClient

    from sensesearch.service import create_app

    app = create_app(context=context)
    with TestClient(app) as test_client:
        yield test_client


def write_mini_wndb(directory: Path) -> Path:
    """A tiny WNDB directory mirroring the mini-java fixture graph.

    Noun synsets use offsets 00000001..00000015 in fixture order, plus a
    one-synset verb file to exercise multi-pos handling.
    """
    directory.mkdir(parents=True, exist_ok=True)
    data_noun = [
        "00000001 06 n 01 java 0 002 @ 00000004 n 0000 #p 00000015 n 0000 "
        "| an island in Indonesia to the south of Borneo",
        "00000002 06 n 01 java 0 003 @ 00000006 n 0000 ~ 00000013 n 0000 ~ 00000014 n 0000 "
        "| a beverage consisting of an infusion of ground coffee beans",
        "00000003 06 n 01 java 0 001 @i 00000010 n 0000 "
        "| a platform-independent object-oriented programming language",
        "00000004 06 n 01 island 0 001 @ 00000005 n 0000 | a land mass surrounded by water",
        "00000005 06 n 01 land 0 001 @ 00000007 n 0000 | the solid part of the earth",
        "00000006 06 n 02 beverage 0 drink 0 001 @ 00000009 n 0000 | any liquid suitable for drinking",
        "00000007 06 n 01 object 0 001 @ 00000008 n 0000 | a tangible and visible entity",
        "00000008 06 n 01 entity 0 000 | that which has distinct existence",
        "00000009 06 n 01 food 0 001 @ 00000008 n 0000 | any substance that gives energy",
        "00000010 06 n 01 programming_language 0 001 @ 00000011 n 0000 "
        "| a language for expressing computer programs",
        "00000011 06 n 01 language 0 001 @ 00000012 n 0000 | a systematic means of communicating",
        "00000012 06 n 01 abstraction 0 000 | a general concept",
        "00000013 06 n 01 espresso 0 000 | strong coffee brewed under pressure",
        "00000014 06 n 01 mocha 0 000 | coffee flavored with chocolate",
        "00000015 06 n 01 indonesia 0 000 | a republic on an archipelago",
    ]
    index_noun = [
        "abstraction n 1 0 1 0 00000012",
        "beverage n 1 1 @ 1 0 00000006",
        "drink n 1 1 @ 1 0 00000006",
        "entity n 1 0 1 0 00000008",
        "espresso n 1 1 @ 1 0 00000013",
        "food n 1 1 @ 1 0 00000009",
        "indonesia n 1 0 1 0 00000015",
        "island n 1 1 @ 1 0 00000004",
        "java n 3 1 @ 3 0 00000001 00000002 00000003",
        "land n 1 1 @ 1 0 00000005",
        "language n 1 1 @ 1 0 00000011",
        "mocha n 1 1 @ 1 0 00000014",
        "object n 1 1 @ 1 0 00000007",
        "programming_language n 1 1 @ 1 0 00000010",
    ]
    data_verb = [
        "00000021 29 v 01 brew 0 000 01 + 08 00 | prepare by steeping in hot water",
    ]
    index_verb = [
        "brew v 1 0 1 0 00000021",
    ]
    header = "  1 This is a generated test lexicon; header lines start with spaces.\n"
    (directory / "data.noun").write_text(header + "\n".join(data_noun) + "\n")
    (directory / "index.noun").write_text(header + "\n".join(index_noun) + "\n")
    (directory / "data.verb").write_text(header + "\n".join(data_verb) + "\n")
    (directory / "index.verb").write_text(header + "\n".join(index_verb) + "\n")
    return directory


@pytest.fixture()
def mini_wndb(tmp_path):
    return write_mini_wndb(tmp_path / "wndb")
