"""Lexical-semantic graph: synsets, senses, and relation queries.

Two on-disk formats are understood:

* a WNDB directory (``index.<pos>`` / ``data.<pos>`` files), and
* a single JSON fixture file (``{"synsets": [...]}``), handy for tests
  and for lexicons that ship without glosses.

After loading, the graph is immutable and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

ALL_SENSES = "all"

POS_NAMES = ("noun", "verb", "adj", "adv")
POS_TO_LETTER = {"noun": "n", "verb": "v", "adj": "a", "adv": "r"}
LETTER_TO_POS = {v: k for k, v in POS_TO_LETTER.items()}

RELATION_TYPES = frozenset(
    {
        "hypernym",
        "hyponym",
        "member-meronym",
        "substance-meronym",
        "part-meronym",
        "member-holonym",
        "substance-holonym",
        "part-holonym",
    }
)

# Each relation and its inverse; the loader closes the graph under these.
RECIPROCAL = {
    "hypernym": "hyponym",
    "hyponym": "hypernym",
    "member-meronym": "member-holonym",
    "substance-meronym": "substance-holonym",
    "part-meronym": "part-holonym",
    "member-holonym": "member-meronym",
    "substance-holonym": "substance-meronym",
    "part-holonym": "part-meronym",
}

# Relation type -> weighting family.
RELATION_FAMILY = {
    "hypernym": "hypernym",
    "hyponym": "hyponym",
    "member-meronym": "meronym",
    "substance-meronym": "meronym",
    "part-meronym": "meronym",
    "member-holonym": "holonym",
    "substance-holonym": "holonym",
    "part-holonym": "holonym",
}

# WNDB pointer symbols we keep. Instance pointers fold into the plain
# relation; every other symbol is parsed and dropped.
_POINTER_MAP = {
    "@": "hypernym",
    "@i": "hypernym",
    "~": "hyponym",
    "~i": "hyponym",
    "%m": "member-meronym",
    "%s": "substance-meronym",
    "%p": "part-meronym",
    "#m": "member-holonym",
    "#s": "substance-holonym",
    "#p": "part-holonym",
}

# ss_type -> pos; adjective satellites are folded into plain adjectives.
_SS_TYPE_TO_POS = {"n": "noun", "v": "verb", "a": "adj", "s": "adj", "r": "adv"}
_WNDB_SUFFIXES = {"noun": "noun", "verb": "verb", "adj": "adj", "adv": "adv"}


class LexiconError(Exception):
    """Base class for lexicon loading and lookup failures."""


class LexiconParseError(LexiconError):
    """A malformed line or record in a lexicon source file."""

    def __init__(self, message: str, path: str = "", line: int = 0, offset: int = 0):
        self.path = path
        self.line = line
        self.offset = offset
        where = f"{path}, line {line}, byte offset {offset}: " if path else ""
        super().__init__(f"{where}{message}")


class UnknownSynsetError(LexiconError):
    pass


class UnknownSenseError(LexiconError):
    pass


def normalize_pos(pos: str) -> str:
    """Accept either a pos name ('noun') or letter ('n'); return the name."""
    if pos in POS_TO_LETTER:
        return pos
    if pos in LETTER_TO_POS:
        return LETTER_TO_POS[pos]
    raise LexiconError(f"unknown part of speech: {pos!r}")


def format_sense_id(lemma: str, pos: str, ordinal: int) -> str:
    return f"{lemma.lower()}:{POS_TO_LETTER[normalize_pos(pos)]}:{ordinal}"


def parse_sense_id(sense_id: str) -> tuple[str, str, int]:
    """Split a '<lemma>:<pos-letter>:<ordinal>' id; inverse of format_sense_id."""
    parts = sense_id.rsplit(":", 2)
    if len(parts) != 3:
        raise UnknownSenseError(f"malformed sense id: {sense_id!r}")
    lemma, letter, ordinal_s = parts
    if not lemma or letter not in LETTER_TO_POS:
        raise UnknownSenseError(f"malformed sense id: {sense_id!r}")
    try:
        ordinal = int(ordinal_s)
    except ValueError:
        raise UnknownSenseError(f"malformed sense id: {sense_id!r}") from None
    if ordinal < 1:
        raise UnknownSenseError(f"sense ordinal must be >= 1: {sense_id!r}")
    return lemma.lower(), LETTER_TO_POS[letter], ordinal


@dataclass(frozen=True)
class Synset:
    """One concept: a set of synonymous lemmas plus typed relations."""

    id: str
    pos: str
    lemmas: tuple[str, ...]
    gloss: str | None
    relations: tuple[tuple[str, str], ...]

    def targets(self, relation_type: str) -> tuple[str, ...]:
        return tuple(t for r, t in self.relations if r == relation_type)


@dataclass(frozen=True)
class Sense:
    """One reading of a lemma: its membership in one synset."""

    lemma: str
    pos: str
    ordinal: int
    synset_id: str

    @property
    def id(self) -> str:
        return format_sense_id(self.lemma, self.pos, self.ordinal)


@dataclass(frozen=True)
class Lexicon:
    """Immutable synset graph with a (lemma, pos) sense index."""

    synsets: dict[str, Synset]
    index: dict[tuple[str, str], tuple[str, ...]]
    source: str

    def synset(self, synset_id: str) -> Synset:
        try:
            return self.synsets[synset_id]
        except KeyError:
            raise UnknownSynsetError(f"unknown synset id: {synset_id!r}") from None

    def senses_of(self, lemma: str, pos: str | None = None) -> list[Sense]:
        """All senses of a lemma in source order, optionally filtered by pos.

        Lookup is case-insensitive; an unknown lemma yields an empty list.
        """
        if not lemma:
            raise LexiconError("lemma must be non-empty")
        key = lemma.lower()
        wanted = POS_NAMES if pos is None else (normalize_pos(pos),)
        senses: list[Sense] = []
        for p in wanted:
            for ordinal, synset_id in enumerate(self.index.get((key, p), ()), start=1):
                senses.append(Sense(key, p, ordinal, synset_id))
        return senses

    def sense(self, sense_id: str) -> Sense:
        """Resolve a canonical sense id; raises UnknownSenseError."""
        lemma, pos, ordinal = parse_sense_id(sense_id)
        synset_ids = self.index.get((lemma, pos), ())
        if ordinal > len(synset_ids):
            raise UnknownSenseError(
                f"{lemma!r} has {len(synset_ids)} {pos} senses, no ordinal {ordinal}"
            )
        return Sense(lemma, pos, ordinal, synset_ids[ordinal - 1])

    def resolve_sense_choice(self, term: str, choice: str) -> str:
        """Map a user sense choice to ALL_SENSES or a canonical sense id.

        Accepts 'all', a bare ordinal ('2'), or a full sense id; a bare
        ordinal is resolved against the term across all parts of speech.
        """
        if choice.lower() == ALL_SENSES:
            return ALL_SENSES
        if choice.isdigit():
            senses = self.senses_of(term)
            ordinal = int(choice)
            if not 1 <= ordinal <= len(senses):
                raise UnknownSenseError(
                    f"{term!r} has {len(senses)} senses, no ordinal {ordinal}"
                )
            return senses[ordinal - 1].id
        sense = self.sense(choice)
        if sense.lemma != term.lower():
            raise UnknownSenseError(f"sense {choice!r} does not belong to {term!r}")
        return sense.id

    def related(self, synset_id: str, relation_type: str) -> list[Synset]:
        """Directly related synsets, in stored order."""
        if relation_type not in RELATION_TYPES:
            raise LexiconError(f"unknown relation type: {relation_type!r}")
        return [self.synset(t) for t in self.synset(synset_id).targets(relation_type)]

    def hypernym_paths(self, synset_id: str) -> list[list[str]]:
        """All maximal upward hypernym paths, nearest synset first.

        A synset with no hypernyms yields a single empty path. Cycles are
        broken by never revisiting a synset within one path.
        """
        self.synset(synset_id)

        def walk(current: str, visited: frozenset[str]) -> list[list[str]]:
            parents = [
                t
                for t in self.synsets[current].targets("hypernym")
                if t not in visited
            ]
            if not parents:
                return [[]]
            paths = []
            for parent in parents:
                for tail in walk(parent, visited | {parent}):
                    paths.append([parent] + tail)
            return paths

        return walk(synset_id, frozenset({synset_id}))

    def sense_summary(self, sense: Sense) -> str:
        """Gloss of the sense's synset, or a relation-based fallback.

        Sources without glosses get "hypernyms: ...; hyponyms: ..." built
        from direct relations, each lemma list capped at 5.
        """
        synset = self.synset(sense.synset_id)
        if synset.gloss:
            return synset.gloss

        def lemma_list(relation_type: str) -> str:
            lemmas: list[str] = []
            for target in synset.targets(relation_type):
                lemmas.extend(self.synsets[target].lemmas)
            return ", ".join(lemmas[:5]) if lemmas else "(none)"

        return f"hypernyms: {lemma_list('hypernym')}; hyponyms: {lemma_list('hyponym')}"

    def sense_overview(self, lemma: str) -> list[tuple[Sense, str]]:
        """One (sense, summary) entry per sense across all parts of speech."""
        return [(s, self.sense_summary(s)) for s in self.senses_of(lemma)]

    def to_fixture_dict(self) -> dict:
        """Serialize to the JSON fixture format (round-trips the graph)."""
        synsets = []
        for synset in self.synsets.values():
            record: dict = {
                "id": synset.id,
                "pos": synset.pos,
                "lemmas": list(synset.lemmas),
            }
            if synset.gloss is not None:
                record["gloss"] = synset.gloss
            record["relations"] = [list(edge) for edge in synset.relations]
            synsets.append(record)
        return {"synsets": synsets}


# ---------------------------------------------------------------------------
# Loading


def load_lexicon(source: str | Path) -> Lexicon:
    """Load a lexicon from a WNDB directory or a JSON fixture file."""
    path = Path(source)
    if path.is_dir():
        return _load_wndb_dir(path)
    if path.is_file():
        return _load_fixture_file(path)
    raise LexiconError(f"lexicon source not found: {source}")


def _link(
    raw_synsets: dict[str, tuple[str, tuple[str, ...], str | None, list[tuple[str, str]]]],
    index: dict[tuple[str, str], tuple[str, ...]],
    source: str,
) -> Lexicon:
    """Validate relations, add reciprocal edges, and freeze the graph."""
    relations = {sid: list(entry[3]) for sid, entry in raw_synsets.items()}
    for sid, edges in relations.items():
        for rel, target in edges:
            if target == sid:
                raise LexiconError(f"self-loop {rel} on synset {sid} in {source}")
            if target not in raw_synsets:
                raise LexiconError(
                    f"dangling relation target {target!r} ({rel} from {sid}) in {source}"
                )
    for sid in list(relations):
        for rel, target in list(relations[sid]):
            back = (RECIPROCAL[rel], sid)
            if back not in relations[target]:
                relations[target].append(back)

    synsets = {
        sid: Synset(sid, pos, lemmas, gloss, tuple(relations[sid]))
        for sid, (pos, lemmas, gloss, _) in raw_synsets.items()
    }
    for (lemma, pos), synset_ids in index.items():
        for sid in synset_ids:
            if sid not in synsets:
                raise LexiconError(
                    f"index entry ({lemma!r}, {pos}) references missing synset {sid}"
                )
    return Lexicon(synsets=synsets, index=index, source=source)


# -- JSON fixture format ----------------------------------------------------


def _load_fixture_file(path: Path) -> Lexicon:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise LexiconError(f"cannot read lexicon file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LexiconParseError(exc.msg, str(path), exc.lineno, exc.pos) from exc

    if not isinstance(data, dict) or not isinstance(data.get("synsets"), list):
        raise LexiconError(f"{path}: fixture must be an object with a 'synsets' list")

    raw: dict[str, tuple[str, tuple[str, ...], str | None, list[tuple[str, str]]]] = {}
    index: dict[tuple[str, str], list[str]] = {}
    for i, record in enumerate(data["synsets"]):
        try:
            sid = record["id"]
            pos = normalize_pos(record["pos"])
            lemmas = tuple(record["lemmas"])
            gloss = record.get("gloss")
            edges = [(rel, target) for rel, target in record.get("relations", [])]
        except (KeyError, TypeError, ValueError, LexiconError) as exc:
            raise LexiconError(f"{path}: bad synset record #{i}: {exc}") from exc
        if not lemmas or not all(isinstance(l, str) and l for l in lemmas):
            raise LexiconError(f"{path}: synset {sid!r} needs at least one lemma")
        for rel, _ in edges:
            if rel not in RELATION_TYPES:
                raise LexiconError(f"{path}: synset {sid!r}: unknown relation {rel!r}")
        if sid in raw:
            raise LexiconError(f"{path}: duplicate synset id {sid!r}")
        raw[sid] = (pos, lemmas, gloss, edges)
        for lemma in lemmas:
            index.setdefault((lemma.lower(), pos), [])
            if sid not in index[(lemma.lower(), pos)]:
                index[(lemma.lower(), pos)].append(sid)

    frozen_index = {key: tuple(ids) for key, ids in index.items()}
    return _link(raw, frozen_index, str(path))


# -- WNDB directory format --------------------------------------------------


def _wndb_synset_id(pos_letter: str, offset: str) -> str:
    # Satellites live in the adjective data file, so 's' shares its namespace.
    letter = "a" if pos_letter == "s" else pos_letter
    return f"{letter}{offset}"


def _clean_wndb_lemma(word: str) -> str:
    # Drop adjective syntax markers like "(p)" and restore spaces.
    if word.endswith(")") and "(" in word:
        word = word[: word.rindex("(")]
    return word.replace("_", " ")


def parse_data_line(line: str, pos: str | None = None) -> Synset:
    """Parse one WNDB data.<pos> line into an (unlinked) Synset.

    Honors the hypernym/hyponym/meronym/holonym pointer symbols and drops
    the rest; the gloss after '|' is required by the format.
    """
    if "|" not in line:
        raise LexiconError("missing '|' gloss separator")
    columns, gloss = line.split("|", 1)
    fields = columns.split()
    try:
        offset = fields[0]
        ss_type = fields[2]
        synset_pos = _SS_TYPE_TO_POS[ss_type]
        w_cnt = int(fields[3], 16)
        lemmas = tuple(
            _clean_wndb_lemma(fields[4 + 2 * i]) for i in range(w_cnt)
        )
        cursor = 4 + 2 * w_cnt
        p_cnt = int(fields[cursor])
        cursor += 1
        edges: list[tuple[str, str]] = []
        for _ in range(p_cnt):
            symbol, target_offset, target_pos, _src_tgt = fields[cursor : cursor + 4]
            cursor += 4
            rel = _POINTER_MAP.get(symbol)
            if rel is not None:
                edges.append((rel, _wndb_synset_id(target_pos, target_offset)))
    except (IndexError, KeyError, ValueError) as exc:
        raise LexiconError(f"malformed data line: {exc}") from exc
    if pos is not None and synset_pos != normalize_pos(pos):
        raise LexiconError(f"ss_type {ss_type!r} does not match data.{pos}")
    if not lemmas:
        raise LexiconError("synset has no words")
    sid = _wndb_synset_id(ss_type, offset)
    # Lemma-level pointers can repeat a relation; keep the first of each.
    deduped: list[tuple[str, str]] = []
    for edge in edges:
        if edge not in deduped and edge[1] != sid:
            deduped.append(edge)
    return Synset(sid, synset_pos, lemmas, gloss.strip(), tuple(deduped))


def _parse_index_line(line: str, pos: str) -> tuple[str, list[str]]:
    fields = line.split()
    try:
        lemma = _clean_wndb_lemma(fields[0]).lower()
        synset_cnt = int(fields[2])
        p_cnt = int(fields[3])
        offsets = fields[4 + p_cnt + 2 : 4 + p_cnt + 2 + synset_cnt]
        if len(offsets) != synset_cnt:
            raise ValueError("offset count mismatch")
    except (IndexError, ValueError) as exc:
        raise LexiconError(f"malformed index line: {exc}") from exc
    letter = POS_TO_LETTER[pos]
    return lemma, [_wndb_synset_id(letter, off) for off in offsets]


def _iter_wndb_lines(path: Path):
    """Yield (line_no, byte_offset, line) skipping the license header."""
    offset = 0
    with path.open("r", encoding="utf-8", errors="replace") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.startswith(" ") and line.strip():
                yield line_no, offset, line.rstrip("\n")
            offset += len(line.encode("utf-8"))


def _load_wndb_dir(path: Path) -> Lexicon:
    raw: dict[str, tuple[str, tuple[str, ...], str | None, list[tuple[str, str]]]] = {}
    index: dict[tuple[str, str], tuple[str, ...]] = {}
    found = False
    for pos, suffix in _WNDB_SUFFIXES.items():
        data_path = path / f"data.{suffix}"
        index_path = path / f"index.{suffix}"
        if not data_path.is_file() or not index_path.is_file():
            continue
        found = True
        for line_no, byte_offset, line in _iter_wndb_lines(data_path):
            try:
                synset = parse_data_line(line, pos)
            except LexiconError as exc:
                raise LexiconParseError(
                    str(exc), str(data_path), line_no, byte_offset
                ) from exc
            raw[synset.id] = (synset.pos, synset.lemmas, synset.gloss, list(synset.relations))
        for line_no, byte_offset, line in _iter_wndb_lines(index_path):
            try:
                lemma, synset_ids = _parse_index_line(line, pos)
            except LexiconError as exc:
                raise LexiconParseError(
                    str(exc), str(index_path), line_no, byte_offset
                ) from exc
            index[(lemma, pos)] = tuple(synset_ids)
    if not found:
        raise LexiconError(f"no index/data file pairs found in {path}")
    return _link(raw, index, str(path))
