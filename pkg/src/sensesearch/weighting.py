"""Post-filter mode: weighted concept profiles and document ranking.

For every sense of the query term, the lemmas reachable through hypernym,
hyponym, meronym, and holonym relations form a concept profile whose
weights decay with relation depth. Documents are scored as the weighted
sum of concept occurrences and presented as a per-sense ranking table.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

from .lexicon import ALL_SENSES, Lexicon, RELATION_FAMILY, Sense, UnknownSenseError

BEST = "best"

LENGTH_NORMS = ("none", "log", "linear")
RELATION_FAMILIES = ("hypernym", "hyponym", "meronym", "holonym")

_TOKEN_RE = re.compile(r"[^\W_]+")


def _default_relation_base() -> dict[str, float]:
    return {"hypernym": 0.6, "hyponym": 0.8, "meronym": 0.4, "holonym": 0.4}


@dataclass
class ScoringConfig:
    """Tunable knobs of the weighting algorithm; defaults mirror the docs."""

    relation_base: dict[str, float] = field(default_factory=_default_relation_base)
    depth_decay: float = 0.5
    hyponym_depth_limit: int = 2
    meronym_holonym_depth_limit: int = 1
    joint_ancestor_discount: bool = True
    negative_factor: float = 0.5
    length_norm: str = "log"
    tfidf: bool = False
    profile_cap: int = 500
    include_self_synonyms: bool = True

    def validate(self) -> None:
        for family in RELATION_FAMILIES:
            value = self.relation_base.get(family)
            if value is None or not math.isfinite(value) or value < 0:
                raise ValueError(f"relation_base[{family!r}] must be finite and >= 0")
        if not 0 < self.depth_decay <= 1:
            raise ValueError("depth_decay must be in (0, 1]")
        if self.hyponym_depth_limit < 1 or self.meronym_holonym_depth_limit < 1:
            raise ValueError("depth limits must be >= 1")
        if self.profile_cap < 1:
            raise ValueError("profile_cap must be >= 1")
        if self.negative_factor < 0 or not math.isfinite(self.negative_factor):
            raise ValueError("negative_factor must be finite and >= 0")
        if self.length_norm not in LENGTH_NORMS:
            raise ValueError(f"length_norm must be one of {LENGTH_NORMS}")

    def with_overrides(self, overrides: dict | None) -> "ScoringConfig":
        """New config with the given fields replaced; unknown keys raise."""
        if not overrides:
            return self
        fields = {f for f in self.__dataclass_fields__}
        unknown = set(overrides) - fields
        if unknown:
            raise ValueError(f"unknown scoring fields: {sorted(unknown)}")
        merged = dict(overrides)
        if "relation_base" in merged:
            base = dict(self.relation_base)
            base.update(merged["relation_base"])
            merged["relation_base"] = base
        config = replace(self, **merged)
        config.validate()
        return config


@dataclass
class SenseProfile:
    """Concept lemma -> signed weight map for one sense of the query term."""

    sense_id: str
    entries: dict[str, float]
    provenance: dict[str, tuple[str, int]]


@dataclass
class CorpusStats:
    """Document frequencies over the retrieved result set."""

    n_docs: int
    df: dict[str, int]

    def idf(self, lemma: str) -> float:
        if self.n_docs == 0:
            return 1.0
        return math.log((1 + self.n_docs) / (1 + self.df.get(lemma, 0))) + 1.0


@dataclass
class RankRow:
    url: str
    scores: dict[str, float]
    top_sense: str | None


@dataclass
class RankingTable:
    """Per-document, per-sense score matrix in deterministic order."""

    sense_ids: tuple[str, ...]
    rows: list[RankRow]
    order_key: str


# ---------------------------------------------------------------------------
# Tokenization and counting


def tokenize(text: str) -> list[str]:
    """Case-fold and split on every non-alphanumeric character."""
    return _TOKEN_RE.findall(text.lower())


class _TokenIndex:
    """Token -> positions map for counting many concepts over one document."""

    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.positions: dict[str, list[int]] = {}
        for i, token in enumerate(tokens):
            self.positions.setdefault(token, []).append(i)

    def count(self, sequence: list[str]) -> int:
        """Non-overlapping left-to-right occurrences of a token sequence."""
        starts = self.positions.get(sequence[0])
        if starts is None:
            return 0
        if len(sequence) == 1:
            return len(starts)
        tokens = self.tokens
        count = 0
        next_free = 0
        for start in starts:
            if start < next_free:
                continue
            if tokens[start : start + len(sequence)] == sequence:
                count += 1
                next_free = start + len(sequence)
        return count


def count_concept(tokens: list[str], lemma: str) -> int:
    """Count non-overlapping occurrences of a (possibly multiword) lemma."""
    sequence = tokenize(lemma)
    if not sequence:
        raise ValueError(f"concept lemma {lemma!r} has no tokens")
    return _TokenIndex(tokens).count(sequence)


def corpus_stats(token_lists: list[list[str]], concepts=None) -> CorpusStats:
    """Document frequencies for the given concept lemmas.

    Without an explicit concept list, every distinct single token of the
    corpus is treated as a concept.
    """
    indexes = [_TokenIndex(tokens) for tokens in token_lists]
    if concepts is None:
        concepts = sorted({t for idx in indexes for t in idx.positions})
    df: dict[str, int] = {}
    for lemma in concepts:
        sequence = tokenize(lemma)
        if not sequence:
            continue
        df[lemma] = sum(1 for idx in indexes if idx.count(sequence) > 0)
    return CorpusStats(n_docs=len(token_lists), df=df)


# ---------------------------------------------------------------------------
# Profile construction


def _family_closure(
    lexicon: Lexicon, start: str, relation_types: tuple[str, ...], depth_limit: int
):
    """BFS over one relation family; yields (synset, depth) at minimal depth."""
    visited = {start}
    frontier = [start]
    depth = 0
    while frontier and depth < depth_limit:
        depth += 1
        next_frontier: list[str] = []
        for sid in frontier:
            synset = lexicon.synsets[sid]
            for rel, target in synset.relations:
                if rel in relation_types and target not in visited:
                    visited.add(target)
                    next_frontier.append(target)
                    yield lexicon.synsets[target], depth
        frontier = next_frontier


_FAMILY_RELATIONS = {
    "hypernym": ("hypernym",),
    "hyponym": ("hyponym",),
    "meronym": tuple(r for r, f in RELATION_FAMILY.items() if f == "meronym"),
    "holonym": tuple(r for r, f in RELATION_FAMILY.items() if f == "holonym"),
}


def build_profile(
    lexicon: Lexicon, term: str, sense: Sense, config: ScoringConfig
) -> SenseProfile:
    """Weighted concept profile of one sense, before cross-sense adjustments.

    weight = relation_base[family] * depth_decay^(depth - 1), clamped to 1;
    a lemma reachable over several routes keeps its maximum weight. The
    query lemma itself never enters the profile.
    """
    if sense.lemma != term.lower():
        raise UnknownSenseError(f"sense {sense.id!r} does not belong to {term!r}")
    query_lemma = term.lower()
    candidates: dict[str, tuple[float, str, int]] = {}

    def offer(lemma: str, weight: float, family: str, depth: int) -> None:
        key = lemma.lower()
        if key == query_lemma:
            return
        current = candidates.get(key)
        if current is None or weight > current[0]:
            candidates[key] = (weight, family, depth)

    synset = lexicon.synset(sense.synset_id)
    if config.include_self_synonyms:
        for lemma in synset.lemmas:
            offer(lemma, 1.0, "synonym", 0)

    limits = {
        "hypernym": len(lexicon.synsets),  # chains are short; effectively unbounded
        "hyponym": config.hyponym_depth_limit,
        "meronym": config.meronym_holonym_depth_limit,
        "holonym": config.meronym_holonym_depth_limit,
    }
    for family in RELATION_FAMILIES:
        base = config.relation_base[family]
        for related, depth in _family_closure(
            lexicon, synset.id, _FAMILY_RELATIONS[family], limits[family]
        ):
            weight = min(1.0, base * config.depth_decay ** (depth - 1))
            for lemma in related.lemmas:
                offer(lemma, weight, family, depth)

    ranked = sorted(candidates.items(), key=lambda kv: (-kv[1][0], kv[0]))
    ranked = ranked[: config.profile_cap]
    entries = {lemma: weight for lemma, (weight, _, _) in ranked}
    provenance = {lemma: (family, depth) for lemma, (_, family, depth) in ranked}
    return SenseProfile(sense.id, entries, provenance)


def apply_cross_sense_adjustments(
    profiles: list[SenseProfile], selected: str, config: ScoringConfig
) -> list[SenseProfile]:
    """Joint-ancestor discount plus negative factors for a selected sense.

    Every positive weight is divided by the number of the term's profiles
    containing that lemma. When one sense is selected and the negative
    factor is > 0, each lemma exclusive to the other senses enters the
    selected profile with weight -factor * (its best adjusted weight
    elsewhere).
    """
    shared_count: dict[str, int] = {}
    for profile in profiles:
        for lemma, weight in profile.entries.items():
            if weight > 0:
                shared_count[lemma] = shared_count.get(lemma, 0) + 1

    adjusted: list[SenseProfile] = []
    for profile in profiles:
        entries = dict(profile.entries)
        if config.joint_ancestor_discount:
            entries = {
                lemma: (w / shared_count[lemma] if w > 0 else w)
                for lemma, w in entries.items()
            }
        adjusted.append(SenseProfile(profile.sense_id, entries, dict(profile.provenance)))

    if selected != ALL_SENSES and config.negative_factor > 0:
        by_id = {p.sense_id: p for p in adjusted}
        target = by_id.get(selected)
        if target is None:
            raise UnknownSenseError(f"selected sense {selected!r} has no profile")
        foreign: dict[str, tuple[float, str]] = {}
        for profile in adjusted:
            if profile.sense_id == selected:
                continue
            for lemma, weight in profile.entries.items():
                if weight <= 0 or lemma in target.entries:
                    continue
                best = foreign.get(lemma)
                if best is None or weight > best[0]:
                    foreign[lemma] = (weight, profile.sense_id)
        for lemma in sorted(foreign):
            weight, source_id = foreign[lemma]
            target.entries[lemma] = -config.negative_factor * weight
            source_provenance = by_id[source_id].provenance.get(lemma)
            if source_provenance is not None:
                target.provenance[lemma] = source_provenance

    return adjusted


# ---------------------------------------------------------------------------
# Scoring and ranking


def _length_norm(config: ScoringConfig, n_tokens: int) -> float:
    if config.length_norm == "log":
        return 1.0 + math.log(1 + n_tokens)
    if config.length_norm == "linear":
        return float(max(1, n_tokens))
    return 1.0


def _raw_score(
    index: _TokenIndex,
    profile: SenseProfile,
    config: ScoringConfig,
    stats: CorpusStats | None,
) -> float:
    raw = 0.0
    for lemma, weight in profile.entries.items():
        count = index.count(tokenize(lemma))
        if count == 0:
            continue
        factor = stats.idf(lemma) if (config.tfidf and stats is not None) else 1.0
        raw += count * weight * factor
    return raw


def score_document(
    tokens: list[str],
    profile: SenseProfile,
    config: ScoringConfig,
    stats: CorpusStats | None = None,
) -> float:
    """Sum of concept occurrences times concept weight, length-normalized."""
    raw = _raw_score(_TokenIndex(tokens), profile, config, stats)
    return raw / _length_norm(config, len(tokens))


def rank_profiles(
    docs: list[tuple[str, list[str]]],
    sense_ids: tuple[str, ...],
    profiles: dict[str, SenseProfile],
    order_key: str,
    config: ScoringConfig,
    stats: CorpusStats | None = None,
) -> RankingTable:
    """Score every document against every profile and sort the rows.

    Rows are ordered by the order-key column (or each row's best score for
    BEST) descending, ties broken by URL ascending.
    """
    rows: list[RankRow] = []
    for url, tokens in docs:
        index = _TokenIndex(tokens)
        norm = _length_norm(config, len(tokens))
        scores = {
            sense_id: _raw_score(index, profiles[sense_id], config, stats) / norm
            for sense_id in sense_ids
        }
        top_sense = None
        if sense_ids:
            top_sense = max(sense_ids, key=lambda sid: scores[sid])
        rows.append(RankRow(url=url, scores=scores, top_sense=top_sense))

    def sort_key(row: RankRow):
        if order_key == BEST:
            score = max(row.scores.values()) if row.scores else 0.0
        else:
            score = row.scores.get(order_key, 0.0)
        return (-score, row.url)

    rows.sort(key=sort_key)
    return RankingTable(sense_ids=sense_ids, rows=rows, order_key=order_key)


def rank_results(
    docs: list[tuple[str, list[str]]],
    term: str,
    selected: str,
    lexicon: Lexicon,
    config: ScoringConfig,
) -> RankingTable:
    """Build adjusted profiles for every sense of the term and rank docs.

    A specific selection orders rows by that sense's column and applies
    negative factors to it; 'all' orders by each row's best score.
    """
    config.validate()
    senses = lexicon.senses_of(term)
    sense_ids = tuple(s.id for s in senses)
    if selected != ALL_SENSES and selected not in sense_ids:
        raise UnknownSenseError(f"unknown sense {selected!r} for term {term!r}")
    profiles = [build_profile(lexicon, term, s, config) for s in senses]
    adjusted = apply_cross_sense_adjustments(profiles, selected, config)
    by_id = {p.sense_id: p for p in adjusted}
    stats = None
    if config.tfidf:
        concepts = sorted({lemma for p in adjusted for lemma in p.entries})
        stats = corpus_stats([tokens for _, tokens in docs], concepts)
    order_key = selected if selected != ALL_SENSES else BEST
    return rank_profiles(docs, sense_ids, by_id, order_key, config, stats)
