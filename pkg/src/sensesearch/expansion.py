"""Pre-filter mode: extend a query with lemmas related to a chosen sense.

Hyponym lemmas are preferred; if a sense yields none, direct hypernym
lemmas are used, then the sense's own co-synonyms. "All senses" (and any
sense with no usable related lemmas) passes the query through unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lexicon import ALL_SENSES, Lexicon, UnknownSenseError

DEFAULT_MAX_EXPANSION_TERMS = 8

RELATION_NONE = "none"
RELATION_HYPONYM = "hyponym"
RELATION_HYPERNYM = "hypernym"
RELATION_SYNONYM = "synonym"


class UnknownSyntaxProfileError(KeyError):
    pass


@dataclass(frozen=True)
class ExpandedQuery:
    original_term: str
    sense_id: str | None
    expansion_terms: tuple[str, ...]
    source_relation: str

    @property
    def is_passthrough(self) -> bool:
        return not self.expansion_terms


@dataclass(frozen=True)
class SyntaxProfile:
    """How one engine family spells a term plus an OR-group of phrases."""

    name: str
    or_keyword: str = "OR"
    quote: str = '"'
    group_open: str = "("
    group_close: str = ")"


_GENERIC = SyntaxProfile(name="generic")
DEFAULT_SYNTAX_PROFILES = {"generic": _GENERIC}


def _collect_terms(
    lexicon: Lexicon, synset_ids, exclude: str, max_terms: int
) -> tuple[str, ...]:
    terms: list[str] = []
    seen = {exclude}
    for sid in synset_ids:
        for lemma in lexicon.synsets[sid].lemmas:
            key = lemma.lower()
            if key in seen:
                continue
            seen.add(key)
            terms.append(lemma)
            if len(terms) >= max_terms:
                return tuple(terms)
    return tuple(terms)


def expand_query(
    lexicon: Lexicon,
    term: str,
    sense_choice: str,
    max_terms: int = DEFAULT_MAX_EXPANSION_TERMS,
) -> ExpandedQuery:
    """Build the extended query for a sense choice (a sense id or 'all').

    Term removal and deduplication can leave a relation with no usable
    lemmas, in which case the next fallback is tried.
    """
    if not term:
        raise ValueError("term must be non-empty")
    if sense_choice.lower() == ALL_SENSES:
        return ExpandedQuery(term, None, (), RELATION_NONE)

    sense = lexicon.sense(sense_choice)
    if sense.lemma != term.lower():
        raise UnknownSenseError(f"sense {sense_choice!r} does not belong to {term!r}")
    synset = lexicon.synset(sense.synset_id)
    key = term.lower()

    terms = _collect_terms(lexicon, synset.targets("hyponym"), key, max_terms)
    if terms:
        return ExpandedQuery(term, sense.id, terms, RELATION_HYPONYM)
    terms = _collect_terms(lexicon, synset.targets("hypernym"), key, max_terms)
    if terms:
        return ExpandedQuery(term, sense.id, terms, RELATION_HYPERNYM)
    terms = _collect_terms(lexicon, (synset.id,), key, max_terms)
    if terms:
        return ExpandedQuery(term, sense.id, terms, RELATION_SYNONYM)
    return ExpandedQuery(term, sense.id, (), RELATION_NONE)


def render_query(
    query: ExpandedQuery,
    syntax: str = "generic",
    profiles: dict[str, SyntaxProfile] | None = None,
) -> str:
    """Render an expanded query for one engine syntax profile.

    The generic profile yields '<term> ("t1" OR "t2" ...)'; every expansion
    term is quoted so multiword lemmas survive engine tokenization.
    """
    registry = profiles if profiles is not None else DEFAULT_SYNTAX_PROFILES
    try:
        profile = registry[syntax]
    except KeyError:
        raise UnknownSyntaxProfileError(syntax) from None
    if query.is_passthrough:
        return query.original_term
    quoted = f" {profile.or_keyword} ".join(
        f"{profile.quote}{t}{profile.quote}" for t in query.expansion_terms
    )
    return f"{query.original_term} {profile.group_open}{quoted}{profile.group_close}"
