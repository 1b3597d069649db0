"""Sense-aware search wrapper.

Expands queries with lemmas related to a chosen word sense (pre-filter) or
re-ranks retrieved documents by weighted occurrences of sense-related
concepts (post-filter), on top of a pluggable lexicon and search backends.
"""

__version__ = "0.1.0"

from .lexicon import Lexicon, Sense, Synset, load_lexicon

__all__ = ["Lexicon", "Sense", "Synset", "load_lexicon", "__version__"]
