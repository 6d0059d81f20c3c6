"""Python bindings for the biblionet analysis engine.

Most functions return plain Python structures. The ``*_json`` helpers of the
extension are wrapped here to return decoded documents.
"""

import json

from ._core import (
    DEFAULT_THEME_COUNT,
    Corpus,
    Error,
    InvalidArgument,
    KeywordGraph,
    ParseError,
    Service,
    classify_countries,
    cooccurrence,
    generate_planted_corpus,
    micro_corpus,
    residuals,
    theme_assignment,
    tokenize,
)
from ._core import themes_json as _themes_json

__all__ = [
    "DEFAULT_THEME_COUNT",
    "Corpus",
    "Error",
    "InvalidArgument",
    "KeywordGraph",
    "ParseError",
    "Service",
    "classify_countries",
    "cooccurrence",
    "generate_planted_corpus",
    "micro_corpus",
    "residuals",
    "summary",
    "themes",
    "theme_assignment",
    "tokenize",
    "validate",
]


def summary(corpus):
    return json.loads(corpus.summary_json())


def validate(corpus):
    """List of {id, rule, detail} violations, empty for a valid corpus."""
    return json.loads(corpus.validate_json())


def themes(corpus, k=DEFAULT_THEME_COUNT, seed=0, top=50):
    return json.loads(_themes_json(corpus, k, seed, top))
