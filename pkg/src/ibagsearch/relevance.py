"""Per-term and per-page relevance scoring against an ontology.

A term's relevance on a page is its weight times the number of occurrences
of the term plus all of its synonyms. A page's relevance is the sum over
every term; the page supports the ontology only when that sum strictly
exceeds the ontology's relevance limit.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .ontology import Ontology, OntologyTerm, count_occurrences, count_phrase_occurrences


@dataclass(frozen=True)
class PageRelevance:
    """One page scored against one ontology.

    ``relevance_value`` is forced to zero when the page does not clear the
    cutoff; the per-term vector is kept either way, indexed by bit position.
    """

    ontology_id: int
    relevance_value: float
    supported: bool
    term_vector: tuple[float, ...]


def term_relevance_value(term: OntologyTerm, tokens: Sequence[str]) -> float:
    occurrences = count_occurrences(tokens, term.term)
    for synonym in term.synonyms:
        occurrences += count_occurrences(tokens, synonym)
    return term.weight * occurrences


def page_relevance(ontology: Ontology, tokens: Sequence[str]) -> PageRelevance:
    """Score a tokenized page against every term of the ontology."""
    counts = count_phrase_occurrences(tokens, ontology.iter_phrases())
    vector: list[float] = []
    for term in ontology.terms:
        occurrences = counts[term.term]
        for synonym in term.synonyms:
            occurrences += counts[synonym]
        vector.append(term.weight * occurrences)
    value = sum(vector)
    supported = value > ontology.relevance_limit
    return PageRelevance(
        ontology_id=ontology.ontology_id,
        relevance_value=value if supported else 0.0,
        supported=supported,
        term_vector=tuple(vector),
    )
