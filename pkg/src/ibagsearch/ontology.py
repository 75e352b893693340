"""Ontology loading, validation, and phrase-occurrence counting.

An ontology is an ordered list of weighted domain terms. Each term may
carry synonyms and a per-term relevance cutoff; the list order fixes the
bit position the term occupies in page and query bit patterns.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import ParseError, ValidationError

_TAG_RE = re.compile(r"<[^>]*>")
_TOKEN_RE = re.compile(r"[a-z0-9]+")


def normalize_text(raw: str) -> list[str]:
    """Tokenize free text: strip markup tags, lowercase, split on punctuation."""
    return _TOKEN_RE.findall(_TAG_RE.sub(" ", raw.lower()))


def normalize_phrase(raw: str) -> str:
    """Canonical phrase form: lowercase words joined by single spaces."""
    return " ".join(normalize_text(raw))


def count_occurrences(tokens: Sequence[str], phrase: str) -> int:
    """Number of non-overlapping left-to-right matches of ``phrase`` in ``tokens``.

    ``phrase`` must already be normalized. Matching is greedy: after a match
    the scan resumes past the matched words, so ``wicket wicket keeper``
    contains ``wicket keeper`` exactly once.
    """
    if not phrase:
        return 0
    words = phrase.split(" ")
    toks = tokens if isinstance(tokens, list) else list(tokens)
    n, w = len(toks), len(words)
    count = 0
    i = 0
    while i + w <= n:
        if toks[i : i + w] == words:
            count += 1
            i += w
        else:
            i += 1
    return count


def count_phrase_occurrences(tokens: Sequence[str], phrases: Iterable[str]) -> dict[str, int]:
    """Count every phrase in a single pass over ``tokens``.

    Agrees with :func:`count_occurrences` applied per phrase; phrases are
    matched independently of each other, so overlaps between different
    phrases are allowed.
    """
    toks = tokens if isinstance(tokens, list) else list(tokens)
    counts: dict[str, int] = {p: 0 for p in phrases}
    next_at = {p: 0 for p in counts}
    by_first: dict[str, list[tuple[str, list[str]]]] = {}
    for p in counts:
        words = p.split(" ")
        by_first.setdefault(words[0], []).append((p, words))
    for i, tok in enumerate(toks):
        for phrase, words in by_first.get(tok, ()):
            if i < next_at[phrase]:
                continue
            w = len(words)
            if toks[i : i + w] == words:
                counts[phrase] += 1
                next_at[phrase] = i + w
    return counts


@dataclass(frozen=True)
class OntologyTerm:
    """One weighted domain term with its synonyms and per-term cutoff."""

    term: str
    weight: float
    synonyms: tuple[str, ...] = ()
    term_relevance_limit: float = 0.0
    bit_position: int = 0

    def phrases(self) -> tuple[str, ...]:
        """The term itself followed by its synonyms."""
        return (self.term, *self.synonyms)


@dataclass(frozen=True)
class Ontology:
    """An ordered set of weighted domain terms plus the page-level cutoff."""

    ontology_id: int
    name: str
    terms: tuple[OntologyTerm, ...]
    relevance_limit: float

    def __post_init__(self) -> None:
        self.validate()
        # ontologies key per-query caches; hashing the nested terms every
        # lookup is measurable, so compute it once
        object.__setattr__(
            self,
            "_hash",
            hash((self.ontology_id, self.name, self.terms, self.relevance_limit)),
        )

    def __hash__(self) -> int:
        return self._hash

    @property
    def t(self) -> int:
        """Number of terms, and therefore the bit-pattern length."""
        return len(self.terms)

    def validate(self) -> None:
        if self.ontology_id < 1:
            raise ValidationError(f"ontology_id must be >= 1, got {self.ontology_id}")
        if not self.terms:
            raise ValidationError(f"ontology {self.name!r} has no terms")
        if self.relevance_limit < 0:
            raise ValidationError(f"relevance_limit must be >= 0, got {self.relevance_limit}")
        seen_terms: set[str] = set()
        syn_owner: dict[str, str] = {}
        for i, term in enumerate(self.terms):
            if term.bit_position != i:
                raise ValidationError(
                    f"term {term.term!r} has bit_position {term.bit_position}, expected {i}"
                )
            if not term.term or term.term != normalize_phrase(term.term):
                raise ValidationError(f"term {term.term!r} is not a normalized phrase")
            if term.term in seen_terms:
                raise ValidationError(f"duplicate term {term.term!r}")
            seen_terms.add(term.term)
            if not 0.0 <= term.weight <= 1.0:
                raise ValidationError(
                    f"term {term.term!r} weight {term.weight} outside [0, 1]"
                )
            if term.term_relevance_limit < 0:
                raise ValidationError(
                    f"term {term.term!r} has negative term_relevance_limit"
                )
            local: set[str] = {term.term}
            for syn in term.synonyms:
                if not syn or syn != normalize_phrase(syn):
                    raise ValidationError(
                        f"synonym {syn!r} of {term.term!r} is not a normalized phrase"
                    )
                if syn in local:
                    raise ValidationError(
                        f"synonym {syn!r} of {term.term!r} is not distinct"
                    )
                local.add(syn)
                if syn in syn_owner and syn_owner[syn] != term.term:
                    raise ValidationError(
                        f"synonym {syn!r} is shared by {syn_owner[syn]!r} and {term.term!r}"
                    )
                syn_owner[syn] = term.term

    def term_at(self, bit_position: int) -> OntologyTerm:
        return self.terms[bit_position]

    def iter_phrases(self) -> Iterator[str]:
        for term in self.terms:
            yield from term.phrases()

    def to_json_obj(self) -> dict:
        return {
            "ontology_id": self.ontology_id,
            "name": self.name,
            "relevance_limit": self.relevance_limit,
            "terms": [
                {
                    "term": t.term,
                    "weight": t.weight,
                    "synonyms": list(t.synonyms),
                    "term_relevance_limit": t.term_relevance_limit,
                    "bit_position": t.bit_position,
                }
                for t in self.terms
            ],
        }

    @staticmethod
    def from_json_obj(obj: dict) -> "Ontology":
        terms = tuple(
            OntologyTerm(
                term=t["term"],
                weight=t["weight"],
                synonyms=tuple(t["synonyms"]),
                term_relevance_limit=t["term_relevance_limit"],
                bit_position=t["bit_position"],
            )
            for t in obj["terms"]
        )
        return Ontology(
            ontology_id=obj["ontology_id"],
            name=obj["name"],
            terms=terms,
            relevance_limit=obj["relevance_limit"],
        )


@dataclass(frozen=True)
class LimitsConfig:
    """Relevance cutoffs: one page-level value plus per-term overrides."""

    relevance_limit: float = 0.0
    default_term_limit: float = 0.0
    term_limits: dict[str, float] = field(default_factory=dict)

    def term_limit(self, term: str) -> float:
        return self.term_limits.get(term, self.default_term_limit)


def _iter_rows(path: Path) -> Iterator[tuple[int, str]]:
    """Yield (line_no, stripped line), skipping blanks and '#' comments."""
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.rstrip("\n").rstrip("\r")
            if not stripped.strip() or stripped.lstrip().startswith("#"):
                continue
            yield line_no, stripped


def load_limits(path: str | Path) -> LimitsConfig:
    """Parse a key=value limits file.

    Recognized keys: ``relevance_limit``, ``term_relevance_limit.default``
    and ``term_relevance_limit.<term>``. Unknown term overrides are kept;
    they only apply to ontologies that actually contain the term.
    """
    path = Path(path)
    relevance_limit = 0.0
    default_term_limit = 0.0
    term_limits: dict[str, float] = {}
    for line_no, row in _iter_rows(path):
        if "=" not in row:
            raise ParseError(path, line_no, f"expected key=value, got {row!r}")
        key, _, raw_value = row.partition("=")
        key = key.strip()
        try:
            value = float(raw_value.strip())
        except ValueError:
            raise ParseError(path, line_no, f"value {raw_value.strip()!r} is not a number") from None
        if value < 0:
            raise ValidationError(f"{path}:{line_no}: limit {value} must be >= 0")
        if key == "relevance_limit":
            relevance_limit = value
        elif key == "term_relevance_limit.default":
            default_term_limit = value
        elif key.startswith("term_relevance_limit."):
            term = normalize_phrase(key[len("term_relevance_limit.") :])
            if not term:
                raise ParseError(path, line_no, "empty term in term_relevance_limit override")
            term_limits[term] = value
        else:
            raise ParseError(path, line_no, f"unknown key {key!r}")
    return LimitsConfig(relevance_limit, default_term_limit, term_limits)


def load_weight_table(path: str | Path) -> list[tuple[str, float]]:
    """Parse term/weight rows, preserving row order."""
    path = Path(path)
    rows: list[tuple[str, float]] = []
    seen: set[str] = set()
    for line_no, row in _iter_rows(path):
        parts = row.split("\t")
        if len(parts) != 2:
            raise ParseError(path, line_no, f"expected 'term<TAB>weight', got {row!r}")
        term = normalize_phrase(parts[0])
        if not term:
            raise ParseError(path, line_no, "empty term")
        try:
            weight = float(parts[1].strip())
        except ValueError:
            raise ParseError(path, line_no, f"weight {parts[1].strip()!r} is not a number") from None
        if not 0.0 <= weight <= 1.0:
            raise ValidationError(f"{path}:{line_no}: weight {weight} outside [0, 1]")
        if term in seen:
            raise ValidationError(f"{path}:{line_no}: duplicate term {term!r}")
        seen.add(term)
        rows.append((term, weight))
    return rows


def load_syntable(path: str | Path, known_terms: set[str]) -> dict[str, tuple[str, ...]]:
    """Parse term/synonym rows; every row's term must be a known term."""
    path = Path(path)
    table: dict[str, tuple[str, ...]] = {}
    owner: dict[str, str] = {}
    for line_no, row in _iter_rows(path):
        parts = row.split("\t")
        if len(parts) != 2:
            raise ParseError(path, line_no, f"expected 'term<TAB>syn1,syn2,...', got {row!r}")
        term = normalize_phrase(parts[0])
        if term not in known_terms:
            raise ValidationError(
                f"{path}:{line_no}: term {term!r} is not in the weight table"
            )
        if term in table:
            raise ValidationError(f"{path}:{line_no}: duplicate row for term {term!r}")
        synonyms: list[str] = []
        for raw_syn in parts[1].split(","):
            syn = normalize_phrase(raw_syn)
            if not syn:
                raise ParseError(path, line_no, f"empty synonym in {parts[1]!r}")
            if syn == term or syn in synonyms:
                raise ValidationError(
                    f"{path}:{line_no}: synonym {syn!r} of {term!r} is not distinct"
                )
            if syn in owner:
                raise ValidationError(
                    f"{path}:{line_no}: synonym {syn!r} already belongs to {owner[syn]!r}"
                )
            owner[syn] = term
            synonyms.append(syn)
        table[term] = tuple(synonyms)
    return table


def load_ontology(
    weight_table_path: str | Path,
    syntable_path: str | Path,
    limits: LimitsConfig | str | Path,
    *,
    ontology_id: int = 1,
    name: str | None = None,
) -> Ontology:
    """Assemble an ontology from its weight table, syntable and limits.

    Weight-table order defines bit positions. Terms missing from the
    syntable get an empty synonym list; syntable terms missing from the
    weight table are rejected.
    """
    if not isinstance(limits, LimitsConfig):
        limits = load_limits(limits)
    weights = load_weight_table(weight_table_path)
    syntable = load_syntable(syntable_path, {term for term, _ in weights})
    terms = tuple(
        OntologyTerm(
            term=term,
            weight=weight,
            synonyms=syntable.get(term, ()),
            term_relevance_limit=limits.term_limit(term),
            bit_position=position,
        )
        for position, (term, weight) in enumerate(weights)
    )
    if name is None:
        name = Path(weight_table_path).stem
    return Ontology(
        ontology_id=ontology_id,
        name=name,
        terms=terms,
        relevance_limit=limits.relevance_limit,
    )
