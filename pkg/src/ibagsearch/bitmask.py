"""Bit patterns per (page, ontology), query masks, and the XOR page filter.

Patterns are fixed-length bit vectors with one bit per ontology term,
packed into a single machine integer so XOR and AND run over whole words.
Bit position 0 is the most significant bit, matching the left-to-right
string and hex renderings.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import ValidationError
from .ibag import IBAG, IBAGNode
from .ontology import Ontology, normalize_text


def _position_bit(length: int, position: int) -> int:
    if not 0 <= position < length:
        raise ValueError(f"bit position {position} outside [0, {length})")
    return 1 << (length - 1 - position)


def _to_string(bits: int, length: int) -> str:
    return format(bits, f"0{length}b")


def _to_hex(bits: int, length: int) -> str:
    return format(bits, f"0{(length + 3) // 4}x")


def _set_positions(bits: int, length: int) -> tuple[int, ...]:
    msb = 1 << (length - 1)
    return tuple(p for p in range(length) if bits & (msb >> p))


@dataclass(frozen=True)
class BitPattern:
    """A page's per-term bits for one ontology."""

    bits: int
    length: int
    ontology_id: int
    owner: int | None = None

    def bit(self, position: int) -> int:
        return 1 if self.bits & _position_bit(self.length, position) else 0

    def positions(self) -> tuple[int, ...]:
        return _set_positions(self.bits, self.length)

    def to_string(self) -> str:
        return _to_string(self.bits, self.length)

    def to_hex(self) -> str:
        return _to_hex(self.bits, self.length)


@dataclass(frozen=True)
class MaskBitPattern:
    """Per-term bits for one search string against one ontology."""

    bits: int
    length: int
    ontology_id: int

    def bit(self, position: int) -> int:
        return 1 if self.bits & _position_bit(self.length, position) else 0

    def positions(self) -> tuple[int, ...]:
        return _set_positions(self.bits, self.length)

    def position_bits(self) -> tuple[int, ...]:
        """Single-bit masks for every set position, ascending position."""
        msb = 1 << (self.length - 1)
        return tuple(msb >> p for p in range(self.length) if self.bits & (msb >> p))

    def to_string(self) -> str:
        return _to_string(self.bits, self.length)


@dataclass(frozen=True)
class ResultPattern:
    """XOR of a page pattern and a mask."""

    bits: int
    length: int

    def bit(self, position: int) -> int:
        return 1 if self.bits & _position_bit(self.length, position) else 0

    def to_string(self) -> str:
        return _to_string(self.bits, self.length)


def xor_patterns(page: BitPattern, mask: MaskBitPattern) -> ResultPattern:
    if page.length != mask.length:
        raise ValueError(f"pattern lengths differ: {page.length} vs {mask.length}")
    return ResultPattern(bits=page.bits ^ mask.bits, length=page.length)


def mask_match(page_bits: int, mask_bits: int, position_bits: Sequence[int]) -> bool:
    """Inclusion test for one page against one mask.

    XOR the page bits with the mask, then look for a search-term position
    that reads zero; the first such position decides. For a nonzero mask
    this is equivalent to the page and mask sharing a set bit.
    """
    result = page_bits ^ mask_bits
    for pbit in position_bits:
        if not result & pbit:
            return True
    return False


def gen_webpage_bit_pattern(
    term_vector: Sequence[float],
    ontology: Ontology,
    owner: int | None = None,
) -> BitPattern:
    """Set one bit per term whose relevance value strictly exceeds its limit."""
    if len(term_vector) != ontology.t:
        raise ValueError(
            f"term vector length {len(term_vector)} does not match t={ontology.t}"
        )
    bits = 0
    for term in ontology.terms:
        if term_vector[term.bit_position] > term.term_relevance_limit:
            bits |= _position_bit(ontology.t, term.bit_position)
    return BitPattern(bits=bits, length=ontology.t, ontology_id=ontology.ontology_id, owner=owner)


@lru_cache(maxsize=64)
def _mask_lookup(
    ontology: Ontology, use_synonyms: bool
) -> dict[str, tuple[tuple[list[str], int], ...]]:
    """First word of each phrase -> (phrase words, the term's position bit)."""
    lookup: dict[str, list[tuple[list[str], int]]] = {}
    for term in ontology.terms:
        pbit = _position_bit(ontology.t, term.bit_position)
        for phrase in term.phrases() if use_synonyms else (term.term,):
            words = phrase.split(" ")
            lookup.setdefault(words[0], []).append((words, pbit))
    return {first: tuple(entries) for first, entries in lookup.items()}


def gen_mask_bit_pattern(
    search_string: str,
    ontology: Ontology,
    use_synonyms: bool = True,
) -> MaskBitPattern:
    """Mark every ontology term that occurs in the search string.

    With ``use_synonyms`` (the default) a term also counts as present when
    one of its synonyms occurs. This runs once per query, so the phrase
    lookup is cached per ontology and the search string is scanned once.
    """
    tokens = normalize_text(search_string)
    lookup = _mask_lookup(ontology, use_synonyms)
    bits = 0
    for i, token in enumerate(tokens):
        for words, pbit in lookup.get(token, ()):
            if bits & pbit:
                continue
            if tokens[i : i + len(words)] == words:
                bits |= pbit
    return MaskBitPattern(bits=bits, length=ontology.t, ontology_id=ontology.ontology_id)


class PatternStore:
    """Precomputed bit patterns keyed by (p_id, ontology_id).

    Patterns are generated once per index build; lookups during query
    filtering are list indexing, since p_ids are dense.
    """

    def __init__(self) -> None:
        self._bits: dict[int, list[int]] = {}
        self._lengths: dict[int, int] = {}

    def add_ontology(self, ontology_id: int, length: int, bits_by_p_id: list[int]) -> None:
        if ontology_id in self._bits:
            raise ValidationError(f"patterns for ontology {ontology_id} already present")
        for bits in bits_by_p_id:
            if not 0 <= bits < (1 << length):
                raise ValidationError(f"pattern {bits:#x} does not fit {length} bits")
        self._bits[ontology_id] = list(bits_by_p_id)
        self._lengths[ontology_id] = length

    def ontology_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._bits))

    def length_for(self, ontology_id: int) -> int:
        return self._lengths[ontology_id]

    def bits(self, p_id: int, ontology_id: int) -> int:
        return self._bits[ontology_id][p_id]

    def bits_for_ontology(self, ontology_id: int) -> list[int]:
        """The whole per-page bits column, indexed by p_id."""
        return self._bits[ontology_id]

    def get(self, p_id: int, ontology_id: int) -> BitPattern:
        return BitPattern(
            bits=self._bits[ontology_id][p_id],
            length=self._lengths[ontology_id],
            ontology_id=ontology_id,
            owner=p_id,
        )

    def __len__(self) -> int:
        return sum(len(bits) for bits in self._bits.values())

    def __contains__(self, key: tuple[int, int]) -> bool:
        p_id, ontology_id = key
        return ontology_id in self._bits and 0 <= p_id < len(self._bits[ontology_id])

    def to_json_obj(self) -> dict:
        return {
            "t_by_ontology": {str(k): self._lengths[k] for k in self._bits},
            "patterns": {
                str(k): [_to_hex(bits, self._lengths[k]) for bits in self._bits[k]]
                for k in self._bits
            },
        }

    @staticmethod
    def from_json_obj(obj: dict) -> "PatternStore":
        store = PatternStore()
        for key, hex_rows in obj["patterns"].items():
            ontology_id = int(key)
            length = obj["t_by_ontology"][key]
            store.add_ontology(ontology_id, length, [int(row, 16) for row in hex_rows])
        return store


def gen_ibag_bit_patterns(ibag: IBAG, ontologies: Sequence[Ontology]) -> PatternStore:
    """One-time pattern generation: one pattern per (page, ontology) pair."""
    store = PatternStore()
    for ontology in ontologies:
        bits_by_p_id = [
            gen_webpage_bit_pattern(
                node.term_vectors[ontology.ontology_id], ontology, owner=node.p_id
            ).bits
            for node in ibag.nodes
        ]
        store.add_ontology(ontology.ontology_id, ontology.t, bits_by_p_id)
    return store


def find_predicted_webpage_list(
    selected: Iterable[IBAGNode],
    patterns: PatternStore,
    mask: MaskBitPattern,
    ontology: Ontology,
    result_limit: int,
) -> list[IBAGNode]:
    """Filter range-selected pages through the XOR mask test, in order.

    A page is included when some search-term position of its XORed pattern
    reads zero; the scan stops as soon as the result limit is reached. An
    all-zero mask therefore selects nothing.
    """
    if result_limit < 1:
        raise ValueError(f"result_limit must be >= 1, got {result_limit}")
    if mask.ontology_id != ontology.ontology_id or mask.length != ontology.t:
        raise ValueError("mask does not belong to the given ontology")
    position_bits = mask.position_bits()
    if not position_bits:
        return []  # no search-term positions to test, nothing can match
    predicted: list[IBAGNode] = []
    # bound locals: this loop runs once per selected page on every query
    page_bits = patterns.bits_for_ontology(ontology.ontology_id)
    mask_bits = mask.bits
    match = mask_match
    append = predicted.append
    remaining = result_limit
    for node in selected:
        if match(page_bits[node.p_id], mask_bits, position_bits):
            append(node)
            remaining -= 1
            if not remaining:
                break
    return predicted
