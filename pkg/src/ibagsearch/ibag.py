"""Leveled single-parent index generated from the relevance page graph.

Every node keeps the p_id it had in the source graph and exactly one
parent (the first of its listed parents). A node's level is its depth in
that parent tree. Within a level, nodes are sorted by mean relevance
value, highest first, ties broken by ascending p_id. Per ontology, a link
chain threads all supporting nodes in traversal order (level by level,
sorted within level), and every level stores the position of its first
supporting node, so a traversal can enter a level directly and walk only
the pages that belong to the queried domain.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import ValidationError
from .ontology import Ontology
from .rpag import RPaG

log = logging.getLogger(__name__)

FORMAT_VERSION = "1"


@dataclass
class IBAGNode:
    p_id: int
    url: str
    pp_id: int | None
    mean_rel_val: float
    level: int
    supported: dict[int, bool]
    term_vectors: dict[int, tuple[float, ...]]
    ont_link: dict[int, int | None] = field(default_factory=dict)


class IBAG:
    """Index nodes plus the level table and per-level domain head positions."""

    def __init__(
        self,
        nodes: list[IBAGNode],
        ontologies: tuple[Ontology, ...],
        levels: list[list[int]],
        level_heads: list[dict[int, int | None]],
    ) -> None:
        self.nodes = nodes
        self.ontologies = ontologies
        self.levels = levels
        self.level_heads = level_heads
        self._by_id = {ont.ontology_id: ont for ont in ontologies}

    def __len__(self) -> int:
        return len(self.nodes)

    def ontology_by_id(self, ontology_id: int) -> Ontology:
        try:
            return self._by_id[ontology_id]
        except KeyError:
            raise ValueError(f"unknown ontology id {ontology_id}") from None

    def mean_value_bounds(self) -> tuple[float, float] | None:
        """(min, max) of mean relevance over all nodes, or None when empty."""
        if not self.nodes:
            return None
        values = [node.mean_rel_val for node in self.nodes]
        return min(values), max(values)

    def iter_chain(self, level_index: int, ontology_id: int) -> Iterator[IBAGNode]:
        """Walk one level's supporting nodes, entering at the stored head."""
        head = self.level_heads[level_index].get(ontology_id)
        if head is None:
            return
        node: IBAGNode | None = self.nodes[self.levels[level_index][head]]
        while node is not None and node.level == level_index:
            yield node
            next_id = node.ont_link.get(ontology_id)
            node = self.nodes[next_id] if next_id is not None else None

    @classmethod
    def from_nodes(cls, nodes: Sequence[IBAGNode], ontologies: Sequence[Ontology]) -> "IBAG":
        """Assemble levels, sort them, and thread the per-ontology chains.

        ``nodes`` must be dense in p_id with consistent levels; ont_link
        entries are overwritten here.
        """
        nodes = list(nodes)
        ontologies = tuple(ontologies)
        ids = [ont.ontology_id for ont in ontologies]
        for i, node in enumerate(nodes):
            if node.p_id != i:
                raise ValidationError(f"node at index {i} has p_id {node.p_id}")
            if node.level < 0:
                raise ValidationError(f"node {i} has negative level {node.level}")

        max_level = max((node.level for node in nodes), default=-1)
        levels: list[list[int]] = [[] for _ in range(max_level + 1)]
        for node in nodes:
            levels[node.level].append(node.p_id)
        for level in levels:
            level.sort(key=lambda p: (-nodes[p].mean_rel_val, p))

        level_heads: list[dict[int, int | None]] = [dict.fromkeys(ids) for _ in levels]
        for ont_id in ids:
            previous: IBAGNode | None = None
            for level_index, level in enumerate(levels):
                for position, p_id in enumerate(level):
                    node = nodes[p_id]
                    node.ont_link[ont_id] = None
                    if not node.supported.get(ont_id):
                        continue
                    if level_heads[level_index][ont_id] is None:
                        level_heads[level_index][ont_id] = position
                    if previous is not None:
                        previous.ont_link[ont_id] = p_id
                    previous = node

        index = cls(nodes, ontologies, levels, level_heads)
        index.validate()
        log.debug("assembled index: %d nodes in %d levels", len(nodes), len(levels))
        return index

    def validate(self) -> None:
        ids = [ont.ontology_id for ont in self.ontologies]
        urls: set[str] = set()
        for i, node in enumerate(self.nodes):
            if node.p_id != i:
                raise ValidationError(f"node at index {i} has p_id {node.p_id}")
            if not node.url or node.url in urls:
                raise ValidationError(f"node {i} url {node.url!r} missing or duplicated")
            urls.add(node.url)
            if node.pp_id is None:
                if node.level != 0:
                    raise ValidationError(f"parentless node {i} has level {node.level}")
            else:
                if not 0 <= node.pp_id < node.p_id:
                    raise ValidationError(f"node {i} parent {node.pp_id} must be an earlier node")
                if node.level != self.nodes[node.pp_id].level + 1:
                    raise ValidationError(f"node {i} level does not follow its parent")
            if not node.mean_rel_val > 0:
                raise ValidationError(f"node {i} mean relevance {node.mean_rel_val} is not positive")
            if set(node.supported) != set(ids) or set(node.term_vectors) != set(ids):
                raise ValidationError(f"node {i} per-ontology fields mismatch the ontologies")
            if not any(node.supported.values()):
                raise ValidationError(f"node {i} supports no ontology")
            for ont in self.ontologies:
                if len(node.term_vectors[ont.ontology_id]) != ont.t:
                    raise ValidationError(
                        f"node {i} term vector length mismatch for ontology {ont.ontology_id}"
                    )

        seen: set[int] = set()
        for level_index, level in enumerate(self.levels):
            if not level:
                raise ValidationError(f"level {level_index} is empty")
            for position, p_id in enumerate(level):
                node = self.nodes[p_id]
                if node.level != level_index:
                    raise ValidationError(f"node {p_id} listed in the wrong level")
                if p_id in seen:
                    raise ValidationError(f"node {p_id} listed twice in the level table")
                seen.add(p_id)
                if position > 0:
                    prev = self.nodes[level[position - 1]]
                    if (-prev.mean_rel_val, prev.p_id) > (-node.mean_rel_val, node.p_id):
                        raise ValidationError(f"level {level_index} is not sorted at {position}")
        if len(seen) != len(self.nodes):
            raise ValidationError("level table does not cover every node")
        if len(self.level_heads) != len(self.levels):
            raise ValidationError("level head table length mismatch")

        # Heads and chains must thread exactly the supporting nodes in order.
        for ont_id in ids:
            expected = [
                p_id
                for level in self.levels
                for p_id in level
                if self.nodes[p_id].supported.get(ont_id)
            ]
            chained: list[int] = []
            for level_index, level in enumerate(self.levels):
                head = self.level_heads[level_index].get(ont_id)
                in_level = [p for p in level if self.nodes[p].supported.get(ont_id)]
                if head is None:
                    if in_level:
                        raise ValidationError(
                            f"level {level_index} missing head for ontology {ont_id}"
                        )
                    continue
                if not in_level or level[head] != in_level[0]:
                    raise ValidationError(
                        f"level {level_index} head for ontology {ont_id} is wrong"
                    )
                chained.extend(node.p_id for node in self.iter_chain(level_index, ont_id))
            if chained != expected:
                raise ValidationError(f"ontology {ont_id} link chain is broken")
            for position, p_id in enumerate(expected):
                follow = self.nodes[p_id].ont_link.get(ont_id)
                want = expected[position + 1] if position + 1 < len(expected) else None
                if follow != want:
                    raise ValidationError(
                        f"node {p_id} ontology {ont_id} link points to {follow}, expected {want}"
                    )

    def to_json_obj(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "levels": [list(level) for level in self.levels],
            "level_heads": [
                {str(ont_id): head for ont_id, head in heads.items()}
                for heads in self.level_heads
            ],
            "nodes": [
                {
                    "p_id": node.p_id,
                    "url": node.url,
                    "pp_id": node.pp_id,
                    "mean_rel_val": node.mean_rel_val,
                    "level": node.level,
                    "supported": {str(k): v for k, v in node.supported.items()},
                    "term_vectors": {str(k): list(v) for k, v in node.term_vectors.items()},
                    "ont_link": {str(k): v for k, v in node.ont_link.items()},
                }
                for node in self.nodes
            ],
        }

    @staticmethod
    def from_json_obj(obj: dict, ontologies: Sequence[Ontology]) -> "IBAG":
        if obj.get("version") != FORMAT_VERSION:
            raise ValidationError(f"unsupported index format version {obj.get('version')!r}")
        nodes = [
            IBAGNode(
                p_id=raw["p_id"],
                url=raw["url"],
                pp_id=raw["pp_id"],
                mean_rel_val=raw["mean_rel_val"],
                level=raw["level"],
                supported={int(k): v for k, v in raw["supported"].items()},
                term_vectors={int(k): tuple(v) for k, v in raw["term_vectors"].items()},
                ont_link={int(k): v for k, v in raw["ont_link"].items()},
            )
            for raw in obj["nodes"]
        ]
        index = IBAG(
            nodes=nodes,
            ontologies=tuple(ontologies),
            levels=[list(level) for level in obj["levels"]],
            level_heads=[
                {int(k): v for k, v in heads.items()} for heads in obj["level_heads"]
            ],
        )
        index.validate()
        return index


def build_ibag(rpag: RPaG) -> IBAG:
    """Derive the leveled index from a relevance page graph.

    The single parent is the node's first listed parent. The mean relevance
    value averages the page's relevance over the ontologies it supports.
    """
    nodes: list[IBAGNode] = []
    for rnode in rpag.nodes:
        pp_id = rnode.pp_ids[0] if rnode.pp_ids else None
        level = 0 if pp_id is None else nodes[pp_id].level + 1
        supported_values = [
            rnode.relevance[ont.ontology_id].relevance_value
            for ont in rpag.ontologies
            if rnode.relevance[ont.ontology_id].supported
        ]
        nodes.append(
            IBAGNode(
                p_id=rnode.p_id,
                url=rnode.url,
                pp_id=pp_id,
                mean_rel_val=sum(supported_values) / len(supported_values),
                level=level,
                supported={
                    ont.ontology_id: rnode.relevance[ont.ontology_id].supported
                    for ont in rpag.ontologies
                },
                term_vectors={
                    ont.ontology_id: rnode.relevance[ont.ontology_id].term_vector
                    for ont in rpag.ontologies
                },
            )
        )
    return IBAG.from_nodes(nodes, rpag.ontologies)


def select_by_range(
    ibag: IBAG,
    relevance_range: tuple[float, float],
    ontology_id: int,
) -> tuple[list[IBAGNode], int]:
    """Collect supporting nodes whose mean relevance lies in the closed range.

    Returns the matches in traversal order plus the number of nodes touched.
    Each level is entered at its stored head and walked along the ontology
    chain; because a level is sorted, the walk stops early once values drop
    below the lower bound.
    """
    lo, hi = relevance_range
    if lo > hi:
        raise ValueError(f"invalid relevance range [{lo}, {hi}]")
    ibag.ontology_by_id(ontology_id)  # reject unknown ids
    selected: list[IBAGNode] = []
    visited = 0
    for level_index in range(len(ibag.levels)):
        for node in ibag.iter_chain(level_index, ontology_id):
            visited += 1
            if node.mean_rel_val > hi:
                continue
            if node.mean_rel_val < lo:
                break
            selected.append(node)
    return selected, visited
