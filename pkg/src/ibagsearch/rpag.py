"""Relevance page graph: the crawl-order repository of relevant pages.

The builder walks the corpus link graph breadth-first from the seeds,
scores every reachable document against every ontology, and keeps a node
only for documents that support at least one ontology. Links out of
non-supporting documents are still followed, so relevant pages reachable
only through irrelevant ones are not lost.
"""
from __future__ import annotations

import hashlib
import json
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import Corpus
from .errors import ValidationError
from .ontology import Ontology, normalize_text
from .relevance import PageRelevance, page_relevance

log = logging.getLogger(__name__)

MAX_PARENTS = 4
FORMAT_VERSION = "1"


@dataclass(frozen=True)
class RPaGNode:
    """One relevant page: identity, up to four parents, per-ontology scores."""

    p_id: int
    url: str
    pp_ids: tuple[int, ...]
    relevance: dict[int, PageRelevance]


@dataclass
class RPaG:
    """Nodes indexed by p_id (dense, in discovery order) plus the ontologies."""

    nodes: list[RPaGNode] = field(default_factory=list)
    ontologies: tuple[Ontology, ...] = ()

    def __len__(self) -> int:
        return len(self.nodes)

    def ontology_digest(self) -> str:
        return ontology_digest(self.ontologies)

    def validate(self) -> None:
        urls: set[str] = set()
        ontology_ids = {ont.ontology_id for ont in self.ontologies}
        by_id = {ont.ontology_id: ont for ont in self.ontologies}
        for index, node in enumerate(self.nodes):
            if node.p_id != index:
                raise ValidationError(f"node at index {index} has p_id {node.p_id}")
            if not node.url or node.url in urls:
                raise ValidationError(f"node {node.p_id} url {node.url!r} missing or duplicated")
            urls.add(node.url)
            if len(node.pp_ids) > MAX_PARENTS:
                raise ValidationError(f"node {node.p_id} has more than {MAX_PARENTS} parents")
            for pp in node.pp_ids:
                if not 0 <= pp < node.p_id:
                    raise ValidationError(
                        f"node {node.p_id} parent {pp} must reference an earlier node"
                    )
            if set(node.relevance) != ontology_ids:
                raise ValidationError(f"node {node.p_id} relevance keys mismatch the ontologies")
            if not any(rel.supported for rel in node.relevance.values()):
                raise ValidationError(f"node {node.p_id} supports no ontology")
            for ont_id, rel in node.relevance.items():
                ont = by_id[ont_id]
                if len(rel.term_vector) != ont.t:
                    raise ValidationError(
                        f"node {node.p_id} term vector length mismatch for ontology {ont_id}"
                    )
                if rel.supported:
                    if not rel.relevance_value > ont.relevance_limit:
                        raise ValidationError(
                            f"node {node.p_id} flagged for ontology {ont_id} but value "
                            f"{rel.relevance_value} does not exceed the limit"
                        )
                elif rel.relevance_value != 0.0:
                    raise ValidationError(
                        f"node {node.p_id} stores a nonzero value for unsupported ontology {ont_id}"
                    )

    def to_json_obj(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "ontology_digest": self.ontology_digest(),
            "nodes": [
                {
                    "p_id": node.p_id,
                    "url": node.url,
                    "pp_ids": list(node.pp_ids),
                    "relevance": {
                        str(ont_id): {
                            "relevance_value": rel.relevance_value,
                            "supported": rel.supported,
                            "term_vector": list(rel.term_vector),
                        }
                        for ont_id, rel in node.relevance.items()
                    },
                }
                for node in self.nodes
            ],
        }

    @staticmethod
    def from_json_obj(obj: dict, ontologies: Sequence[Ontology]) -> "RPaG":
        ontologies = tuple(ontologies)
        if obj.get("version") != FORMAT_VERSION:
            raise ValidationError(f"unsupported graph format version {obj.get('version')!r}")
        if obj.get("ontology_digest") != ontology_digest(ontologies):
            raise ValidationError("graph was built against different ontologies")
        nodes = [
            RPaGNode(
                p_id=raw["p_id"],
                url=raw["url"],
                pp_ids=tuple(raw["pp_ids"]),
                relevance={
                    int(ont_id): PageRelevance(
                        ontology_id=int(ont_id),
                        relevance_value=rel["relevance_value"],
                        supported=rel["supported"],
                        term_vector=tuple(rel["term_vector"]),
                    )
                    for ont_id, rel in raw["relevance"].items()
                },
            )
            for raw in obj["nodes"]
        ]
        graph = RPaG(nodes=nodes, ontologies=ontologies)
        graph.validate()
        return graph


def ontology_digest(ontologies: Sequence[Ontology]) -> str:
    """Stable fingerprint of an ontology list, for cross-checking indexes."""
    payload = json.dumps(
        [ont.to_json_obj() for ont in ontologies],
        sort_keys=True,
        ensure_ascii=False,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def build_rpag(corpus: Corpus, ontologies: Sequence[Ontology]) -> RPaG:
    """Crawl the corpus from its seeds and keep every supporting page.

    Parent lists are frozen when a page is dequeued: a node's pp_ids are
    the first (up to four) supporting pages that linked to it before it
    was processed, in link-discovery order. That rule keeps every parent's
    p_id below its child's, so the parent structure is acyclic.
    """
    ontologies = tuple(ontologies)
    if not ontologies:
        raise ValidationError("at least one ontology is required")
    if not corpus.seeds:
        raise ValidationError("corpus has no seeds")
    ids = [ont.ontology_id for ont in ontologies]
    if len(set(ids)) != len(ids):
        raise ValidationError("ontology ids must be unique")

    queue: deque[str] = deque()
    discovered: set[str] = set()
    for seed in corpus.seeds:
        if seed not in discovered:
            discovered.add(seed)
            queue.append(seed)
    processed: set[str] = set()
    pending_parents: dict[str, list[int]] = {}
    nodes: list[RPaGNode] = []

    while queue:
        url = queue.popleft()
        processed.add(url)
        doc = corpus.docs[url]
        tokens = normalize_text(doc.text)
        relevance = {ont.ontology_id: page_relevance(ont, tokens) for ont in ontologies}
        p_id: int | None = None
        if any(rel.supported for rel in relevance.values()):
            p_id = len(nodes)
            nodes.append(
                RPaGNode(
                    p_id=p_id,
                    url=url,
                    pp_ids=tuple(pending_parents.pop(url, ())),
                    relevance=relevance,
                )
            )
        else:
            pending_parents.pop(url, None)

        for link in doc.out_links:
            if link not in corpus.docs:
                continue  # dangling link: a live crawler would fail the fetch
            if p_id is not None and link not in processed:
                parents = pending_parents.setdefault(link, [])
                if len(parents) < MAX_PARENTS and p_id not in parents:
                    parents.append(p_id)
            if link not in discovered:
                discovered.add(link)
                queue.append(link)

    graph = RPaG(nodes=nodes, ontologies=ontologies)
    graph.validate()
    log.debug("built relevance graph: %d nodes from %d documents", len(nodes), len(corpus))
    return graph
