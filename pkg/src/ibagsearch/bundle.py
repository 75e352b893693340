"""Single-file JSON persistence for a built index.

The file holds four sections (ontologies, relevance graph, leveled index,
bit patterns) under one version tag. Serialization is canonical (sorted
keys, fixed separators), so saving a loaded bundle reproduces the file
byte for byte.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .bitmask import PatternStore, gen_ibag_bit_patterns
from .corpus import Corpus
from .errors import ValidationError
from .ibag import IBAG, build_ibag
from .ontology import Ontology
from .rpag import RPaG, build_rpag

log = logging.getLogger(__name__)

FORMAT_VERSION = "1"


@dataclass
class IndexBundle:
    ontologies: tuple[Ontology, ...]
    rpag: RPaG
    ibag: IBAG
    patterns: PatternStore

    @classmethod
    def build(cls, corpus: Corpus, ontologies: Sequence[Ontology]) -> "IndexBundle":
        rpag = build_rpag(corpus, ontologies)
        ibag = build_ibag(rpag)
        patterns = gen_ibag_bit_patterns(ibag, rpag.ontologies)
        bundle = cls(ontologies=rpag.ontologies, rpag=rpag, ibag=ibag, patterns=patterns)
        bundle.validate()
        return bundle

    def validate(self) -> None:
        if self.rpag.ontologies != self.ontologies or self.ibag.ontologies != self.ontologies:
            raise ValidationError("bundle sections disagree on the ontologies")
        if len(self.ibag) != len(self.rpag):
            raise ValidationError("graph and index node counts differ")
        for rnode, inode in zip(self.rpag.nodes, self.ibag.nodes):
            if rnode.p_id != inode.p_id or rnode.url != inode.url:
                raise ValidationError(f"node {rnode.p_id} identity differs between sections")
        ids = tuple(sorted(ont.ontology_id for ont in self.ontologies))
        if self.patterns.ontology_ids() != ids:
            raise ValidationError("pattern store ontologies mismatch")
        for ont in self.ontologies:
            if self.patterns.length_for(ont.ontology_id) != ont.t:
                raise ValidationError(f"pattern length mismatch for ontology {ont.ontology_id}")
        if len(self.patterns) != len(self.ibag) * len(self.ontologies):
            raise ValidationError("pattern store cardinality mismatch")

    def to_json_obj(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "ontologies": [ont.to_json_obj() for ont in self.ontologies],
            "rpag": self.rpag.to_json_obj(),
            "ibag": self.ibag.to_json_obj(),
            "patterns": self.patterns.to_json_obj(),
        }

    @staticmethod
    def from_json_obj(obj: dict) -> "IndexBundle":
        if obj.get("format_version") != FORMAT_VERSION:
            raise ValidationError(
                f"unsupported bundle format version {obj.get('format_version')!r}"
            )
        ontologies = tuple(Ontology.from_json_obj(raw) for raw in obj["ontologies"])
        bundle = IndexBundle(
            ontologies=ontologies,
            rpag=RPaG.from_json_obj(obj["rpag"], ontologies),
            ibag=IBAG.from_json_obj(obj["ibag"], ontologies),
            patterns=PatternStore.from_json_obj(obj["patterns"]),
        )
        bundle.validate()
        return bundle

    def canonical_bytes(self) -> bytes:
        text = json.dumps(
            self.to_json_obj(), sort_keys=True, ensure_ascii=False, separators=(",", ":")
        )
        return (text + "\n").encode("utf-8")

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.canonical_bytes())
        log.debug("saved index bundle to %s", path)

    @staticmethod
    def load(path: str | Path) -> "IndexBundle":
        raw = Path(path).read_text(encoding="utf-8")
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not a valid index file: {exc.msg}") from None
        return IndexBundle.from_json_obj(obj)
