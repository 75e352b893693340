"""Local document corpus with an explicit link graph, plus a synthetic generator."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import ParseError, ValidationError
from .ontology import Ontology


@dataclass(frozen=True)
class CorpusDoc:
    url: str
    out_links: tuple[str, ...]
    text: str


@dataclass(frozen=True)
class Corpus:
    """Documents keyed by url, in file order, plus the crawl seed urls."""

    docs: dict[str, CorpusDoc]
    seeds: tuple[str, ...]

    def __post_init__(self) -> None:
        for seed in self.seeds:
            if seed not in self.docs:
                raise ValidationError(f"seed {seed!r} is not in the corpus")

    def __len__(self) -> int:
        return len(self.docs)


def load_corpus(path: str | Path, seeds: Sequence[str] | None = None) -> Corpus:
    """Read a line-delimited JSON corpus (fields: url, links, text).

    ``seeds`` defaults to the first record's url when omitted.
    """
    path = Path(path)
    docs: dict[str, CorpusDoc] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line_no, f"invalid JSON: {exc.msg}") from None
            if not isinstance(obj, dict):
                raise ParseError(path, line_no, "record is not a JSON object")
            url = obj.get("url")
            links = obj.get("links")
            text = obj.get("text")
            if not isinstance(url, str) or not url:
                raise ParseError(path, line_no, "missing or empty 'url'")
            if not isinstance(links, list) or not all(isinstance(x, str) for x in links):
                raise ParseError(path, line_no, "'links' must be an array of strings")
            if not isinstance(text, str):
                raise ParseError(path, line_no, "'text' must be a string")
            if url in docs:
                raise ValidationError(f"{path}:{line_no}: duplicate url {url!r}")
            docs[url] = CorpusDoc(url=url, out_links=tuple(links), text=text)
    if seeds is None:
        if not docs:
            raise ValidationError(f"{path}: corpus is empty, cannot infer seeds")
        seeds = [next(iter(docs))]
    deduped: list[str] = []
    for seed in seeds:
        if seed not in deduped:
            deduped.append(seed)
    return Corpus(docs=docs, seeds=tuple(deduped))


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write the corpus back as line-delimited JSON (canonical key order)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for doc in corpus.docs.values():
            obj = {"links": list(doc.out_links), "text": doc.text, "url": doc.url}
            fh.write(json.dumps(obj, sort_keys=True, ensure_ascii=False))
            fh.write("\n")


@dataclass(frozen=True)
class GenerationConfig:
    """Knobs for the synthetic corpus generator."""

    noise_vocab_size: int = 400
    doc_len_mean: int = 90
    term_hit_prob: float = 0.12
    link_out_degree: int = 3


def synth_corpus(
    rng_seed: int,
    n_docs: int,
    ontologies: Sequence[Ontology],
    params: GenerationConfig | None = None,
) -> Corpus:
    """Generate a deterministic corpus whose texts embed ontology phrases.

    Every document is reachable from the single seed (the first document):
    each later document receives an in-link from an earlier one. Extra
    links are sprinkled on top, so the graph may also contain cycles.
    """
    if n_docs < 1:
        raise ValueError(f"n_docs must be >= 1, got {n_docs}")
    cfg = params or GenerationConfig()
    rng = random.Random(rng_seed)
    pools = [[phrase for term in ont.terms for phrase in term.phrases()] for ont in ontologies]

    urls = [f"doc-{i:05d}" for i in range(n_docs)]
    links: list[list[str]] = [[] for _ in range(n_docs)]
    for i in range(1, n_docs):
        links[rng.randrange(i)].append(urls[i])
    for i in range(n_docs):
        for _ in range(rng.randint(0, cfg.link_out_degree)):
            links[i].append(urls[rng.randrange(n_docs)])

    docs: dict[str, CorpusDoc] = {}
    for i in range(n_docs):
        length = rng.randint(max(1, cfg.doc_len_mean // 2), cfg.doc_len_mean + cfg.doc_len_mean // 2)
        words: list[str] = []
        while len(words) < length:
            if pools and rng.random() < cfg.term_hit_prob:
                pool = pools[rng.randrange(len(pools))]
                words.extend(rng.choice(pool).split(" "))
            else:
                words.append(f"nz{rng.randrange(cfg.noise_vocab_size)}")
        docs[urls[i]] = CorpusDoc(url=urls[i], out_links=tuple(links[i]), text=" ".join(words))
    return Corpus(docs=docs, seeds=(urls[0],))
