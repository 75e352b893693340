"""Harvest-rate accuracy measurement, benchmark harness, and traversal-cost checks."""
from __future__ import annotations

import json
import logging
import random
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .bitmask import (
    PatternStore,
    find_predicted_webpage_list,
    gen_ibag_bit_patterns,
    gen_mask_bit_pattern,
)
from .corpus import GenerationConfig, synth_corpus
from .ibag import IBAG, IBAGNode, build_ibag, select_by_range
from .ontology import Ontology, OntologyTerm
from .rpag import build_rpag
from .search import (
    AFTER_MASKING,
    BEFORE_MASKING,
    Query,
    search_after_masking,
    search_before_masking,
)

log = logging.getLogger(__name__)

CSV_HEADER = "size,mode,avg_count,avg_elapsed_us,avg_visited,hr_mean"


@dataclass(frozen=True)
class HarvestReport:
    """Accuracy of a result list relative to the whole range selection.

    ``t_rel_sr`` is the mean search-term relevance over the result pages,
    ``t_rel_sw`` the same mean over every range-selected page, and ``hr``
    their ratio. Fields are None when undefined (empty sets or a zero
    selection mean).
    """

    t_rel_sr: float | None
    t_rel_sw: float | None
    hr: float | None


def harvest_rate(
    query: Query,
    result_pages: Sequence[IBAGNode],
    selected_pages: Sequence[IBAGNode],
    ibag: IBAG,
    use_synonyms: bool = True,
) -> HarvestReport:
    """Score pages by their stored relevance on the query's detected terms.

    No re-tokenization happens here: a page's score sums the indexed term
    relevance values at the mask's set positions.
    """
    ontology = ibag.ontology_by_id(query.ontology_id)
    mask = gen_mask_bit_pattern(query.search_string, ontology, use_synonyms=use_synonyms)
    positions = mask.positions()

    def score(node: IBAGNode) -> float:
        vector = node.term_vectors[ontology.ontology_id]
        return sum(vector[p] for p in positions)

    t_rel_sw = statistics.fmean(score(n) for n in selected_pages) if selected_pages else None
    t_rel_sr = statistics.fmean(score(n) for n in result_pages) if result_pages else None
    hr = None
    if t_rel_sr is not None and t_rel_sw is not None and t_rel_sw > 0:
        hr = t_rel_sr / t_rel_sw
    return HarvestReport(t_rel_sr=t_rel_sr, t_rel_sw=t_rel_sw, hr=hr)


@dataclass(frozen=True)
class QueryRun:
    """Measured numbers for one query against one index, both modes."""

    query: Query
    term_count: int
    selected_count: int
    visited_count: int
    before_count: int
    after_count: int
    before_elapsed: float
    after_elapsed: float
    hr_before: float | None
    hr_after: float | None


def evaluate_index(
    ibag: IBAG,
    patterns: PatternStore,
    queries: Sequence[Query],
    *,
    repeats: int = 5,
    use_synonyms: bool = True,
    parallel: bool = False,
) -> list[QueryRun]:
    """Run every query in both modes; elapsed is the median of ``repeats`` runs.

    ``parallel`` runs queries on a thread pool; use it only for
    correctness sweeps, the timing fields are then meaningless.
    """
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")

    def run_one(query: Query) -> QueryRun:
        ontology = ibag.ontology_by_id(query.ontology_id)
        mask = gen_mask_bit_pattern(query.search_string, ontology, use_synonyms=use_synonyms)
        selected, visited = select_by_range(ibag, query.relevance_range, query.ontology_id)
        before_nodes = selected[: query.result_limit]
        after_nodes = find_predicted_webpage_list(
            selected, patterns, mask, ontology, query.result_limit
        )
        before_elapsed = statistics.median(
            search_before_masking(query, ibag).elapsed for _ in range(repeats)
        )
        after_elapsed = statistics.median(
            search_after_masking(query, ibag, patterns, use_synonyms).elapsed
            for _ in range(repeats)
        )
        return QueryRun(
            query=query,
            term_count=len(mask.positions()),
            selected_count=len(selected),
            visited_count=visited,
            before_count=len(before_nodes),
            after_count=len(after_nodes),
            before_elapsed=before_elapsed,
            after_elapsed=after_elapsed,
            hr_before=harvest_rate(query, before_nodes, selected, ibag, use_synonyms).hr,
            hr_after=harvest_rate(query, after_nodes, selected, ibag, use_synonyms).hr,
        )

    if parallel:
        with ThreadPoolExecutor(max_workers=4) as pool:
            return list(pool.map(run_one, queries))
    return [run_one(query) for query in queries]


@dataclass(frozen=True)
class BenchRow:
    size: int
    mode: str
    avg_count: float
    avg_elapsed_us: float
    avg_visited: float
    hr_mean: float | None

    def to_json_obj(self) -> dict:
        return {
            "size": self.size,
            "mode": self.mode,
            "avg_count": self.avg_count,
            "avg_elapsed_us": self.avg_elapsed_us,
            "avg_visited": self.avg_visited,
            "hr_mean": self.hr_mean,
        }


@dataclass(frozen=True)
class QueryDiagnostics:
    search_string: str
    ontology_id: int
    result_limit: int
    term_count: int

    def to_json_obj(self) -> dict:
        return {
            "search_string": self.search_string,
            "ontology_id": self.ontology_id,
            "result_limit": self.result_limit,
            "term_count": self.term_count,
        }


@dataclass
class BenchReport:
    rng_seed: int
    rows: list[BenchRow]
    queries: list[QueryDiagnostics]
    bit_op_seconds: float

    def to_json_obj(self) -> dict:
        return {
            "rng_seed": self.rng_seed,
            "bit_op_seconds": self.bit_op_seconds,
            "rows": [row.to_json_obj() for row in self.rows],
            "queries": [diag.to_json_obj() for diag in self.queries],
        }

    def csv_text(self) -> str:
        lines = [CSV_HEADER]
        for row in self.rows:
            hr = "" if row.hr_mean is None else f"{row.hr_mean:.6f}"
            lines.append(
                f"{row.size},{row.mode},{row.avg_count:.3f},"
                f"{row.avg_elapsed_us:.3f},{row.avg_visited:.3f},{hr}"
            )
        return "\n".join(lines) + "\n"

    def write(self, out_dir: str | Path) -> tuple[Path, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        json_path = out_dir / "report.json"
        csv_path = out_dir / "report.csv"
        json_path.write_text(
            json.dumps(self.to_json_obj(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        csv_path.write_text(self.csv_text(), encoding="utf-8")
        return json_path, csv_path


def aggregate_runs(size: int, runs: Sequence[QueryRun]) -> list[BenchRow]:
    """Fold per-query runs into one row per mode."""
    rows = []
    for mode in (BEFORE_MASKING, AFTER_MASKING):
        if mode == BEFORE_MASKING:
            counts = [run.before_count for run in runs]
            elapsed = [run.before_elapsed for run in runs]
            hrs = [run.hr_before for run in runs]
        else:
            counts = [run.after_count for run in runs]
            elapsed = [run.after_elapsed for run in runs]
            hrs = [run.hr_after for run in runs]
        defined = [hr for hr in hrs if hr is not None]
        rows.append(
            BenchRow(
                size=size,
                mode=mode,
                avg_count=statistics.fmean(counts),
                avg_elapsed_us=statistics.fmean(elapsed) * 1e6,
                avg_visited=statistics.fmean(run.visited_count for run in runs),
                hr_mean=statistics.fmean(defined) if defined else None,
            )
        )
    return rows


def measure_bit_op_seconds(length: int = 64, iterations: int = 200_000) -> float:
    """Rough per-operation cost of one whole-word XOR (loop overhead included)."""
    a = (1 << length) - 1
    b = a >> 1
    start = time.perf_counter()
    x = 0
    for _ in range(iterations):
        x = a ^ b
    elapsed = time.perf_counter() - start
    del x
    return elapsed / iterations


def run_benchmark(
    corpus_sizes: Sequence[int],
    query_set: Sequence[Query],
    rng_seed: int,
    *,
    ontologies: Sequence[Ontology] | None = None,
    gen_config: GenerationConfig | None = None,
    repeats: int = 5,
    use_synonyms: bool = True,
    parallel: bool = False,
) -> BenchReport:
    """Build a synthetic index at each size and measure every query, both modes."""
    sizes = list(corpus_sizes)
    if not sizes:
        raise ValueError("corpus_sizes must not be empty")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("corpus sizes must be strictly ascending")
    queries = list(query_set)
    if not queries:
        raise ValueError("query set must not be empty")
    if ontologies is None:
        from .bundled import default_ontologies

        ontologies = default_ontologies()
    ontologies = tuple(ontologies)

    rows: list[BenchRow] = []
    diagnostics: list[QueryDiagnostics] = []
    for size in sizes:
        corpus = synth_corpus(rng_seed * 1_000_003 + size, size, ontologies, gen_config)
        rpag = build_rpag(corpus, ontologies)
        ibag = build_ibag(rpag)
        patterns = gen_ibag_bit_patterns(ibag, ontologies)
        runs = evaluate_index(
            ibag, patterns, queries, repeats=repeats, use_synonyms=use_synonyms, parallel=parallel
        )
        rows.extend(aggregate_runs(size, runs))
        if not diagnostics:
            diagnostics = [
                QueryDiagnostics(
                    search_string=run.query.search_string,
                    ontology_id=run.query.ontology_id,
                    result_limit=run.query.result_limit,
                    term_count=run.term_count,
                )
                for run in runs
            ]
        log.info("benchmarked size %d: %d index pages", size, len(ibag))
    return BenchReport(
        rng_seed=rng_seed,
        rows=rows,
        queries=diagnostics,
        bit_op_seconds=measure_bit_op_seconds(),
    )


def traversal_cost_check(m_levels: int, pages_per_level: int) -> float:
    """Mean visits to reach a page via its level head plus a chain walk.

    Builds an index with exactly ``m_levels`` levels of ``pages_per_level``
    supporting pages each, then for every page restarts at its level head
    and counts nodes touched until the page is reached. With L pages per
    level the mean is (L + 1) / 2 regardless of the level count.
    """
    if m_levels < 1:
        raise ValueError(f"m_levels must be >= 1, got {m_levels}")
    if pages_per_level < 1:
        raise ValueError(f"pages_per_level must be >= 1, got {pages_per_level}")
    probe = Ontology(
        ontology_id=1,
        name="probe",
        terms=(OntologyTerm(term="probe", weight=1.0),),
        relevance_limit=0.0,
    )
    nodes: list[IBAGNode] = []
    for level in range(m_levels):
        base = level * pages_per_level
        parent = None if level == 0 else (level - 1) * pages_per_level
        for i in range(pages_per_level):
            nodes.append(
                IBAGNode(
                    p_id=base + i,
                    url=f"page-{base + i}",
                    pp_id=parent,
                    mean_rel_val=float(pages_per_level - i),
                    level=level,
                    supported={1: True},
                    term_vectors={1: (1.0,)},
                )
            )
    ibag = IBAG.from_nodes(nodes, (probe,))

    total_visits = 0
    total_pages = 0
    for level in range(m_levels):
        targets = [node.p_id for node in ibag.iter_chain(level, 1)]
        for target in targets:
            visits = 0
            for node in ibag.iter_chain(level, 1):
                visits += 1
                if node.p_id == target:
                    break
            total_visits += visits
            total_pages += 1
    return total_visits / total_pages


@dataclass(frozen=True)
class HRDirectionResult:
    """Outcome of the seeded harvest-rate direction experiment."""

    pairs_total: int
    pairs_valid: int
    pairs_after_ge_before: int

    @property
    def ratio(self) -> float | None:
        if not self.pairs_valid:
            return None
        return self.pairs_after_ge_before / self.pairs_valid


_FILLER_WORDS = ("best", "today", "guide", "report", "review", "latest")


def hr_direction_experiment(
    n_pairs: int = 100,
    ks: Sequence[int] = (20, 50, 100),
    rng_seed: int = 20260809,
    *,
    ontologies: Sequence[Ontology] | None = None,
    gen_config: GenerationConfig | None = None,
) -> HRDirectionResult:
    """Seeded (corpus, query) pairs comparing harvest rates of both modes.

    Each pair uses the full [min, max] mean-relevance range, so the
    selection covers every supporting page. Pairs whose filtered result is
    empty, or whose harvest rate is undefined, do not count as valid.
    """
    if ontologies is None:
        from .bundled import default_ontologies

        ontologies = default_ontologies()
    ontologies = tuple(ontologies)
    master = random.Random(rng_seed)
    valid = 0
    after_ge_before = 0
    for i in range(n_pairs):
        corpus_seed = master.randrange(2**31)
        n_docs = master.randint(80, 160)
        ontology = ontologies[master.randrange(len(ontologies))]
        chosen_terms = master.sample(list(ontology.terms), k=master.randint(1, 2))
        words = [term.phrases()[master.randrange(len(term.phrases()))] for term in chosen_terms]
        words.extend(master.sample(_FILLER_WORDS, k=master.randint(0, 2)))
        search_string = " ".join(words)
        k = ks[i % len(ks)]

        corpus = synth_corpus(corpus_seed, n_docs, ontologies, gen_config)
        rpag = build_rpag(corpus, ontologies)
        if not rpag.nodes:
            continue
        ibag = build_ibag(rpag)
        patterns = gen_ibag_bit_patterns(ibag, ontologies)
        bounds = ibag.mean_value_bounds()
        query = Query(
            search_string=search_string,
            ontology_id=ontology.ontology_id,
            relevance_range=bounds,
            result_limit=k,
        )
        mask = gen_mask_bit_pattern(query.search_string, ontology)
        selected, _ = select_by_range(ibag, query.relevance_range, query.ontology_id)
        before_nodes = selected[:k]
        after_nodes = find_predicted_webpage_list(selected, patterns, mask, ontology, k)
        hr_before = harvest_rate(query, before_nodes, selected, ibag).hr
        hr_after = harvest_rate(query, after_nodes, selected, ibag).hr
        if not after_nodes or hr_before is None or hr_after is None:
            continue
        valid += 1
        if hr_after >= hr_before:
            after_ge_before += 1
    return HRDirectionResult(
        pairs_total=n_pairs,
        pairs_valid=valid,
        pairs_after_ge_before=after_ge_before,
    )
