from __future__ import annotations

import math

import pytest

from ibagsearch import (
    Query,
    build_ibag,
    build_rpag,
    gen_ibag_bit_patterns,
    parse_relevance_range,
    search_after_masking,
    search_before_masking,
    select_by_range,
    synth_corpus,
)
from conftest import flat_ontology, make_corpus
from oracles import oracle_predicted_urls


@pytest.fixture(scope="module")
def engine(bundled_onts):
    corpus = synth_corpus(23, 150, bundled_onts)
    ibag = build_ibag(build_rpag(corpus, bundled_onts))
    patterns = gen_ibag_bit_patterns(ibag, bundled_onts)
    return ibag, patterns


class TestQueryValidation:
    def test_inverted_range_rejected(self):
        with pytest.raises(ValueError):
            Query("x", 1, relevance_range=(2.0, 1.0))

    def test_zero_limit_rejected(self):
        with pytest.raises(ValueError):
            Query("x", 1, result_limit=0)

    def test_defaults(self):
        query = Query("cricket", 1)
        assert query.relevance_range == (0.0, math.inf)
        assert query.result_limit == 20


class TestParseRange:
    def test_plain(self):
        assert parse_relevance_range("0.5:2") == (0.5, 2.0)

    def test_inf_upper_bound(self):
        assert parse_relevance_range("0:inf") == (0.0, math.inf)

    @pytest.mark.parametrize("text", ["1", "a:b", "2:1", "1:2:3", "nan:1"])
    def test_rejects_malformed(self, text):
        with pytest.raises(ValueError):
            parse_relevance_range(text)


class TestBeforeMasking:
    def test_limit_truncates(self, engine):
        ibag, _ = engine
        outcome = search_before_masking(Query("anything", 1, result_limit=20), ibag)
        assert len(outcome.results) == 20
        assert outcome.selected_count >= 20

    def test_empty_selection(self, engine):
        ibag, _ = engine
        _, top = ibag.mean_value_bounds()
        query = Query("anything", 1, relevance_range=(top + 1, top + 2))
        outcome = search_before_masking(query, ibag)
        assert outcome.results == ()
        assert outcome.selected_count == 0

    def test_first_k_of_selection(self, engine):
        ibag, _ = engine
        query = Query("anything", 1, relevance_range=(1.2, 3.0), result_limit=5)
        outcome = search_before_masking(query, ibag)
        selected, _ = select_by_range(ibag, (1.2, 3.0), 1)
        assert list(outcome.results) == [(n.url, n.mean_rel_val) for n in selected[:5]]

    def test_unknown_ontology_rejected(self, engine):
        ibag, _ = engine
        with pytest.raises(ValueError, match="unknown ontology"):
            search_before_masking(Query("x", 42), ibag)


class TestAfterMasking:
    def test_worked_scenario_page_included(self):
        seven = flat_ontology([f"term{i}" for i in range(7)], term_limit=0.5)
        corpus = make_corpus(
            [
                ("home", ["p", "q"], "term0 intro"),
                ("p", [], "term1 body with term4 too"),
                ("q", [], "term3 only"),
            ]
        )
        ibag = build_ibag(build_rpag(corpus, [seven]))
        patterns = gen_ibag_bit_patterns(ibag, [seven])
        outcome = search_after_masking(Query("term1", 1), ibag, patterns)
        assert [url for url, _ in outcome.results] == ["p"]

    def test_no_matching_terms_gives_empty_results(self, engine):
        ibag, patterns = engine
        query = Query("zz yy xx", 1)
        after = search_after_masking(query, ibag, patterns)
        before = search_before_masking(query, ibag)
        assert after.results == ()
        assert after.selected_count == before.selected_count

    def test_results_subset_of_selection_in_order(self, engine):
        ibag, patterns = engine
        query = Query("cricket umpire", 1, result_limit=30)
        after = search_after_masking(query, ibag, patterns)
        selected, _ = select_by_range(ibag, query.relevance_range, 1)
        urls = [n.url for n in selected]
        positions = [urls.index(url) for url, _ in after.results]
        assert positions == sorted(positions)

    def test_matches_end_to_end_oracle(self, engine, bundled_onts):
        ibag, patterns = engine
        ontology = bundled_onts[0]
        for search in ("cricket", "wicket keeper contest", "judge", "bat match"):
            for lo, hi, k in ((0.0, math.inf, 10), (1.3, 2.5, 4), (2.0, 2.0, 3)):
                query = Query(search, 1, relevance_range=(lo, hi), result_limit=k)
                outcome = search_after_masking(query, ibag, patterns)
                expected = oracle_predicted_urls(ibag, ontology, search, lo, hi, k)
                assert [url for url, _ in outcome.results] == expected

    def test_synonym_toggle_changes_mask(self, engine):
        ibag, patterns = engine
        query = Query("judge", 1, result_limit=10)
        with_synonyms = search_after_masking(query, ibag, patterns, use_synonyms=True)
        without = search_after_masking(query, ibag, patterns, use_synonyms=False)
        assert without.results == ()
        assert len(with_synonyms.results) > 0

    def test_deterministic_across_runs(self, engine):
        ibag, patterns = engine
        query = Query("cricket match", 1, result_limit=15)
        first = search_after_masking(query, ibag, patterns)
        second = search_after_masking(query, ibag, patterns)
        assert first.results == second.results
        assert first.visited_count == second.visited_count

    def test_after_count_never_exceeds_before_at_same_limit(self, engine):
        ibag, patterns = engine
        for search in ("cricket", "match", "umpire bat"):
            for k in (1, 5, 50):
                query = Query(search, 1, result_limit=k)
                before = search_before_masking(query, ibag)
                after = search_after_masking(query, ibag, patterns)
                assert len(after.results) <= len(before.results)
                assert len(after.results) <= min(k, after.selected_count)
