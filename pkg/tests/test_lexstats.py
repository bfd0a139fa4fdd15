from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from dramaturg.corpus import tokenize
from dramaturg.errors import EmptyScopeError
from dramaturg.lexstats import type_token_ratio, word_frequencies

WORDS = ["nuit", "désir", "homme", "froid", "temps", "main", "regard", "heure"]


def _tokens(words: list[str]):
    return tokenize(" ".join(words))


class TestTypeTokenRatio:
    def test_all_distinct_gives_one(self):
        summary = type_token_ratio(_tokens(["a", "b", "c"]))
        assert summary.ttr == 1.0
        assert summary.token_count == 3
        assert summary.type_count == 3

    def test_single_repeated_token(self):
        summary = type_token_ratio(_tokens(["a", "a", "a", "a"]))
        assert summary.ttr == 0.25

    def test_synthetic_play_matches_naive_oracle_exactly(self):
        rng = random.Random(7)
        words = [WORDS[rng.randrange(len(WORDS))] for _ in range(1500)]
        tokens = _tokens(words)
        summary = type_token_ratio(tokens)
        lowers = [t.lower for t in tokens if t.is_alpha]
        assert summary.ttr == oracles.naive_ttr(lowers)
        assert summary.token_count == len(lowers)

    def test_empty_scope_is_an_error_not_zero(self):
        with pytest.raises(EmptyScopeError):
            type_token_ratio(_tokens([]))
        with pytest.raises(EmptyScopeError):
            type_token_ratio(tokenize("12 ; 34 !"))

    def test_nonstop_policy_excludes_stopwords(self):
        tokens = tokenize("le chat le chien", frozenset({"le"}))
        summary = type_token_ratio(tokens, "alpha_nonstop")
        assert summary.token_count == 2
        assert summary.type_count == 2

    def test_case_folding_merges_types(self):
        summary = type_token_ratio(_tokens(["Nuit", "nuit", "NUIT"]))
        assert summary.type_count == 1
        assert summary.ttr == pytest.approx(1 / 3)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.sampled_from(WORDS), min_size=1, max_size=300))
    def test_duplication_never_increases_ttr(self, words):
        base = type_token_ratio(_tokens(words))
        extended = type_token_ratio(_tokens(words + [words[0]]))
        assert extended.ttr <= base.ttr


class TestWordFrequencies:
    def test_basic_counting(self):
        table = word_frequencies(_tokens(["désir", "désir", "nuit"]), frozenset(), 10)
        assert table.entries == (("désir", 2), ("nuit", 1))
        assert table.total == 3

    def test_stopword_filtering(self):
        table = word_frequencies(_tokens(["de", "nuit", "de"]), frozenset({"de"}), 10)
        assert table.entries == (("nuit", 1),)
        assert table.total == 1

    def test_tie_break_is_term_ascending(self):
        table = word_frequencies(_tokens(["b", "a", "c", "a", "c", "b"]), frozenset(), 10)
        assert table.entries == (("a", 2), ("b", 2), ("c", 2))

    def test_empty_admissible_set_yields_empty_table(self):
        table = word_frequencies(tokenize("12, 34"), frozenset(), 10)
        assert table.entries == ()
        assert table.total == 0

    def test_random_corpus_matches_naive_oracle(self):
        rng = random.Random(11)
        words = [WORDS[rng.randrange(len(WORDS))] for _ in range(10_000)]
        tokens = _tokens(words)
        stoplist = frozenset({"nuit", "temps"})
        table = word_frequencies(tokens, stoplist, 5)
        lowers = [t.lower for t in tokens if t.is_alpha]
        assert list(table.entries) == oracles.naive_frequencies(lowers, set(stoplist), 5)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.sampled_from(WORDS), min_size=1, max_size=200),
        st.integers(min_value=1, max_value=8),
    )
    def test_top_k_is_prefix_of_top_k_plus_one(self, words, k):
        tokens = _tokens(words)
        smaller = word_frequencies(tokens, frozenset(), k)
        larger = word_frequencies(tokens, frozenset(), k + 1)
        assert larger.entries[: len(smaller.entries)] == smaller.entries


class TestFrequencyTableInvariants:
    def test_counts_sum_to_total_and_terms_unique(self):
        rng = random.Random(3)
        words = [WORDS[rng.randrange(len(WORDS))] for _ in range(500)]
        table = word_frequencies(_tokens(words), frozenset(), 6)
        assert sum(c for _, c in table.entries) == table.total
        terms = [t for t, _ in table.entries]
        assert len(terms) == len(set(terms))
        counts = [c for _, c in table.entries]
        assert counts == sorted(counts, reverse=True)
