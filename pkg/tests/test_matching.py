from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgstress.matching import match_lists, normalize_list, token_set_ratio, token_set_score

rapidfuzz = pytest.importorskip("rapidfuzz")
from rapidfuzz import fuzz  # noqa: E402

CORPUS = json.loads((Path(__file__).parent / "data" / "token_set_corpus.json").read_text(encoding="utf-8"))["pairs"]
words = st.text(alphabet="abcde ", min_size=0, max_size=20)


@pytest.mark.parametrize("pair", CORPUS, ids=lambda p: p["kind"])
def test_frozen_reference_scores(pair):
    score = token_set_score(pair["a"], pair["b"])
    assert abs(score - pair["score"]) < 1e-9
    assert (score >= 80) == (pair["score"] >= 80)


@settings(max_examples=400, deadline=None)
@given(words, words)
def test_agrees_with_rapidfuzz(a, b):
    ref = fuzz.token_set_ratio(a, b, processor=str.lower)
    assert token_set_score(a, b) == pytest.approx(ref, abs=1e-9)
    assert abs(token_set_ratio(a, b) - ref) <= 0.5 + 1e-9


@settings(max_examples=200, deadline=None)
@given(words, words)
def test_symmetric_and_bounded(a, b):
    s = token_set_score(a, b)
    assert s == token_set_score(b, a)
    assert 0.0 <= s <= 100.0


def test_known_values():
    assert token_set_ratio("fuzzy wuzzy was a bear", "fuzzy fuzzy was a bear") == 100
    assert token_set_ratio("", "") == 0
    assert token_set_ratio("Sober Reality", "reality sober") == 100


def test_normalize_list():
    assert normalize_list([" A  b", "a b", "", None, 3]) == ["a b", "none", "3"]


def test_greedy_one_to_one():
    res = match_lists(["brown", "tawny"], ["brown", "browns", "tan"], 80)
    assert res.tp == 1 and res.fp == 2 and res.fn == 1
    assert res.matched_pairs[0][:2] == ("brown", "brown")
    assert sorted(res.unmatched_generated) == ["browns", "tan"]


def test_best_pair_taken_first():
    # "dark brown" could pair with either generated value; the exact one wins
    res = match_lists(["dark brown", "brown"], ["brown", "dark brown"], 80)
    assert {(t, g) for t, g, _ in res.matched_pairs} == {("dark brown", "dark brown"), ("brown", "brown")}


@settings(max_examples=100, deadline=None)
@given(st.lists(words, max_size=6), st.lists(words, max_size=6))
def test_match_counts_are_consistent(truth, gen):
    res = match_lists(truth, gen, 80)
    t, g = normalize_list(truth), normalize_list(gen)
    assert res.tp + res.fn == len(t) and res.tp + res.fp == len(g)
    swapped = match_lists(gen, truth, 80)
    assert swapped.tp == res.tp


def test_threshold_bounds():
    with pytest.raises(ValueError):
        match_lists(["a"], ["a"], 101)
