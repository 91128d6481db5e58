"""String metrics: fixed values, metric axioms, and oracle agreement."""

import random
from functools import lru_cache

import pytest
from hypothesis import given, strategies as st

from entitymatch.normalize import NormalizationProfile
from entitymatch.similarity import (
    ScoreTriple,
    VectorizerConfig,
    VectorizerMode,
    cosine_similarity,
    jaccard_distance,
    jaccard_similarity,
    levenshtein_distance,
    levenshtein_similarity,
    score_pair,
    vectorize,
)

FULL = NormalizationProfile()
BIGRAMS = VectorizerConfig()
SHORT = st.text(alphabet="abc", max_size=8)


def naive_levenshtein(a: str, b: str) -> int:
    """Deliberately naive recursion used as an independent oracle."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    cost = 0 if a[-1] == b[-1] else 1
    return min(
        naive_levenshtein(a[:-1], b) + 1,
        naive_levenshtein(a, b[:-1]) + 1,
        naive_levenshtein(a[:-1], b[:-1]) + cost,
    )


# -- levenshtein ---------------------------------------------------------------


def test_textbook_pair():
    assert levenshtein_distance("kitten", "sitting") == 3


@pytest.mark.parametrize(
    "a,b,expected",
    [
        ("", "", 0),
        ("", "abc", 3),
        ("abc", "", 3),
        ("abc", "abc", 0),
        ("abc", "abd", 1),
        ("flaw", "lawn", 2),
    ],
)
def test_distance_fixed_values(a, b, expected):
    assert levenshtein_distance(a, b) == expected


def test_similarity_fixed_values():
    assert levenshtein_similarity("", "") == 1.0
    assert levenshtein_similarity("a", "b") == 0.0
    assert levenshtein_similarity("kitten", "sitting") == pytest.approx(1 - 3 / 7)


@given(SHORT, SHORT)
def test_distance_matches_memoized_oracle(a, b):
    # the exhaustive naive-oracle sweep lives in the acceptance suite
    assert levenshtein_distance(a, b) == _memo_levenshtein(a, b)


def test_distance_matches_naive_oracle_on_small_pairs():
    pairs = [("", ""), ("a", "b"), ("ab", "ba"), ("abc", "cab"), ("aabb", "bbaa"), ("abcab", "bca")]
    for a, b in pairs:
        assert levenshtein_distance(a, b) == naive_levenshtein(a, b)


@lru_cache(maxsize=None)
def _memo_levenshtein(a: str, b: str) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    cost = 0 if a[-1] == b[-1] else 1
    return min(
        _memo_levenshtein(a[:-1], b) + 1,
        _memo_levenshtein(a, b[:-1]) + 1,
        _memo_levenshtein(a[:-1], b[:-1]) + cost,
    )


@given(SHORT, SHORT)
def test_distance_symmetry(a, b):
    assert levenshtein_distance(a, b) == levenshtein_distance(b, a)


@given(SHORT)
def test_distance_identity(a):
    assert levenshtein_distance(a, a) == 0


@given(SHORT, SHORT, SHORT)
def test_distance_triangle_inequality(a, b, c):
    assert levenshtein_distance(a, c) <= levenshtein_distance(a, b) + levenshtein_distance(b, c)


@given(SHORT, SHORT)
def test_distance_bounds(a, b):
    d = levenshtein_distance(a, b)
    assert abs(len(a) - len(b)) <= d <= max(len(a), len(b), 0)


@given(SHORT, SHORT)
def test_similarity_in_unit_interval(a, b):
    assert 0.0 <= levenshtein_similarity(a, b) <= 1.0


# -- vectorize -------------------------------------------------------------------


def test_bigram_vector_with_boundary_padding():
    assert vectorize("AB", BIGRAMS) == {" A": 1, "AB": 1, "B ": 1}


def test_bigram_vector_counts_repeats():
    assert vectorize("AAA", BIGRAMS) == {" A": 1, "AA": 2, "A ": 1}


def test_empty_string_maps_to_empty_vector():
    assert vectorize("", BIGRAMS) == {}
    assert vectorize("", VectorizerConfig(mode=VectorizerMode.TOKEN)) == {}


def test_token_vector():
    cfg = VectorizerConfig(mode=VectorizerMode.TOKEN)
    assert vectorize("CAT CAT DOG", cfg) == {"CAT": 2, "DOG": 1}


def test_unigram_mode_has_no_padding():
    cfg = VectorizerConfig(n=1)
    assert vectorize("AB", cfg) == {"A": 1, "B": 1}


def test_vectorizer_rejects_nonpositive_n():
    with pytest.raises(ValueError):
        VectorizerConfig(n=0)


# -- cosine ----------------------------------------------------------------------


def test_cosine_identical_vectors():
    v = vectorize("ACME LDA", BIGRAMS)
    assert cosine_similarity(v, v) == pytest.approx(1.0)


def test_cosine_disjoint_vectors():
    assert cosine_similarity({"A": 1}, {"B": 1}) == 0.0


def test_cosine_empty_vector_convention():
    assert cosine_similarity({}, {"A": 1}) == 0.0
    assert cosine_similarity({}, {}) == 0.0


def test_cosine_known_value():
    # dot = 1, norms 1 and sqrt(2)
    assert cosine_similarity({"A": 1}, {"A": 1, "B": 1}) == pytest.approx(1 / 2**0.5)


def test_cosine_invariant_under_scaling():
    u = {"A": 1, "B": 2}
    v = {"A": 3, "B": 6}
    assert cosine_similarity(u, v) == pytest.approx(1.0)


VECTORS = st.dictionaries(st.text(alphabet="ABC", min_size=1, max_size=2), st.integers(1, 9), max_size=5)


@given(VECTORS, VECTORS)
def test_cosine_bounds_and_symmetry(u, v):
    value = cosine_similarity(u, v)
    assert 0.0 <= value <= 1.0
    assert value == pytest.approx(cosine_similarity(v, u))


# -- jaccard ---------------------------------------------------------------------


def test_jaccard_worked_example():
    a = {"cat", "dog", "mouse"}
    b = {"cat", "bird"}
    assert jaccard_similarity(a, b) == 0.25
    assert jaccard_distance(a, b) == 0.75


def test_jaccard_conventions():
    assert jaccard_similarity(set(), set()) == 1.0
    assert jaccard_similarity({"A"}, {"A"}) == 1.0
    assert jaccard_similarity({"A"}, {"B"}) == 0.0


SETS = st.sets(st.text(alphabet="ABCDE", min_size=1, max_size=2), max_size=6)


@given(SETS, SETS)
def test_jaccard_bounds_and_symmetry(a, b):
    value = jaccard_similarity(a, b)
    assert 0.0 <= value <= 1.0
    assert value == jaccard_similarity(b, a)
    assert jaccard_distance(a, b) == pytest.approx(1.0 - value)


@given(SETS, SETS)
def test_jaccard_growing_intersection_does_not_lower_similarity(a, b):
    base = jaccard_similarity(a, b)
    shared = a | b
    assert jaccard_similarity(shared, shared) >= base


# -- score_pair -------------------------------------------------------------------


def test_identical_names_score_one_everywhere():
    triple = score_pair("SOLARSHOP, UNIPESSOAL LDA", "SOLARSHOP, UNIPESSOAL, LDA", FULL, BIGRAMS)
    assert triple.levenshtein == 1.0
    assert triple.cosine == pytest.approx(1.0)
    assert triple.jaccard == 1.0


def test_unrelated_single_tokens_score_zero():
    triple = score_pair("AAAA", "BBBB", FULL, BIGRAMS)
    assert triple.levenshtein == 0.0
    assert triple.cosine == 0.0
    assert triple.jaccard == 0.0


def test_score_triple_validates_range():
    with pytest.raises(ValueError):
        ScoreTriple(levenshtein=1.2, cosine=0.0, jaccard=0.0)


@given(st.text(max_size=30), st.text(max_size=30))
def test_score_pair_symmetric(a, b):
    one = score_pair(a, b, FULL, BIGRAMS)
    other = score_pair(b, a, FULL, BIGRAMS)
    assert one.levenshtein == pytest.approx(other.levenshtein)
    assert one.cosine == pytest.approx(other.cosine)
    assert one.jaccard == pytest.approx(other.jaccard)


def test_scores_dict_keys():
    triple = score_pair("A", "A", FULL, BIGRAMS)
    assert set(triple.as_dict()) == {"levenshtein", "cosine", "jaccard"}


def test_random_pairs_stay_in_unit_interval():
    rng = random.Random(11)
    alphabet = "ABC ÇÃ-"
    for _ in range(300):
        a = "".join(rng.choice(alphabet) for _ in range(rng.randrange(12)))
        b = "".join(rng.choice(alphabet) for _ in range(rng.randrange(12)))
        triple = score_pair(a, b, FULL, BIGRAMS)
        for value in triple.as_dict().values():
            assert 0.0 <= value <= 1.0
