"""String similarity metrics for company-name comparison.

Three complementary views of the same pair: edit distance over characters
(Levenshtein), angular similarity over character n-gram frequency vectors
(cosine), and overlap over n-gram sets (Jaccard). All similarities live in
[0, 1] with 1 meaning identical under the chosen view.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .normalize import NormalizationProfile, normalize_name

__all__ = [
    "ScoreTriple",
    "VectorizerConfig",
    "VectorizerMode",
    "cosine_similarity",
    "jaccard_distance",
    "jaccard_similarity",
    "levenshtein_distance",
    "levenshtein_similarity",
    "score_pair",
    "vectorize",
]


def levenshtein_distance(a: str, b: str) -> int:
    """Minimum number of single-character edits turning ``a`` into ``b``.

    Edits are insertion, deletion, and substitution, each costing 1
    (``"kitten"`` to ``"sitting"`` is 3). Computed with the classic dynamic
    program whose border encodes that transforming from or to the empty
    string costs the other string's length.

    Args:
        a: first string.
        b: second string.

    Returns:
        The edit distance, an int in ``[abs(len(a)-len(b)), max(len(a), len(b))]``.
    """
    if a == b:
        return 0
    # Keep the shorter string in the inner dimension for the two-row DP.
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ch_a in enumerate(a, 1):
        current = [i]
        for j, ch_b in enumerate(b, 1):
            cost = 0 if ch_a == ch_b else 1
            current.append(
                min(
                    previous[j] + 1,  # delete from a
                    current[j - 1] + 1,  # insert into a
                    previous[j - 1] + cost,  # substitute
                )
            )
        previous = current
    return previous[-1]


def levenshtein_similarity(a: str, b: str) -> float:
    """Edit distance rescaled to a similarity in [0, 1].

    Defined as ``1 - distance / max(len(a), len(b))``; two empty strings are
    identical by convention, so the score is 1.0.
    """
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein_distance(a, b) / longest


class VectorizerMode(str, Enum):
    """How a string becomes a frequency vector."""

    CHAR_NGRAM = "char_ngram"
    TOKEN = "token"


@dataclass(frozen=True)
class VectorizerConfig:
    """Vectorization settings: mode, n-gram width, raw-frequency weighting."""

    mode: VectorizerMode = VectorizerMode.CHAR_NGRAM
    n: int = 2

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n-gram width must be >= 1, got {self.n}")


def vectorize(text: str, config: VectorizerConfig) -> dict[str, int]:
    """Build a raw-frequency vector for a string.

    In char_ngram mode the string is padded with ``n - 1`` spaces on each side
    so word boundaries contribute n-grams: ``"AB"`` with n=2 yields
    ``{" A": 1, "AB": 1, "B ": 1}``. In token mode whitespace-separated tokens
    are counted. The empty string always maps to the empty vector.

    Args:
        text: input string (normally an already-normalized name).
        config: vectorization settings.

    Returns:
        Sparse mapping of feature to count; values are positive ints.
    """
    if not text:
        return {}
    counts: dict[str, int] = {}
    if config.mode is VectorizerMode.TOKEN:
        for token in text.split():
            counts[token] = counts.get(token, 0) + 1
        return counts
    pad = " " * (config.n - 1)
    padded = f"{pad}{text}{pad}"
    for i in range(len(padded) - config.n + 1):
        gram = padded[i : i + config.n]
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def cosine_similarity(u: Mapping[str, int], v: Mapping[str, int]) -> float:
    """Cosine of the angle between two frequency vectors.

    ``dot(u, v) / (|u| * |v|)``; if either vector is empty (or all-zero) the
    similarity is 0.0 by convention. Counts are non-negative, so the result
    lies in [0, 1].
    """
    if not u or not v:
        return 0.0
    # Iterate over the smaller vector for the sparse dot product.
    small, large = (u, v) if len(u) <= len(v) else (v, u)
    dot = sum(count * large.get(feature, 0) for feature, count in small.items())
    norm_u = math.sqrt(sum(c * c for c in u.values()))
    norm_v = math.sqrt(sum(c * c for c in v.values()))
    if norm_u == 0.0 or norm_v == 0.0:
        return 0.0
    return min(1.0, dot / (norm_u * norm_v))


def jaccard_similarity(a: frozenset[str] | set[str], b: frozenset[str] | set[str]) -> float:
    """Set overlap ``|A ∩ B| / |A ∪ B|``; two empty sets are identical (1.0)."""
    if not a and not b:
        return 1.0
    union = len(a | b)
    if union == 0:
        return 1.0
    return len(a & b) / union


def jaccard_distance(a: frozenset[str] | set[str], b: frozenset[str] | set[str]) -> float:
    """``1 - jaccard_similarity``; a metric on finite sets."""
    return 1.0 - jaccard_similarity(a, b)


@dataclass(frozen=True)
class ScoreTriple:
    """The three name-similarity scores for one declared/official pair."""

    levenshtein: float
    cosine: float
    jaccard: float

    def __post_init__(self) -> None:
        for name in ("levenshtein", "cosine", "jaccard"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} score {value} outside [0, 1]")

    def as_dict(self) -> dict[str, float]:
        return {
            "levenshtein": self.levenshtein,
            "cosine": self.cosine,
            "jaccard": self.jaccard,
        }


def score_pair(
    declared: str,
    official: str,
    profile: NormalizationProfile,
    vectorizer: VectorizerConfig,
) -> ScoreTriple:
    """Normalize two names and score them under all three metrics.

    Levenshtein runs on the normalized strings, cosine on their frequency
    vectors, and Jaccard on their whitespace token sets. Identical inputs
    (post-normalization) score 1.0 everywhere; the scores are symmetric in
    the two names.

    Args:
        declared: name as declared in the filing.
        official: name from the official register.
        profile: normalization applied to both names.
        vectorizer: settings for the cosine vectors.

    Returns:
        A :class:`ScoreTriple` with all scores in [0, 1].
    """
    left = normalize_name(declared, profile)
    right = normalize_name(official, profile)
    return ScoreTriple(
        levenshtein=levenshtein_similarity(left, right),
        cosine=cosine_similarity(vectorize(left, vectorizer), vectorize(right, vectorizer)),
        jaccard=jaccard_similarity(set(left.split()), set(right.split())),
    )
