"""Company-name normalization.

Declared names arrive with mixed casing, diacritics, punctuation and local
abbreviations; registry names are stored fully expanded. This module maps both
onto a single comparable alphabet (uppercase ASCII letters, digits and single
spaces) so the string metrics compare substance, not typography.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

__all__ = [
    "NormalizationError",
    "NormalizationProfile",
    "default_profile",
    "expand_abbreviations",
    "fold_diacritics",
    "load_abbreviations",
    "normalize_name",
]

_TOKEN_RE = re.compile(r"^[A-Z0-9]+$")

# Letters whose canonical decomposition does not yield an ASCII base letter.
# These are explicit because NFD alone leaves them untouched.
_FOLD_OVERRIDES = {
    "Ł": "L", "ł": "l",
    "Ø": "O", "ø": "o",
    "Đ": "D", "đ": "d",
    "Ð": "D", "ð": "d",
    "Þ": "TH", "þ": "th",
    "Æ": "AE", "æ": "ae",
    "Œ": "OE", "œ": "oe",
    "ß": "ss", "ẞ": "SS",
}


class NormalizationError(ValueError):
    """Raised for invalid profiles or abbreviation dictionaries."""


def _validate_abbreviations(dictionary: Mapping[str, str]) -> None:
    """Reject dictionaries that could break idempotent expansion.

    Keys and values must be single uppercase alphanumeric tokens, and no value
    may itself be a key (otherwise a second pass would rewrite it again).
    """
    for key, value in dictionary.items():
        if not _TOKEN_RE.match(key):
            raise NormalizationError(
                f"abbreviation key {key!r} must be a single token of [A-Z0-9]+"
            )
        if not _TOKEN_RE.match(value):
            raise NormalizationError(
                f"abbreviation value {value!r} must be a single token of [A-Z0-9]+"
            )
        if value != key and value in dictionary:
            raise NormalizationError(
                f"abbreviation value {value!r} is itself a key; expansion would not "
                "be stable across repeated passes"
            )


@dataclass(frozen=True)
class NormalizationProfile:
    """Which normalization steps apply, and with which abbreviation table.

    All steps default to on with an empty abbreviation table. Steps always run
    in a fixed order: uppercase, diacritic folding, punctuation removal,
    whitespace collapsing, abbreviation expansion.
    """

    fold_diacritics: bool = True
    strip_punctuation: bool = True
    collapse_whitespace: bool = True
    uppercase: bool = True
    abbreviation_dictionary: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        _validate_abbreviations(self.abbreviation_dictionary)


def fold_diacritics(text: str) -> str:
    """Map accented Latin letters to their ASCII base letters.

    Canonical decomposition strips combining marks (É→E, ç→c, ã→a); letters
    that do not decompose (Ł, Ø, Đ, Ð, ...) are mapped through an explicit
    table. Characters with no ASCII base pass through unchanged.

    Args:
        text: any string.

    Returns:
        The folded string; ASCII input is returned unchanged.
    """
    decomposed = unicodedata.normalize("NFD", text)
    out: list[str] = []
    for ch in decomposed:
        if unicodedata.combining(ch):
            continue
        out.append(_FOLD_OVERRIDES.get(ch, ch))
    return unicodedata.normalize("NFC", "".join(out))


def expand_abbreviations(tokens: Iterable[str], dictionary: Mapping[str, str]) -> list[str]:
    """Replace whole tokens by their dictionary expansion.

    Substrings are never touched: only a token equal to a key is replaced, so
    the output has exactly as many tokens as the input.

    Args:
        tokens: uppercase, punctuation-free tokens.
        dictionary: mapping of abbreviation token to expanded token.

    Returns:
        A new token list, same length, with known abbreviations expanded.
    """
    _validate_abbreviations(dictionary)
    return [dictionary.get(token, token) for token in tokens]


def normalize_name(raw: str, profile: NormalizationProfile) -> str:
    """Normalize a company name according to the profile.

    With the full profile the output alphabet is uppercase ASCII letters,
    digits and single spaces, with no leading/trailing space, and the function
    is idempotent: ``normalize_name(normalize_name(x, p), p) ==
    normalize_name(x, p)``.

    Args:
        raw: name as declared or as stored in the register.
        profile: which steps to apply.

    Returns:
        The normalized name (possibly empty, e.g. for punctuation-only input).
    """
    text = raw
    if profile.uppercase:
        text = text.upper()
    if profile.fold_diacritics:
        text = fold_diacritics(text)
    if profile.strip_punctuation:
        # Everything that is not an ASCII letter or digit separates tokens.
        text = "".join(
            ch if (ch.isascii() and ch.isalnum()) else " " for ch in text
        )
    if profile.collapse_whitespace:
        text = " ".join(text.split())
    if profile.abbreviation_dictionary:
        tokens = text.split()
        expanded = expand_abbreviations(tokens, profile.abbreviation_dictionary)
        text = " ".join(expanded)
    return text


def load_abbreviations(path: Path | str) -> dict[str, str]:
    """Load an abbreviation table from a ``KEY=VALUE`` per line file.

    Blank lines and lines starting with ``#`` are ignored. The resulting
    dictionary is validated as for :class:`NormalizationProfile`.

    Raises:
        NormalizationError: on malformed lines or an unstable dictionary.
    """
    table: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise NormalizationError(
                f"{path}:{lineno}: expected KEY=VALUE, got {stripped!r}"
            )
        key, _, value = stripped.partition("=")
        table[key.strip()] = value.strip()
    _validate_abbreviations(table)
    return table


def default_profile() -> NormalizationProfile:
    """The full profile with the packaged abbreviation table."""
    data_file = Path(__file__).parent / "data" / "abbreviations.txt"
    return NormalizationProfile(abbreviation_dictionary=load_abbreviations(data_file))
