"""Legal-form extraction and reconciliation.

A filing exposes an entity's legal form up to three ways: a coded field
(``PT101``), an abbreviation trailing the declared name (``LDA``), and the
suffix of the official registry name (``LIMITADA``). Surface spellings vary
per country, so each is resolved to a canonical form and the canonical ids are
compared; the name-similarity score never sees any of this.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional

from .normalize import NormalizationProfile, normalize_name

__all__ = [
    "CanonicalLegalForm",
    "LegalFormCode",
    "LegalFormError",
    "LegalFormOutcome",
    "LegalFormRegistry",
    "LegalFormVerdict",
    "canonicalize_abbreviation",
    "compare_legal_forms",
    "default_code_map",
    "default_registry",
    "extract_legal_form",
    "load_code_map",
    "load_legal_form_registry",
    "parse_legal_form_code",
]

_CODE_RE = re.compile(r"^([A-Z]{2})(\d{3})$")
_ID_RE = re.compile(r"^[A-Z]{2}_[A-Z0-9_]+$")

# Profile used to clean surface forms before lookup: uppercase, fold, strip
# punctuation, collapse. No abbreviation expansion — legal-form tokens such as
# LDA must survive verbatim.
_SURFACE_PROFILE = NormalizationProfile(abbreviation_dictionary={})


class LegalFormError(ValueError):
    """Raised for malformed codes, registries, or mapping files."""


@dataclass(frozen=True)
class LegalFormCode:
    """Coded legal form from a filing: a country prefix plus three digits."""

    country: str
    number: str

    def __post_init__(self) -> None:
        if not re.match(r"^[A-Z]{2}$", self.country):
            raise LegalFormError(
                f"legal-form code country must be two uppercase letters, got {self.country!r}"
            )
        if not re.match(r"^\d{3}$", self.number):
            raise LegalFormError(
                f"legal-form code number must be three digits, got {self.number!r}"
            )

    def __str__(self) -> str:
        return f"{self.country}{self.number}"


def parse_legal_form_code(raw: str) -> LegalFormCode:
    """Parse a coded legal-form field such as ``"PT101"``.

    Raises:
        LegalFormError: when the text is not two uppercase letters followed by
            exactly three digits.
    """
    match = _CODE_RE.match(raw.strip())
    if not match:
        raise LegalFormError(
            f"malformed legal-form code {raw!r}; expected two letters plus three digits (e.g. PT101)"
        )
    return LegalFormCode(match.group(1), match.group(2))


def _canonical_spelling(canonical_id: str) -> str:
    """The id's own spelling: drop the country prefix, underscores to spaces."""
    _, _, rest = canonical_id.partition("_")
    return rest.replace("_", " ")


@dataclass(frozen=True)
class CanonicalLegalForm:
    """One canonical legal form with all surface spellings that resolve to it."""

    canonical_id: str
    surface_forms: frozenset[str]

    def __post_init__(self) -> None:
        if not _ID_RE.match(self.canonical_id):
            raise LegalFormError(
                f"canonical id {self.canonical_id!r} must look like CC_NAME (e.g. PT_LDA)"
            )
        if not self.surface_forms:
            raise LegalFormError(f"{self.canonical_id}: surface form set must be non-empty")
        spelling = _canonical_spelling(self.canonical_id)
        if spelling not in self.surface_forms:
            raise LegalFormError(
                f"{self.canonical_id}: surface forms must include the canonical "
                f"spelling {spelling!r}"
            )


class LegalFormRegistry:
    """All known canonical forms, indexed by their normalized surface forms."""

    def __init__(self, forms: Iterable[CanonicalLegalForm]):
        self.forms: tuple[CanonicalLegalForm, ...] = tuple(forms)
        self._by_surface: dict[str, CanonicalLegalForm] = {}
        self._max_tokens = 0
        for form in self.forms:
            for surface in form.surface_forms:
                existing = self._by_surface.get(surface)
                if existing is not None and existing is not form:
                    raise LegalFormError(
                        f"surface form {surface!r} is claimed by both "
                        f"{existing.canonical_id} and {form.canonical_id}"
                    )
                self._by_surface[surface] = form
                self._max_tokens = max(self._max_tokens, len(surface.split()))

    def lookup_surface(self, surface: str) -> Optional[CanonicalLegalForm]:
        return self._by_surface.get(surface)

    def get(self, canonical_id: str) -> CanonicalLegalForm:
        for form in self.forms:
            if form.canonical_id == canonical_id:
                return form
        raise LegalFormError(f"unknown canonical legal form {canonical_id!r}")

    @property
    def max_surface_tokens(self) -> int:
        return self._max_tokens


def extract_legal_form(
    normalized_name: str, registry: LegalFormRegistry
) -> tuple[str, Optional[CanonicalLegalForm]]:
    """Split a normalized name into base name and trailing legal form.

    The longest trailing token sequence that matches a known surface form
    wins, so ``"VMAXPARTS UNIPESSOAL LDA"`` resolves to the one-person-company
    form rather than to plain ``LDA``.

    Args:
        normalized_name: a name already passed through normalization.
        registry: known canonical forms.

    Returns:
        ``(base_name, form)``; ``form`` is None and the name is returned
        untouched when no suffix matches.
    """
    tokens = normalized_name.split()
    for width in range(min(registry.max_surface_tokens, len(tokens)), 0, -1):
        suffix = " ".join(tokens[-width:])
        form = registry.lookup_surface(suffix)
        if form is not None:
            return " ".join(tokens[:-width]), form
    return normalized_name, None


def canonicalize_abbreviation(
    raw: str, registry: LegalFormRegistry
) -> Optional[CanonicalLegalForm]:
    """Resolve a declared legal-form abbreviation (``"S.A."``, ``"Ltda"``).

    The raw text is uppercased and stripped of punctuation before lookup.

    Returns:
        The canonical form, or None when the spelling is unknown.
    """
    surface = normalize_name(raw, _SURFACE_PROFILE)
    if not surface:
        return None
    return registry.lookup_surface(surface)


class LegalFormOutcome(str, Enum):
    """Result class of reconciling the available legal-form signals."""

    CONSISTENT = "Consistent"
    INCONSISTENT = "Inconsistent"
    INDETERMINATE = "Indeterminate"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class LegalFormVerdict:
    """Reconciliation outcome plus, for mismatches, which signals disagreed."""

    outcome: LegalFormOutcome
    detail: str = ""

    def __post_init__(self) -> None:
        if self.outcome is LegalFormOutcome.INCONSISTENT and not self.detail.strip():
            raise LegalFormError("an Inconsistent verdict must name the mismatching signals")

    def to_dict(self) -> dict[str, str]:
        return {"outcome": self.outcome.value, "detail": self.detail}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "LegalFormVerdict":
        return cls(LegalFormOutcome(data["outcome"]), str(data.get("detail", "")))


def compare_legal_forms(
    coded_field: Optional[LegalFormCode],
    declared_name_form: Optional[CanonicalLegalForm],
    official_name_form: Optional[CanonicalLegalForm],
    code_map: Mapping[str, str],
    registry: LegalFormRegistry,
) -> LegalFormVerdict:
    """Reconcile up to three legal-form signals into one verdict.

    Args:
        coded_field: coded legal-form field from the filing, if any.
        declared_name_form: form extracted from the declared name, if any.
        official_name_form: form extracted from the official name, if any.
        code_map: mapping of code text (``"PT101"``) to canonical id.
        registry: known canonical forms (resolves ids from ``code_map``).

    Returns:
        Consistent when at least two signals are present and all agree;
        Inconsistent (with the offending pair named) when any two disagree;
        Indeterminate when fewer than two signals are present.

    Raises:
        LegalFormError: when ``coded_field`` is not in ``code_map`` — a
            configuration gap, not a data verdict.
    """
    signals: list[tuple[str, CanonicalLegalForm]] = []
    if coded_field is not None:
        code_text = str(coded_field)
        if code_text not in code_map:
            raise LegalFormError(
                f"legal-form code {code_text} has no canonical mapping configured"
            )
        signals.append(("coded field", registry.get(code_map[code_text])))
    if declared_name_form is not None:
        signals.append(("declared name", declared_name_form))
    if official_name_form is not None:
        signals.append(("official name", official_name_form))

    if len(signals) < 2:
        return LegalFormVerdict(
            LegalFormOutcome.INDETERMINATE,
            "fewer than two legal-form signals present",
        )
    first_label, first_form = signals[0]
    for label, form in signals[1:]:
        if form.canonical_id != first_form.canonical_id:
            return LegalFormVerdict(
                LegalFormOutcome.INCONSISTENT,
                f"{first_label} ({first_form.canonical_id}) vs {label} ({form.canonical_id})",
            )
    return LegalFormVerdict(LegalFormOutcome.CONSISTENT)


def load_legal_form_registry(path: Path | str) -> LegalFormRegistry:
    """Load canonical forms from ``CANONICAL_ID=SURFACE|SURFACE|...`` lines.

    Blank lines and ``#`` comments are ignored. Surface forms are stored as
    written (they must already be in normalized spelling: uppercase ASCII,
    single spaces).

    Raises:
        LegalFormError: malformed lines, duplicate ids, or overlapping
            surface-form sets.
    """
    forms: list[CanonicalLegalForm] = []
    seen_ids: set[str] = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise LegalFormError(f"{path}:{lineno}: expected ID=FORM|FORM, got {stripped!r}")
        canonical_id, _, rest = stripped.partition("=")
        canonical_id = canonical_id.strip()
        if canonical_id in seen_ids:
            raise LegalFormError(f"{path}:{lineno}: duplicate canonical id {canonical_id!r}")
        seen_ids.add(canonical_id)
        surfaces = frozenset(s.strip() for s in rest.split("|") if s.strip())
        forms.append(CanonicalLegalForm(canonical_id, surfaces))
    return LegalFormRegistry(forms)


def load_code_map(path: Path | str, registry: LegalFormRegistry) -> dict[str, str]:
    """Load a ``CODE=CANONICAL_ID`` mapping file (e.g. ``PT101=PT_LDA``).

    Every code must parse and every canonical id must exist in the registry.
    """
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise LegalFormError(f"{path}:{lineno}: expected CODE=ID, got {stripped!r}")
        code_text, _, canonical_id = stripped.partition("=")
        code = parse_legal_form_code(code_text.strip())
        canonical_id = canonical_id.strip()
        registry.get(canonical_id)  # raises if unknown
        mapping[str(code)] = canonical_id
    return mapping


def default_registry() -> LegalFormRegistry:
    """Registry loaded from the packaged surface-form table."""
    return load_legal_form_registry(Path(__file__).parent / "data" / "legal_forms.txt")


def default_code_map(registry: Optional[LegalFormRegistry] = None) -> dict[str, str]:
    """Code mapping loaded from the packaged code table."""
    registry = registry or default_registry()
    return load_code_map(Path(__file__).parent / "data" / "legal_form_codes.txt", registry)
