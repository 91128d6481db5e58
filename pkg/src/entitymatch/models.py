"""Core record types shared across the matching engine.

The vocabulary here is deliberately small: a declared filing (`EntityRecord`),
what the official register knows about it (`ReferenceEntry`), and the unit of
work that travels through scoring, classification, and review (`MatchCase`).
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Optional

from .legal_forms import LegalFormCode, LegalFormVerdict, parse_legal_form_code

_COUNTRY_RE = re.compile(r"^[A-Z]{2}$")
_LEI_RE = re.compile(r"^[A-Z0-9]{20}$")


class ModelError(ValueError):
    """Raised when a record violates its structural contract."""


class ResolutionLabel(str, Enum):
    """Three-way outcome of matching a declared entity against the register."""

    ACCEPTED = "Accepted"
    REJECTED = "Rejected"
    DOUBTFUL = "Doubtful"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


# Input spellings tolerated when parsing labels from datasets. Output is
# always the English enum value.
_LABEL_ALIASES: dict[str, ResolutionLabel] = {
    "accepted": ResolutionLabel.ACCEPTED,
    "aceptado": ResolutionLabel.ACCEPTED,
    "aceite": ResolutionLabel.ACCEPTED,
    "rejected": ResolutionLabel.REJECTED,
    "rechazado": ResolutionLabel.REJECTED,
    "rejeitado": ResolutionLabel.REJECTED,
    "doubtful": ResolutionLabel.DOUBTFUL,
    "duda": ResolutionLabel.DOUBTFUL,
    "duvida": ResolutionLabel.DOUBTFUL,
}


def parse_resolution_label(raw: str) -> ResolutionLabel:
    """Parse a resolution label, tolerating Spanish/Portuguese spellings.

    Args:
        raw: label text from a dataset, e.g. ``"Accepted"`` or ``"Aceptado"``.

    Returns:
        The normalized :class:`ResolutionLabel`.

    Raises:
        ModelError: if the text matches no known label; the message lists
            the accepted spellings.
    """
    key = raw.strip().lower()
    try:
        return _LABEL_ALIASES[key]
    except KeyError:
        allowed = ", ".join(sorted(_LABEL_ALIASES))
        raise ModelError(
            f"unknown resolution label {raw!r}; allowed (case-insensitive): {allowed}"
        ) from None


class RejectReasonKind(str, Enum):
    """Machine-readable vocabulary for why a case was rejected."""

    NAME_MISMATCH = "NameMismatch"
    LEGAL_FORM_MISMATCH = "LegalFormMismatch"
    IDENTIFIER_MISMATCH = "IdentifierMismatch"
    MISSING_REFERENCE = "MissingReference"
    OTHER = "Other"


@dataclass(frozen=True)
class RejectReason:
    """A reject reason: a fixed kind, plus free text when the kind is Other."""

    kind: RejectReasonKind
    detail: str = ""

    def __post_init__(self) -> None:
        if self.kind is RejectReasonKind.OTHER and not self.detail.strip():
            raise ModelError("reject reason 'Other' requires non-empty detail text")

    @classmethod
    def other(cls, detail: str) -> "RejectReason":
        return cls(RejectReasonKind.OTHER, detail)

    def to_dict(self) -> dict[str, str]:
        return {"kind": self.kind.value, "detail": self.detail}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RejectReason":
        return cls(RejectReasonKind(data["kind"]), str(data.get("detail", "")))


@dataclass(frozen=True)
class EntityRecord:
    """One declared entity as reported in a filing."""

    country: str
    company_name: str
    entity_app: str = ""
    national_identifier: str = ""
    identifier_type: str = ""
    lei: str = ""
    sector: str = ""
    legal_form_code: Optional[LegalFormCode] = None
    legal_form_abbreviation: str = ""

    def __post_init__(self) -> None:
        if not _COUNTRY_RE.match(self.country):
            raise ModelError(
                f"country must be two uppercase letters, got {self.country!r}"
            )
        if not self.company_name.strip():
            raise ModelError("company_name must be non-empty")
        if self.lei and not _LEI_RE.match(self.lei):
            raise ModelError(f"LEI must be 20 alphanumeric characters, got {self.lei!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "country": self.country,
            "company_name": self.company_name,
            "entity_app": self.entity_app,
            "national_identifier": self.national_identifier,
            "identifier_type": self.identifier_type,
            "lei": self.lei,
            "sector": self.sector,
            "legal_form_code": str(self.legal_form_code) if self.legal_form_code else "",
            "legal_form_abbreviation": self.legal_form_abbreviation,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "EntityRecord":
        raw_code = data.get("legal_form_code") or ""
        return cls(
            country=data["country"],
            company_name=data["company_name"],
            entity_app=data.get("entity_app", ""),
            national_identifier=data.get("national_identifier", ""),
            identifier_type=data.get("identifier_type", ""),
            lei=data.get("lei", ""),
            sector=data.get("sector", ""),
            legal_form_code=parse_legal_form_code(raw_code) if raw_code else None,
            legal_form_abbreviation=data.get("legal_form_abbreviation", ""),
        )


@dataclass(frozen=True)
class ReferenceEntry:
    """What the official register knows about an entity (possibly nothing)."""

    official_name: Optional[str] = None
    previous_names: tuple[str, ...] = ()
    source_id: str = ""

    def __post_init__(self) -> None:
        if self.official_name is not None and not self.official_name.strip():
            raise ModelError("official_name must be None or non-empty, not blank")
        for name in self.previous_names:
            if not name.strip():
                raise ModelError("previous_names must not contain blank entries")

    @property
    def is_empty(self) -> bool:
        """True when the register offered neither a current nor a prior name."""
        return self.official_name is None and not self.previous_names

    def to_dict(self) -> dict[str, Any]:
        return {
            "official_name": self.official_name,
            "previous_names": list(self.previous_names),
            "source_id": self.source_id,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ReferenceEntry":
        return cls(
            official_name=data.get("official_name"),
            previous_names=tuple(data.get("previous_names") or ()),
            source_id=data.get("source_id", ""),
        )


def default_case_id(country: str, company_name: str, national_identifier: str) -> str:
    """Deterministic case identifier derived from the declaring fields."""
    digest = hashlib.sha256(
        f"{country}|{company_name}|{national_identifier}".encode("utf-8")
    ).hexdigest()
    return digest[:12]


@dataclass
class MatchCase:
    """One unit of matching work, enriched in place as it moves through a run."""

    case_id: str
    record: EntityRecord
    reference: ReferenceEntry = field(default_factory=ReferenceEntry)
    scores: dict[str, float] = field(default_factory=dict)
    verdicts: dict[str, ResolutionLabel] = field(default_factory=dict)
    resolution: Optional[ResolutionLabel] = None
    reject_reasons: list[RejectReason] = field(default_factory=list)
    ground_truth: Optional[ResolutionLabel] = None
    assigned_code: Optional[str] = None
    legal_form_verdict: Optional[LegalFormVerdict] = None
    raw_responses: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        """Re-check the case's structural invariants; raise ModelError on breach."""
        if not self.case_id.strip():
            raise ModelError("case_id must be non-empty")
        for name, score in self.scores.items():
            if not (0.0 <= score <= 1.0):
                raise ModelError(f"score {name!r}={score} outside [0, 1]")
        if self.resolution is ResolutionLabel.REJECTED and not self.reject_reasons:
            raise ModelError("a Rejected case must carry at least one reject reason")
        if self.resolution is ResolutionLabel.ACCEPTED and self.reject_reasons:
            raise ModelError("an Accepted case must not carry reject reasons")

    def set_resolution(
        self,
        label: ResolutionLabel,
        reasons: Optional[list[RejectReason]] = None,
    ) -> None:
        """Assign the final label, enforcing the reason rules atomically."""
        self.resolution = label
        self.reject_reasons = list(reasons or [])
        self.validate()

    def to_dict(self) -> dict[str, Any]:
        return {
            "case_id": self.case_id,
            "record": self.record.to_dict(),
            "reference": self.reference.to_dict(),
            "scores": dict(self.scores),
            "verdicts": {k: v.value for k, v in self.verdicts.items()},
            "resolution": self.resolution.value if self.resolution else None,
            "reject_reasons": [r.to_dict() for r in self.reject_reasons],
            "ground_truth": self.ground_truth.value if self.ground_truth else None,
            "assigned_code": self.assigned_code,
            "legal_form_verdict": (
                self.legal_form_verdict.to_dict() if self.legal_form_verdict else None
            ),
            "raw_responses": dict(self.raw_responses),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "MatchCase":
        return cls(
            case_id=data["case_id"],
            record=EntityRecord.from_dict(data["record"]),
            reference=ReferenceEntry.from_dict(data.get("reference") or {}),
            scores={k: float(v) for k, v in (data.get("scores") or {}).items()},
            verdicts={
                k: ResolutionLabel(v) for k, v in (data.get("verdicts") or {}).items()
            },
            resolution=(
                ResolutionLabel(data["resolution"]) if data.get("resolution") else None
            ),
            reject_reasons=[
                RejectReason.from_dict(r) for r in data.get("reject_reasons") or []
            ],
            ground_truth=(
                ResolutionLabel(data["ground_truth"]) if data.get("ground_truth") else None
            ),
            assigned_code=data.get("assigned_code"),
            legal_form_verdict=(
                LegalFormVerdict.from_dict(data["legal_form_verdict"])
                if data.get("legal_form_verdict")
                else None
            ),
            raw_responses=dict(data.get("raw_responses") or {}),
        )
