"""entitymatch: resolve declared company names against official registers.

The package turns declared filings into Accepted / Rejected / Doubtful
resolutions by normalizing names, scoring them with string metrics, asking
configurable match backends, reconciling legal forms, and parking everything
uncertain in a human review queue.
"""

from .models import (
    EntityRecord,
    MatchCase,
    ReferenceEntry,
    RejectReason,
    RejectReasonKind,
    ResolutionLabel,
)

__all__ = [
    "EntityRecord",
    "MatchCase",
    "ReferenceEntry",
    "RejectReason",
    "RejectReasonKind",
    "ResolutionLabel",
]

__version__ = "0.1.0"
