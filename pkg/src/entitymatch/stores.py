"""Durable state: the entity-code registry and the human review queue.

Both stores persist as human-readable JSONL append logs and rebuild their
in-memory state by replay, so every code issuance and every review decision
stays auditable forever. Mutations are serialized by a per-store lock
(single-writer discipline).
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Iterator, Optional, Protocol

from .models import MatchCase, RejectReason, ResolutionLabel

__all__ = [
    "AuditEntry",
    "Clock",
    "LogicalClock",
    "QueueEntry",
    "QueueLookupError",
    "QueueStateError",
    "QueueStatus",
    "QueueValidationError",
    "RegistryEntry",
    "RegistryStore",
    "ReviewQueue",
    "StoreError",
    "SystemClock",
]

CODE_DIGITS = 7

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


class StoreError(RuntimeError):
    """Raised for corrupt store files and illegal store operations."""


class QueueLookupError(StoreError):
    """The referenced case is not in the queue."""


class QueueStateError(StoreError):
    """The case exists but is not in a state that allows the operation."""


class QueueValidationError(StoreError):
    """The request itself is invalid (bad decision value, missing reason)."""


class Clock(Protocol):
    """Timestamp source; swappable so batch runs can be deterministic."""

    def now(self) -> str:
        """Return an ISO-8601 instant."""
        ...  # pragma: no cover - protocol


class SystemClock:
    """Wall-clock timestamps for interactive use."""

    def now(self) -> str:
        return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


class LogicalClock:
    """Monotone counter rendered as synthetic instants.

    Batch runs inject this so that two runs over the same inputs produce
    byte-identical logs; the timestamps order events, they do not date them.
    """

    def __init__(self, start: int = 0):
        self._tick = start
        self._lock = threading.Lock()

    def now(self) -> str:
        with self._lock:
            tick = self._tick
            self._tick += 1
        return (_EPOCH + timedelta(seconds=tick)).strftime("%Y-%m-%dT%H:%M:%SZ")


def _read_jsonl(path: Path) -> Iterator[tuple[int, dict[str, Any]]]:
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            event = json.loads(line)
        except json.JSONDecodeError as exc:
            raise StoreError(f"{path}:{lineno}: corrupt log line: {exc}") from exc
        if not isinstance(event, dict) or "event" not in event:
            raise StoreError(f"{path}:{lineno}: log line is not an event object")
        yield lineno, event


@dataclass
class RegistryEntry:
    """One issued entity code and the keys it was issued under."""

    code: str
    country: str
    identifier: str = ""
    name: str = ""
    superseded: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "code": self.code,
            "country": self.country,
            "identifier": self.identifier,
            "name": self.name,
            "superseded": self.superseded,
        }


class RegistryStore:
    """Issues entity codes and answers already-registered lookups.

    Codes are the country prefix plus a zero-padded monotone counter
    (``PT0000001``). Entries are indexed by (country, national identifier)
    and by normalized official name; superseding removes a code from the
    indexes but its entry and log lines remain forever.
    """

    def __init__(self, log_path: Optional[Path | str] = None, clock: Optional[Clock] = None):
        self._log_path = Path(log_path) if log_path else None
        self._clock = clock or SystemClock()
        self._lock = threading.RLock()
        self._entries: dict[str, RegistryEntry] = {}
        self._by_identifier: dict[tuple[str, str], str] = {}
        self._by_name: dict[str, str] = {}
        self._counters: dict[str, int] = {}
        if self._log_path and self._log_path.exists():
            self._replay()

    def _replay(self) -> None:
        assert self._log_path is not None
        for lineno, event in _read_jsonl(self._log_path):
            kind = event["event"]
            if kind == "register":
                try:
                    self._apply_register(
                        event["code"], event["country"], event.get("identifier", ""),
                        event.get("name", ""),
                    )
                except KeyError as exc:
                    raise StoreError(
                        f"{self._log_path}:{lineno}: register event missing {exc}"
                    ) from exc
            elif kind == "supersede":
                self._apply_supersede(event.get("code", ""))
            else:
                raise StoreError(f"{self._log_path}:{lineno}: unknown event {kind!r}")

    def _apply_register(self, code: str, country: str, identifier: str, name: str) -> None:
        entry = RegistryEntry(code=code, country=country, identifier=identifier, name=name)
        self._entries[code] = entry
        if identifier:
            self._by_identifier[(country, identifier)] = code
        if name:
            self._by_name[name] = code
        # Keep the counter ahead of every code ever seen for the country.
        try:
            number = int(code[2:])
        except ValueError as exc:
            raise StoreError(f"malformed code {code!r} in registry log") from exc
        self._counters[country] = max(self._counters.get(country, 0), number)

    def _apply_supersede(self, code: str) -> None:
        entry = self._entries.get(code)
        if entry is None:
            raise StoreError(f"cannot supersede unknown code {code!r}")
        entry.superseded = True
        if entry.identifier and self._by_identifier.get((entry.country, entry.identifier)) == code:
            del self._by_identifier[(entry.country, entry.identifier)]
        if entry.name and self._by_name.get(entry.name) == code:
            del self._by_name[entry.name]

    def _append(self, event: dict[str, Any]) -> None:
        if self._log_path is None:
            return
        with self._log_path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(event, sort_keys=True) + "\n")

    def register(self, country: str, identifier: str = "", name: str = "") -> str:
        """Issue a fresh code for the country and index it under the keys.

        Args:
            country: two-letter country prefix for the code.
            identifier: national identifier, indexed when non-empty.
            name: normalized official name, indexed when non-empty.

        Returns:
            The newly issued code.
        """
        with self._lock:
            number = self._counters.get(country, 0) + 1
            code = f"{country}{number:0{CODE_DIGITS}d}"
            self._apply_register(code, country, identifier, name)
            self._append(
                {
                    "event": "register",
                    "code": code,
                    "country": country,
                    "identifier": identifier,
                    "name": name,
                    "ts": self._clock.now(),
                }
            )
            return code

    def supersede(self, code: str) -> None:
        """Drop a code from the lookup indexes; its history is retained."""
        with self._lock:
            self._apply_supersede(code)
            self._append({"event": "supersede", "code": code, "ts": self._clock.now()})

    def lookup_identifier(self, country: str, identifier: str) -> Optional[str]:
        """Code registered under (country, identifier), if any."""
        if not identifier:
            return None
        return self._by_identifier.get((country, identifier))

    def lookup_name(self, normalized_name: str) -> Optional[str]:
        """Code registered under a normalized official name, if any."""
        if not normalized_name:
            return None
        return self._by_name.get(normalized_name)

    def get(self, code: str) -> RegistryEntry:
        try:
            return self._entries[code]
        except KeyError:
            raise StoreError(f"unknown code {code!r}") from None

    def entries(self) -> list[RegistryEntry]:
        return list(self._entries.values())

    def write_snapshot(self, path: Optional[Path | str] = None) -> Path:
        """Write the full current state as one JSON document.

        The append log stays the source of truth for replay; the snapshot is
        for humans and downstream consumers.
        """
        if path is None:
            if self._log_path is None:
                raise StoreError("no snapshot path available for an in-memory store")
            path = self._log_path.with_suffix(".snapshot.json")
        path = Path(path)
        with self._lock:
            state = {
                "entries": [entry.to_dict() for entry in self._entries.values()],
                "counters": dict(sorted(self._counters.items())),
            }
        path.write_text(json.dumps(state, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


class QueueStatus(str, Enum):
    """Lifecycle of a queued case."""

    PENDING = "pending"
    RESOLVED = "resolved"


@dataclass
class AuditEntry:
    """One event in a queued case's history."""

    timestamp: str
    action: str  # enqueued | decided | reprocessed
    reviewer: str = ""
    decision: Optional[str] = None
    reason: Optional[RejectReason] = None
    note: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "timestamp": self.timestamp,
            "action": self.action,
            "reviewer": self.reviewer,
            "decision": self.decision,
            "reason": self.reason.to_dict() if self.reason else None,
            "note": self.note,
        }


@dataclass
class QueueEntry:
    """A case parked for human review, with its audit trail."""

    case: MatchCase
    status: QueueStatus
    enqueued_at: str
    audit: list[AuditEntry] = field(default_factory=list)


class ReviewQueue:
    """Append-only queue of Doubtful cases awaiting a human decision.

    A case is pending at most once; deciding resolves it; reprocessing flips
    a resolved case back to pending. Every transition appends to the log and
    to the case's audit trail, and pending order is enqueue order.
    """

    def __init__(self, log_path: Optional[Path | str] = None, clock: Optional[Clock] = None):
        self._log_path = Path(log_path) if log_path else None
        self._clock = clock or SystemClock()
        self._lock = threading.RLock()
        self._entries: dict[str, QueueEntry] = {}
        if self._log_path and self._log_path.exists():
            self._replay()

    def _replay(self) -> None:
        assert self._log_path is not None
        for lineno, event in _read_jsonl(self._log_path):
            kind = event["event"]
            try:
                if kind == "enqueue":
                    self._apply_enqueue(
                        MatchCase.from_dict(event["case"]), event["ts"], event.get("note", "")
                    )
                elif kind == "decide":
                    reason = (
                        RejectReason.from_dict(event["reason"]) if event.get("reason") else None
                    )
                    self._apply_decide(
                        event["case_id"],
                        ResolutionLabel(event["decision"]),
                        event.get("reviewer", ""),
                        reason,
                        event.get("assigned_code"),
                        event["ts"],
                    )
                elif kind == "reprocess":
                    self._apply_reprocess(event["case_id"], event.get("reviewer", ""), event["ts"])
                else:
                    raise StoreError(f"unknown event {kind!r}")
            except (KeyError, ValueError) as exc:
                raise StoreError(f"{self._log_path}:{lineno}: corrupt event: {exc}") from exc

    def _append(self, event: dict[str, Any]) -> None:
        if self._log_path is None:
            return
        with self._log_path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(event, sort_keys=True) + "\n")

    # -- enqueue ---------------------------------------------------------

    def _apply_enqueue(self, case: MatchCase, ts: str, note: str) -> QueueEntry:
        existing = self._entries.get(case.case_id)
        if existing is not None and existing.status is QueueStatus.PENDING:
            raise QueueStateError(f"case {case.case_id} is already pending review")
        entry = QueueEntry(case=case, status=QueueStatus.PENDING, enqueued_at=ts)
        if existing is not None:
            entry.audit = existing.audit
            # Re-insert to move the case to the back of the pending order.
            del self._entries[case.case_id]
        entry.audit.append(AuditEntry(timestamp=ts, action="enqueued", note=note))
        self._entries[case.case_id] = entry
        return entry

    def enqueue(self, case: MatchCase, note: str = "") -> QueueEntry:
        """Park a case for review.

        Raises:
            QueueStateError: when the case is already pending.
        """
        with self._lock:
            ts = self._clock.now()
            entry = self._apply_enqueue(case, ts, note)
            self._append(
                {"event": "enqueue", "case": case.to_dict(), "note": note, "ts": ts}
            )
            return entry

    # -- decide ----------------------------------------------------------

    def _apply_decide(
        self,
        case_id: str,
        decision: ResolutionLabel,
        reviewer: str,
        reason: Optional[RejectReason],
        assigned_code: Optional[str],
        ts: str,
    ) -> QueueEntry:
        entry = self._require(case_id)
        if entry.status is not QueueStatus.PENDING:
            raise QueueStateError(f"case {case_id} is not pending (status: {entry.status.value})")
        entry.case.set_resolution(decision, [reason] if reason else [])
        if assigned_code:
            entry.case.assigned_code = assigned_code
        entry.status = QueueStatus.RESOLVED
        entry.audit.append(
            AuditEntry(
                timestamp=ts,
                action="decided",
                reviewer=reviewer,
                decision=decision.value,
                reason=reason,
            )
        )
        return entry

    def decide(
        self,
        case_id: str,
        decision: ResolutionLabel,
        reviewer: str,
        reason: Optional[RejectReason] = None,
        assigned_code: Optional[str] = None,
    ) -> QueueEntry:
        """Record a human decision on a pending case.

        Args:
            case_id: the queued case.
            decision: Accepted or Rejected — a human may not return Doubtful.
            reviewer: who decided; must be non-empty.
            reason: required when rejecting.
            assigned_code: entity code issued for an acceptance, if any.

        Raises:
            QueueLookupError: unknown case.
            QueueStateError: case not pending.
            QueueValidationError: Doubtful decision, missing reviewer, or a
                rejection without a reason.
        """
        if decision not in (ResolutionLabel.ACCEPTED, ResolutionLabel.REJECTED):
            raise QueueValidationError("a review decision must be Accepted or Rejected")
        if not reviewer.strip():
            raise QueueValidationError("reviewer must be non-empty")
        if decision is ResolutionLabel.REJECTED and reason is None:
            raise QueueValidationError("rejecting a case requires a reject reason")
        with self._lock:
            ts = self._clock.now()
            entry = self._apply_decide(case_id, decision, reviewer, reason, assigned_code, ts)
            self._append(
                {
                    "event": "decide",
                    "case_id": case_id,
                    "decision": decision.value,
                    "reviewer": reviewer,
                    "reason": reason.to_dict() if reason else None,
                    "assigned_code": assigned_code,
                    "ts": ts,
                }
            )
            return entry

    # -- reprocess -------------------------------------------------------

    def _apply_reprocess(self, case_id: str, reviewer: str, ts: str) -> QueueEntry:
        entry = self._require(case_id)
        if entry.status is not QueueStatus.RESOLVED:
            raise QueueStateError(
                f"case {case_id} is not resolved (status: {entry.status.value})"
            )
        entry.case.resolution = None
        entry.case.reject_reasons = []
        entry.case.assigned_code = None
        entry.status = QueueStatus.PENDING
        entry.audit.append(AuditEntry(timestamp=ts, action="reprocessed", reviewer=reviewer))
        return entry

    def reprocess(self, case_id: str, reviewer: str = "") -> QueueEntry:
        """Send a resolved case back to pending; its audit trail is kept.

        Raises:
            QueueLookupError: unknown case.
            QueueStateError: case not resolved.
        """
        with self._lock:
            ts = self._clock.now()
            entry = self._apply_reprocess(case_id, reviewer, ts)
            self._append(
                {"event": "reprocess", "case_id": case_id, "reviewer": reviewer, "ts": ts}
            )
            return entry

    # -- reads -----------------------------------------------------------

    def _require(self, case_id: str) -> QueueEntry:
        try:
            return self._entries[case_id]
        except KeyError:
            raise QueueLookupError(f"case {case_id} is not in the review queue") from None

    def get(self, case_id: str) -> QueueEntry:
        with self._lock:
            return self._require(case_id)

    def pending(self) -> list[QueueEntry]:
        """Pending entries in enqueue order."""
        with self._lock:
            return [e for e in self._entries.values() if e.status is QueueStatus.PENDING]

    def resolved(self) -> list[QueueEntry]:
        with self._lock:
            return [e for e in self._entries.values() if e.status is QueueStatus.RESOLVED]

    def all_entries(self) -> list[QueueEntry]:
        with self._lock:
            return list(self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)
