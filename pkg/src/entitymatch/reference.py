"""Clients for the official reference source (current and previous names).

The engine only needs one capability: given a declared entity, return what
the register knows. Three implementations cover production (HTTP), offline
runs and tests (fixture file), and running with no register at all (null).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional, Protocol

import httpx

from .models import ReferenceEntry
from .normalize import NormalizationProfile, normalize_name

__all__ = [
    "EnrichmentError",
    "FixtureReferenceClient",
    "NullReferenceClient",
    "ReferenceSourceClient",
    "RemoteReferenceClient",
]


class EnrichmentError(RuntimeError):
    """The reference source failed (I/O, HTTP, malformed payload)."""


class ReferenceSourceClient(Protocol):
    """Capability to look up an entity in the official register."""

    def fetch(self, country: str, national_identifier: str, declared_name: str) -> ReferenceEntry:
        """Return the register's view; empty entry when the register has none.

        Raises:
            EnrichmentError: when the source itself fails.
        """
        ...  # pragma: no cover - protocol


class NullReferenceClient:
    """A register that knows nothing; every lookup is empty."""

    def fetch(self, country: str, national_identifier: str, declared_name: str) -> ReferenceEntry:
        return ReferenceEntry()


def _entry_from_payload(payload: Any, source_id: str) -> ReferenceEntry:
    if not isinstance(payload, dict):
        raise EnrichmentError(f"reference payload must be an object, got {type(payload).__name__}")
    return ReferenceEntry(
        official_name=payload.get("official_name") or None,
        previous_names=tuple(payload.get("previous_names") or ()),
        source_id=source_id,
    )


class FixtureReferenceClient:
    """Register served from a JSON fixture file.

    File shape::

        {
          "by_identifier": {"PT:510123456": {"official_name": ..., "previous_names": [...]}},
          "by_name": {"PT:ACME LDA": {...}}
        }

    ``by_name`` keys are ``COUNTRY:<normalized declared name>``. When the
    filing carries no national identifier the client either falls back to the
    name index (``name_fallback=True``) or skips the lookup — the default,
    because name search against a register is fuzzy territory.
    """

    def __init__(
        self,
        path: Path | str,
        profile: NormalizationProfile,
        name_fallback: bool = False,
    ):
        self._path = Path(path)
        self._profile = profile
        self._name_fallback = name_fallback
        try:
            data = json.loads(self._path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise EnrichmentError(f"cannot load reference fixture {self._path}: {exc}") from exc
        self._by_identifier: dict[str, Any] = data.get("by_identifier") or {}
        self._by_name: dict[str, Any] = data.get("by_name") or {}

    def fetch(self, country: str, national_identifier: str, declared_name: str) -> ReferenceEntry:
        source_id = f"fixture:{self._path.name}"
        if national_identifier:
            payload = self._by_identifier.get(f"{country}:{national_identifier}")
            if payload is None:
                return ReferenceEntry(source_id=source_id)
            return _entry_from_payload(payload, source_id)
        if not self._name_fallback:
            return ReferenceEntry(source_id=source_id)
        key = f"{country}:{normalize_name(declared_name, self._profile)}"
        payload = self._by_name.get(key)
        if payload is None:
            return ReferenceEntry(source_id=source_id)
        return _entry_from_payload(payload, source_id)


class RemoteReferenceClient:
    """Register behind an HTTP GET endpoint.

    The endpoint receives ``country`` and ``identifier`` query parameters and
    answers ``{"official_name": ..., "previous_names": [...]}``; 404 means
    the register has no entry (an empty entry, not an error).
    """

    def __init__(
        self,
        endpoint: str,
        client: Optional[httpx.Client] = None,
        timeout: float = 30.0,
    ):
        self._endpoint = endpoint
        self._client = client or httpx.Client()
        self._timeout = timeout

    def fetch(self, country: str, national_identifier: str, declared_name: str) -> ReferenceEntry:
        source_id = f"remote:{self._endpoint}"
        if not national_identifier:
            return ReferenceEntry(source_id=source_id)
        try:
            response = self._client.get(
                self._endpoint,
                params={"country": country, "identifier": national_identifier},
                timeout=self._timeout,
            )
            if response.status_code == 404:
                return ReferenceEntry(source_id=source_id)
            response.raise_for_status()
            payload = response.json()
        except httpx.HTTPError as exc:
            raise EnrichmentError(f"reference lookup failed: {exc}") from exc
        except ValueError as exc:
            raise EnrichmentError(f"reference endpoint returned non-JSON: {exc}") from exc
        return _entry_from_payload(payload, source_id)
