"""Verdict production: thresholds over scores and Equal/Different chat backends.

Two families of matcher produce the same three-way verdict. Distance backends
threshold a similarity score; chat backends put both names into a fixed
two-label prompt and map the answer (Equal/Different/anything else) onto
Accepted/Rejected/Doubtful. An ensemble combiner votes across backends.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Protocol, Sequence

import httpx

from .models import MatchCase, ResolutionLabel

__all__ = [
    "BackendDescriptor",
    "BackendError",
    "BackendKind",
    "ChatTransport",
    "HttpChatTransport",
    "MissingReferenceError",
    "ScriptedTransport",
    "ThresholdPolicy",
    "TransportError",
    "ZscLabel",
    "ZscVerdict",
    "build_zsc_prompt",
    "classify_case",
    "ensemble_vote",
    "parse_zsc_response",
    "threshold_classify",
]

_WORD_RE = re.compile(r"[a-z]+")


class BackendError(RuntimeError):
    """A backend failed to produce a usable verdict for a case."""

    def __init__(self, case_id: str, backend_name: str, message: str):
        super().__init__(f"backend {backend_name!r} failed on case {case_id}: {message}")
        self.case_id = case_id
        self.backend_name = backend_name


class MissingReferenceError(ValueError):
    """No official or previous name exists to compare against."""


class TransportError(RuntimeError):
    """A single transport call failed (may be retried)."""


@dataclass(frozen=True)
class ThresholdPolicy:
    """Score bands for the three-way decision.

    ``score >= accept_at`` accepts, ``score < reject_below`` rejects, and the
    band in between is Doubtful (empty when the two cut-offs coincide).
    """

    accept_at: float = 0.95
    reject_below: float = 0.80

    def __post_init__(self) -> None:
        if not (0.0 <= self.reject_below <= self.accept_at <= 1.0):
            raise ValueError(
                "thresholds must satisfy 0 <= reject_below <= accept_at <= 1, got "
                f"reject_below={self.reject_below}, accept_at={self.accept_at}"
            )


def threshold_classify(score: float, policy: ThresholdPolicy) -> ResolutionLabel:
    """Map a similarity score onto the three-way label.

    Args:
        score: similarity in [0, 1].
        policy: the score bands.

    Returns:
        Accepted, Rejected, or Doubtful per the policy bands.

    Raises:
        ValueError: when the score is outside [0, 1].
    """
    if not (0.0 <= score <= 1.0):
        raise ValueError(f"score {score} outside [0, 1]")
    if score >= policy.accept_at:
        return ResolutionLabel.ACCEPTED
    if score < policy.reject_below:
        return ResolutionLabel.REJECTED
    return ResolutionLabel.DOUBTFUL


class ZscLabel(str, Enum):
    """Parsed chat-backend answer; Unknown covers every off-script reply."""

    EQUAL = "Equal"
    DIFFERENT = "Different"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ZscVerdict:
    """Parsed label plus the raw response text kept for audit."""

    label: ZscLabel
    raw_response: str


def build_zsc_prompt(
    declared: str,
    official: Optional[str],
    previous_names: Sequence[str] = (),
) -> str:
    """Build the fixed two-label comparison prompt for a chat backend.

    The prompt names exactly two admissible answers (Equal / Different),
    contains only this case's names, and is deterministic in its inputs.
    Previous registry names are included, flagged as previous, so a renamed
    entity can still be recognized.

    Args:
        declared: declared company name.
        official: official registry name, or None when the register has none.
        previous_names: prior registry names, most recent first.

    Returns:
        The prompt text.

    Raises:
        MissingReferenceError: when there is neither an official nor any
            previous name — there is nothing to compare against.
    """
    if official is None and not previous_names:
        raise MissingReferenceError(
            "cannot build a comparison prompt: no official or previous name available"
        )
    lines = [
        "You are checking whether two company names refer to the same legal entity.",
        f'Declared name: "{declared}"',
    ]
    if official is not None:
        lines.append(f'Official registry name: "{official}"')
    if previous_names:
        joined = "; ".join(f'"{name}"' for name in previous_names)
        lines.append(
            f"Previous registry names (the entity may have been renamed): {joined}"
        )
    lines.append(
        "Answer with exactly one word: Equal if the names refer to the same entity, "
        "Different if they do not."
    )
    return "\n".join(lines)


def parse_zsc_response(text: str) -> ZscVerdict:
    """Parse a chat-backend reply into Equal/Different/Unknown.

    The first word that is exactly ``equal`` or ``different``
    (case-insensitive) decides; a reply containing neither is Unknown and
    keeps the raw text for audit. This function never raises.
    """
    for word in _WORD_RE.findall(text.lower()):
        if word == "equal":
            return ZscVerdict(ZscLabel.EQUAL, text)
        if word == "different":
            return ZscVerdict(ZscLabel.DIFFERENT, text)
    return ZscVerdict(ZscLabel.UNKNOWN, text)


class BackendKind(str, Enum):
    """How a backend produces its verdict."""

    DISTANCE_THRESHOLD = "distance_threshold"
    REMOTE_CHAT = "remote_chat"
    MOCK = "mock"


@dataclass(frozen=True)
class BackendDescriptor:
    """Configuration of one matcher backend.

    For distance backends ``name`` doubles as the score key (``levenshtein``,
    ``cosine``, ``jaccard``). Remote chat backends need an endpoint and a
    model identifier.
    """

    name: str
    kind: BackendKind
    endpoint: Optional[str] = None
    model_id: Optional[str] = None
    timeout: float = 30.0
    max_retries: int = 2

    def __post_init__(self) -> None:
        if not self.name.strip():
            raise ValueError("backend name must be non-empty")
        if self.kind is BackendKind.REMOTE_CHAT and not (self.endpoint and self.model_id):
            raise ValueError(
                f"remote_chat backend {self.name!r} requires endpoint and model_id"
            )
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


class ChatTransport(Protocol):
    """Capability to obtain a chat completion for one case's prompt."""

    def send(self, descriptor: BackendDescriptor, case_id: str, prompt: str) -> str:
        """Return the raw response text; raise TransportError on failure."""
        ...  # pragma: no cover - protocol


class HttpChatTransport:
    """Chat transport over HTTP POST.

    Request body: ``{"model": <model_id>, "messages": [{"role": "user",
    "content": <prompt>}], "deterministic": true}``. Response body:
    ``{"text": <completion>}``. The deterministic flag asks the serving side
    to disable sampling so reruns are reproducible.
    """

    def __init__(self, client: Optional[httpx.Client] = None):
        self._client = client or httpx.Client()

    def send(self, descriptor: BackendDescriptor, case_id: str, prompt: str) -> str:
        body = {
            "model": descriptor.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "deterministic": True,
        }
        try:
            response = self._client.post(
                descriptor.endpoint, json=body, timeout=descriptor.timeout
            )
            response.raise_for_status()
            payload = response.json()
        except httpx.HTTPError as exc:
            raise TransportError(f"HTTP call failed: {exc}") from exc
        except ValueError as exc:
            raise TransportError(f"non-JSON response: {exc}") from exc
        if "text" not in payload:
            raise TransportError(f"response missing 'text' field: {payload!r}")
        return str(payload["text"])


class ScriptedTransport:
    """Deterministic transport answering from a case-id-keyed script.

    Used for offline runs and tests. Every call is recorded so callers can
    assert which cases reached a backend (e.g. registry hits must not).
    """

    def __init__(self, responses: dict[str, str]):
        self.responses = dict(responses)
        self.calls: list[str] = []

    @classmethod
    def from_file(cls, path: Path | str) -> "ScriptedTransport":
        """Load a JSON object mapping case_id to response text."""
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ValueError(f"{path}: scripted responses must be a JSON object")
        return cls({str(k): str(v) for k, v in data.items()})

    def send(self, descriptor: BackendDescriptor, case_id: str, prompt: str) -> str:
        self.calls.append(case_id)
        try:
            return self.responses[case_id]
        except KeyError:
            raise TransportError(f"no scripted response for case {case_id}") from None


def _chat_classify(
    case: MatchCase,
    backend: BackendDescriptor,
    transport: ChatTransport,
) -> ResolutionLabel:
    prompt = build_zsc_prompt(
        case.record.company_name,
        case.reference.official_name,
        case.reference.previous_names,
    )
    attempts = backend.max_retries + 1
    last_error: Optional[TransportError] = None
    for _ in range(attempts):
        try:
            text = transport.send(backend, case.case_id, prompt)
            break
        except TransportError as exc:
            last_error = exc
    else:
        raise BackendError(case.case_id, backend.name, str(last_error))
    verdict = parse_zsc_response(text)
    case.raw_responses[backend.name] = verdict.raw_response
    if verdict.label is ZscLabel.EQUAL:
        return ResolutionLabel.ACCEPTED
    if verdict.label is ZscLabel.DIFFERENT:
        return ResolutionLabel.REJECTED
    return ResolutionLabel.DOUBTFUL


def classify_case(
    case: MatchCase,
    backend: BackendDescriptor,
    policy: ThresholdPolicy,
    transport: Optional[ChatTransport] = None,
) -> ResolutionLabel:
    """Produce one backend's verdict for a case.

    A case whose reference holds neither an official nor a previous name is
    Doubtful immediately — no score is read and no backend is called, so this
    function never accepts an unverifiable case.

    Args:
        case: the case to classify; chat verdicts record their raw response
            into ``case.raw_responses``.
        backend: which backend to run.
        policy: score bands (used by distance backends).
        transport: chat capability; required for remote_chat and mock kinds.

    Returns:
        The backend's three-way verdict.

    Raises:
        BackendError: when a chat backend fails after all retries.
        ValueError: when a distance backend's score is missing from the case.
    """
    if case.reference.is_empty:
        return ResolutionLabel.DOUBTFUL
    if backend.kind is BackendKind.DISTANCE_THRESHOLD:
        if backend.name not in case.scores:
            raise ValueError(
                f"case {case.case_id} has no {backend.name!r} score; compute scores first"
            )
        return threshold_classify(case.scores[backend.name], policy)
    if transport is None:
        raise ValueError(f"backend {backend.name!r} needs a transport")
    return _chat_classify(case, backend, transport)


def ensemble_vote(labels: Sequence[ResolutionLabel]) -> ResolutionLabel:
    """Combine several backend verdicts into one.

    Accepted or Rejected wins only with strictly more votes than each other
    label; every tie for the lead, and any Doubtful plurality, resolves to
    Doubtful — disagreement is a reason for a human to look.

    Raises:
        ValueError: on an empty label list.
    """
    if not labels:
        raise ValueError("ensemble_vote requires at least one verdict")
    accepted = sum(1 for label in labels if label is ResolutionLabel.ACCEPTED)
    rejected = sum(1 for label in labels if label is ResolutionLabel.REJECTED)
    doubtful = len(labels) - accepted - rejected
    if accepted > rejected and accepted > doubtful:
        return ResolutionLabel.ACCEPTED
    if rejected > accepted and rejected > doubtful:
        return ResolutionLabel.REJECTED
    return ResolutionLabel.DOUBTFUL
