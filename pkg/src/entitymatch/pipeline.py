"""End-to-end resolution runs and the human-review operations around them.

A run loads declared entities, short-circuits the ones the registry already
knows, scores and classifies the rest, reconciles legal forms for the
accepted ones, issues entity codes, and parks everything Doubtful in the
review queue. Runs are deterministic: a logical clock stamps the logs and
all artifacts are byte-identical across reruns over the same inputs.
"""

from __future__ import annotations

import csv
import io
import json
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

import yaml

from .classify import (
    BackendDescriptor,
    BackendError,
    BackendKind,
    ChatTransport,
    HttpChatTransport,
    ScriptedTransport,
    ThresholdPolicy,
    classify_case,
    ensemble_vote,
    threshold_classify,
)
from .dataset import load_dataset
from .evaluate import (
    MetricsRow,
    ReportFormat,
    class_distribution,
    compute_metrics,
    confusion_from_cases,
    emit_report,
)
from .legal_forms import (
    LegalFormOutcome,
    LegalFormRegistry,
    LegalFormVerdict,
    canonicalize_abbreviation,
    compare_legal_forms,
    default_code_map,
    default_registry,
    extract_legal_form,
    load_code_map,
    load_legal_form_registry,
)
from .models import (
    EntityRecord,
    MatchCase,
    RejectReason,
    RejectReasonKind,
    ResolutionLabel,
)
from .normalize import (
    NormalizationProfile,
    default_profile,
    load_abbreviations,
    normalize_name,
)
from .reference import (
    EnrichmentError,
    FixtureReferenceClient,
    NullReferenceClient,
    ReferenceSourceClient,
    RemoteReferenceClient,
)
from .similarity import VectorizerConfig, VectorizerMode, levenshtein_similarity, score_pair
from .stores import (
    Clock,
    LogicalClock,
    QueueStateError,
    QueueStatus,
    QueueValidationError,
    RegistryStore,
    ReviewQueue,
    SystemClock,
)

__all__ = [
    "ConfigError",
    "ENSEMBLE_DECIDER",
    "PipelineContext",
    "RunConfig",
    "RunDirectory",
    "RunReport",
    "apply_review_decision",
    "calibrate_thresholds",
    "load_run_config",
    "registry_lookup",
    "enrich",
    "reprocess_case",
    "resolve_case",
    "run_pipeline",
]

ENSEMBLE_DECIDER = "ensemble"
FINAL_METHOD_NAME = "resolution"

QUEUE_LOG = "review_queue.jsonl"
REGISTRY_LOG = "registry.jsonl"
CASES_FILE = "cases.jsonl"
RESOLUTIONS_FILE = "resolutions.csv"
REPORT_FILE = "report.json"
METRICS_JSON = "metrics.json"
METRICS_CSV = "metrics.csv"
METRICS_MD = "metrics.md"


class ConfigError(ValueError):
    """Raised for unusable run configuration."""


@dataclass
class RunConfig:
    """Fully resolved configuration for one run."""

    input_path: Path
    out_dir: Path
    profile: NormalizationProfile
    vectorizer: VectorizerConfig
    policy: ThresholdPolicy
    backends: list[BackendDescriptor]
    decider: str
    legal_registry: LegalFormRegistry
    code_map: dict[str, str]
    mock_scripts: dict[str, Path] = field(default_factory=dict)
    reference_kind: str = "none"  # none | fixture | remote
    reference_path: Optional[Path] = None
    reference_endpoint: Optional[str] = None
    reference_name_fallback: bool = False
    registry_seed: Optional[Path] = None
    concurrency: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.concurrency < 1:
            raise ConfigError(f"concurrency must be >= 1, got {self.concurrency}")
        if not self.backends:
            raise ConfigError("at least one backend must be configured")
        names = [b.name for b in self.backends]
        if len(names) != len(set(names)):
            raise ConfigError(f"backend names must be unique, got {names}")
        if self.decider != ENSEMBLE_DECIDER and self.decider not in names:
            raise ConfigError(
                f"decider {self.decider!r} is neither {ENSEMBLE_DECIDER!r} nor a backend name"
            )
        for backend in self.backends:
            if backend.kind is BackendKind.MOCK and backend.name not in self.mock_scripts:
                raise ConfigError(f"mock backend {backend.name!r} has no script file configured")


def _require(mapping: Mapping[str, Any], key: str, context: str) -> Any:
    if key not in mapping:
        raise ConfigError(f"missing {context}.{key} in run configuration")
    return mapping[key]


def _existing_path(base: Path, raw: str, context: str) -> Path:
    path = (base / raw).resolve() if not Path(raw).is_absolute() else Path(raw)
    if not path.exists():
        raise ConfigError(f"{context}: file {path} does not exist")
    return path


def load_run_config(
    path: Path | str,
    input_override: Optional[str] = None,
    out_dir_override: Optional[str] = None,
    decider_override: Optional[str] = None,
    seed_override: Optional[int] = None,
) -> RunConfig:
    """Load and validate a YAML run configuration.

    Relative paths inside the file resolve against the file's directory;
    override paths (which mirror the CLI flags) resolve against the working
    directory like any command-line path. Every referenced file must exist
    at validation time.

    Raises:
        ConfigError: on missing keys, unknown kinds, or missing files.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    base = path.parent
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")

    run_section = data.get("run") or {}
    # Paths given on the command line resolve like any CLI path (against the
    # working directory); paths written inside the file resolve against it.
    if input_override:
        input_path = _existing_path(Path.cwd(), str(input_override), "input")
    else:
        input_path = _existing_path(base, str(_require(data, "input", "top level")), "input")
    if out_dir_override:
        out_dir = Path(out_dir_override).resolve()
    else:
        out_dir_raw = run_section.get("out_dir") or "run_output"
        out_dir = (base / out_dir_raw).resolve() if not Path(out_dir_raw).is_absolute() else Path(out_dir_raw)

    norm_section = data.get("normalization") or {}
    abbrev_path = norm_section.get("abbreviations")
    if abbrev_path:
        abbreviations = load_abbreviations(_existing_path(base, abbrev_path, "normalization.abbreviations"))
        profile = NormalizationProfile(abbreviation_dictionary=abbreviations)
    else:
        profile = default_profile()

    legal_section = data.get("legal_forms") or {}
    if legal_section.get("registry"):
        legal_registry = load_legal_form_registry(
            _existing_path(base, legal_section["registry"], "legal_forms.registry")
        )
    else:
        legal_registry = default_registry()
    if legal_section.get("codes"):
        code_map = load_code_map(
            _existing_path(base, legal_section["codes"], "legal_forms.codes"), legal_registry
        )
    else:
        code_map = default_code_map(legal_registry)

    vector_section = data.get("vectorizer") or {}
    try:
        vectorizer = VectorizerConfig(
            mode=VectorizerMode(vector_section.get("mode", "char_ngram")),
            n=int(vector_section.get("n", 2)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid vectorizer settings: {exc}") from exc

    threshold_section = data.get("thresholds") or {}
    try:
        policy = ThresholdPolicy(
            accept_at=float(threshold_section.get("accept_at", 0.95)),
            reject_below=float(threshold_section.get("reject_below", 0.80)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid thresholds: {exc}") from exc

    backends: list[BackendDescriptor] = []
    mock_scripts: dict[str, Path] = {}
    for i, raw_backend in enumerate(data.get("backends") or []):
        context = f"backends[{i}]"
        name = str(_require(raw_backend, "name", context))
        try:
            kind = BackendKind(str(_require(raw_backend, "kind", context)))
        except ValueError as exc:
            raise ConfigError(f"{context}: unknown backend kind") from exc
        try:
            descriptor = BackendDescriptor(
                name=name,
                kind=kind,
                endpoint=raw_backend.get("endpoint"),
                model_id=raw_backend.get("model_id"),
                timeout=float(raw_backend.get("timeout", 30.0)),
                max_retries=int(raw_backend.get("max_retries", 2)),
            )
        except ValueError as exc:
            raise ConfigError(f"{context}: {exc}") from exc
        backends.append(descriptor)
        if kind is BackendKind.MOCK:
            script = _require(raw_backend, "script", context)
            mock_scripts[name] = _existing_path(base, str(script), f"{context}.script")

    reference_section = data.get("reference") or {}
    reference_kind = str(reference_section.get("kind", "none"))
    reference_path: Optional[Path] = None
    reference_endpoint: Optional[str] = None
    if reference_kind == "fixture":
        reference_path = _existing_path(
            base, str(_require(reference_section, "path", "reference")), "reference.path"
        )
    elif reference_kind == "remote":
        reference_endpoint = str(_require(reference_section, "endpoint", "reference"))
    elif reference_kind != "none":
        raise ConfigError(f"reference.kind must be fixture, remote, or none, got {reference_kind!r}")

    registry_section = data.get("registry") or {}
    registry_seed: Optional[Path] = None
    if registry_section.get("seed_log"):
        registry_seed = _existing_path(base, str(registry_section["seed_log"]), "registry.seed_log")

    try:
        return RunConfig(
            input_path=input_path,
            out_dir=out_dir,
            profile=profile,
            vectorizer=vectorizer,
            policy=policy,
            backends=backends,
            decider=str(decider_override or run_section.get("decider", ENSEMBLE_DECIDER)),
            legal_registry=legal_registry,
            code_map=code_map,
            mock_scripts=mock_scripts,
            reference_kind=reference_kind,
            reference_path=reference_path,
            reference_endpoint=reference_endpoint,
            reference_name_fallback=bool(reference_section.get("name_fallback", False)),
            registry_seed=registry_seed,
            concurrency=int(run_section.get("concurrency", 1)),
            seed=int(seed_override if seed_override is not None else run_section.get("seed", 0)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass
class PipelineContext:
    """Everything `resolve_case` needs, bundled once per run."""

    profile: NormalizationProfile
    vectorizer: VectorizerConfig
    policy: ThresholdPolicy
    backends: list[BackendDescriptor]
    decider: str
    legal_registry: LegalFormRegistry
    code_map: dict[str, str]
    store: RegistryStore
    queue: ReviewQueue
    transports: dict[str, ChatTransport] = field(default_factory=dict)
    reference_client: ReferenceSourceClient = field(default_factory=NullReferenceClient)
    errors: list[str] = field(default_factory=list)


def registry_lookup(record: EntityRecord, store: RegistryStore, profile: NormalizationProfile) -> Optional[str]:
    """Code for an already-registered entity, by identifier first, then name.

    The name probe uses the declared name normalized the same way official
    names were normalized when they were registered.
    """
    code = store.lookup_identifier(record.country, record.national_identifier)
    if code is not None:
        return code
    return store.lookup_name(normalize_name(record.company_name, profile))


def enrich(case: MatchCase, client: ReferenceSourceClient) -> MatchCase:
    """Fill an empty reference from the reference source, in place.

    Cases that already carry reference data are returned untouched; a source
    failure propagates as :class:`EnrichmentError` for the caller to record.
    """
    if not case.reference.is_empty:
        return case
    fetched = client.fetch(
        case.record.country, case.record.national_identifier, case.record.company_name
    )
    case.reference = fetched
    return case


@dataclass
class _Assessment:
    """Provisional outcome of the pure classification phase."""

    label: ResolutionLabel
    reasons: list[RejectReason] = field(default_factory=list)
    note: str = ""
    registry_code: Optional[str] = None


def _comparison_name(case: MatchCase, profile: NormalizationProfile) -> Optional[str]:
    """Name to compare the declaration against: official, else best previous."""
    if case.reference.official_name is not None:
        return case.reference.official_name
    if not case.reference.previous_names:
        return None
    declared = normalize_name(case.record.company_name, profile)
    return max(
        case.reference.previous_names,
        key=lambda name: levenshtein_similarity(declared, normalize_name(name, profile)),
    )


def _legal_form_gate(case: MatchCase, ctx: PipelineContext, comparison_name: Optional[str]) -> LegalFormVerdict:
    """Reconcile legal-form signals for a name-accepted case."""
    declared_normalized = normalize_name(case.record.company_name, ctx.profile)
    _, declared_form = extract_legal_form(declared_normalized, ctx.legal_registry)
    if declared_form is None and case.record.legal_form_abbreviation:
        declared_form = canonicalize_abbreviation(
            case.record.legal_form_abbreviation, ctx.legal_registry
        )
    official_form = None
    if comparison_name is not None:
        _, official_form = extract_legal_form(
            normalize_name(comparison_name, ctx.profile), ctx.legal_registry
        )
    return compare_legal_forms(
        case.record.legal_form_code,
        declared_form,
        official_form,
        ctx.code_map,
        ctx.legal_registry,
    )


def _assess(case: MatchCase, ctx: PipelineContext) -> _Assessment:
    """Pure classification phase: mutates only the case's own fields.

    No codes are issued and nothing is enqueued here, so this phase can run
    for many cases in parallel without affecting determinism.
    """
    hit = registry_lookup(case.record, ctx.store, ctx.profile)
    if hit is not None:
        return _Assessment(ResolutionLabel.ACCEPTED, note="registry hit", registry_code=hit)

    if case.reference.is_empty:
        try:
            enrich(case, ctx.reference_client)
        except EnrichmentError as exc:
            ctx.errors.append(f"case {case.case_id}: {exc}")
            return _Assessment(
                ResolutionLabel.DOUBTFUL,
                reasons=[RejectReason.other(f"reference lookup failed: {exc}")],
                note="reference lookup failed",
            )

    comparison_name = _comparison_name(case, ctx.profile)
    if comparison_name is not None:
        case.scores = score_pair(
            case.record.company_name, comparison_name, ctx.profile, ctx.vectorizer
        ).as_dict()

    try:
        for backend in ctx.backends:
            case.verdicts[backend.name] = classify_case(
                case, backend, ctx.policy, ctx.transports.get(backend.name)
            )
    except BackendError as exc:
        ctx.errors.append(str(exc))
        return _Assessment(
            ResolutionLabel.DOUBTFUL,
            reasons=[RejectReason.other(f"backend failure: {exc}")],
            note="backend failure",
        )

    if ctx.decider == ENSEMBLE_DECIDER:
        name_result = ensemble_vote(list(case.verdicts.values()))
        note = "ensemble vote"
    else:
        name_result = case.verdicts[ctx.decider]
        note = f"decider {ctx.decider}"

    if name_result is ResolutionLabel.REJECTED:
        return _Assessment(
            ResolutionLabel.REJECTED,
            reasons=[RejectReason(RejectReasonKind.NAME_MISMATCH, "declared name does not match the register")],
            note=note,
        )
    if name_result is ResolutionLabel.DOUBTFUL:
        if case.reference.is_empty:
            note = "no official or previous name available"
        return _Assessment(ResolutionLabel.DOUBTFUL, note=note)

    # Name accepted: the legal form must not contradict it.
    verdict = _legal_form_gate(case, ctx, comparison_name)
    case.legal_form_verdict = verdict
    if verdict.outcome is LegalFormOutcome.INCONSISTENT:
        return _Assessment(
            ResolutionLabel.REJECTED,
            reasons=[RejectReason(RejectReasonKind.LEGAL_FORM_MISMATCH, verdict.detail)],
            note="legal form mismatch",
        )
    if verdict.outcome is LegalFormOutcome.INDETERMINATE:
        return _Assessment(ResolutionLabel.DOUBTFUL, note=f"legal form indeterminate: {verdict.detail}")
    return _Assessment(ResolutionLabel.ACCEPTED, note=note)


def _finalize(case: MatchCase, assessment: _Assessment, ctx: PipelineContext) -> MatchCase:
    """Sequential completion phase: codes, queueing, final label."""
    if assessment.registry_code is not None:
        case.set_resolution(ResolutionLabel.ACCEPTED)
        case.assigned_code = assessment.registry_code
        return case
    if assessment.label is ResolutionLabel.ACCEPTED:
        official = case.reference.official_name or case.record.company_name
        code = ctx.store.register(
            country=case.record.country,
            identifier=case.record.national_identifier,
            name=normalize_name(official, ctx.profile),
        )
        case.set_resolution(ResolutionLabel.ACCEPTED)
        case.assigned_code = code
        return case
    if assessment.label is ResolutionLabel.REJECTED:
        case.set_resolution(ResolutionLabel.REJECTED, assessment.reasons)
        return case
    case.set_resolution(ResolutionLabel.DOUBTFUL, assessment.reasons)
    ctx.queue.enqueue(case, note=assessment.note)
    return case


def resolve_case(case: MatchCase, ctx: PipelineContext) -> MatchCase:
    """Resolve a single case end to end (classify, gate, code, or enqueue).

    Registry hits resolve Accepted with the existing code and touch no
    backend. A case is never both Rejected and code-assigned, and only final
    acceptance issues a code.
    """
    return _finalize(case, _assess(case, ctx), ctx)


@dataclass
class RunReport:
    """Summary of one pipeline run."""

    total_cases: int
    accepted: int
    rejected: int
    doubtful: int
    registry_hits: int
    enqueued: int
    distribution: dict[str, int]
    metrics: list[MetricsRow]
    tallies: dict[str, dict[str, Any]]
    errors: list[str]
    seed: int
    decider: str
    out_dir: str
    abbreviations: dict[str, str]

    def to_dict(self) -> dict[str, Any]:
        return {
            "total_cases": self.total_cases,
            "accepted": self.accepted,
            "rejected": self.rejected,
            "doubtful": self.doubtful,
            "registry_hits": self.registry_hits,
            "enqueued": self.enqueued,
            "distribution": self.distribution,
            "metrics": [row.to_dict() for row in self.metrics],
            "tallies": self.tallies,
            "errors": self.errors,
            "seed": self.seed,
            "decider": self.decider,
            "abbreviations": self.abbreviations,
        }


def _build_context(config: RunConfig, out_dir: Path, clock: Clock) -> PipelineContext:
    registry_log = out_dir / REGISTRY_LOG
    if config.registry_seed is not None:
        shutil.copyfile(config.registry_seed, registry_log)
    store = RegistryStore(registry_log, clock)
    queue = ReviewQueue(out_dir / QUEUE_LOG, clock)

    transports: dict[str, ChatTransport] = {}
    for backend in config.backends:
        if backend.kind is BackendKind.MOCK:
            transports[backend.name] = ScriptedTransport.from_file(config.mock_scripts[backend.name])
        elif backend.kind is BackendKind.REMOTE_CHAT:
            transports[backend.name] = HttpChatTransport()

    client: ReferenceSourceClient
    if config.reference_kind == "fixture":
        assert config.reference_path is not None
        client = FixtureReferenceClient(
            config.reference_path, config.profile, config.reference_name_fallback
        )
    elif config.reference_kind == "remote":
        assert config.reference_endpoint is not None
        client = RemoteReferenceClient(config.reference_endpoint)
    else:
        client = NullReferenceClient()

    return PipelineContext(
        profile=config.profile,
        vectorizer=config.vectorizer,
        policy=config.policy,
        backends=config.backends,
        decider=config.decider,
        legal_registry=config.legal_registry,
        code_map=config.code_map,
        store=store,
        queue=queue,
        transports=transports,
        reference_client=client,
    )


def _labeled(cases: Sequence[MatchCase]) -> list[MatchCase]:
    return [case for case in cases if case.ground_truth is not None]


def _method_rows(cases: Sequence[MatchCase], ctx: PipelineContext) -> tuple[list[MetricsRow], dict[str, dict[str, Any]]]:
    """Per-backend and final-resolution metrics over the labeled cases."""
    rows: list[MetricsRow] = []
    tallies: dict[str, dict[str, Any]] = {}
    labeled = _labeled(cases)
    if not labeled:
        return rows, tallies

    method_predictions: list[tuple[str, dict[str, ResolutionLabel], list[MatchCase]]] = []
    for backend in ctx.backends:
        subset = [case for case in labeled if backend.name in case.verdicts]
        if subset:
            predictions = {case.case_id: case.verdicts[backend.name] for case in subset}
            method_predictions.append((backend.name, predictions, subset))
    final_subset = [case for case in labeled if case.resolution is not None]
    if final_subset:
        predictions = {case.case_id: case.resolution for case in final_subset}
        method_predictions.append((FINAL_METHOD_NAME, predictions, final_subset))

    for method, predictions, subset in method_predictions:
        tally = confusion_from_cases(subset, predictions)
        rows.append(compute_metrics(tally.matrix, method))
        tallies[method] = {
            "matrix": {
                "tp": tally.matrix.tp,
                "fp": tally.matrix.fp,
                "tn": tally.matrix.tn,
                "fn": tally.matrix.fn,
            },
            "doubtful_predictions": tally.doubtful_predictions,
            "excluded_doubtful_truth": tally.excluded_doubtful_truth,
            "cases": len(subset),
        }
    return rows, tallies


def _write_run_artifacts(
    out_dir: Path, cases: Sequence[MatchCase], report: RunReport
) -> None:
    with (out_dir / CASES_FILE).open("w", encoding="utf-8") as handle:
        for case in cases:
            handle.write(json.dumps(case.to_dict(), sort_keys=True) + "\n")

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["case_id", "country", "company_name", "resolution", "assigned_code",
         "reject_reasons", "levenshtein", "cosine", "jaccard"]
    )
    for case in cases:
        reasons = "|".join(
            f"{reason.kind.value}:{reason.detail}" if reason.detail else reason.kind.value
            for reason in case.reject_reasons
        )
        scores = [
            f"{case.scores[m]:.6f}" if m in case.scores else ""
            for m in ("levenshtein", "cosine", "jaccard")
        ]
        writer.writerow(
            [
                case.case_id,
                case.record.country,
                case.record.company_name,
                case.resolution.value if case.resolution else "",
                case.assigned_code or "",
                reasons,
                *scores,
            ]
        )
    (out_dir / RESOLUTIONS_FILE).write_text(buffer.getvalue(), encoding="utf-8")

    (out_dir / REPORT_FILE).write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    if report.metrics:
        (out_dir / METRICS_JSON).write_text(
            json.dumps({"rows": [row.to_dict() for row in report.metrics], "tallies": report.tallies},
                       indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        (out_dir / METRICS_CSV).write_text(
            emit_report(report.metrics, ReportFormat.DELIMITED), encoding="utf-8"
        )
        (out_dir / METRICS_MD).write_text(
            emit_report(report.metrics, ReportFormat.MARKDOWN), encoding="utf-8"
        )


def run_pipeline(config: RunConfig, clock: Optional[Clock] = None) -> RunReport:
    """Execute a full resolution run and write its artifacts.

    The classification phase runs under bounded parallelism
    (``config.concurrency`` workers); codes are issued and Doubtful cases
    enqueued sequentially in input order, so output is independent of the
    worker count. An empty input yields a zero-case report, not an error.

    Returns:
        The run report (also persisted to ``out_dir/report.json``).
    """
    out_dir = config.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    clock = clock or LogicalClock()
    ctx = _build_context(config, out_dir, clock)
    cases = load_dataset(config.input_path)

    if config.concurrency == 1 or len(cases) <= 1:
        assessments = [_assess(case, ctx) for case in cases]
    else:
        with ThreadPoolExecutor(max_workers=config.concurrency) as pool:
            assessments = list(pool.map(lambda case: _assess(case, ctx), cases))
    for case, assessment in zip(cases, assessments):
        _finalize(case, assessment, ctx)

    registry_hits = sum(1 for a in assessments if a.registry_code is not None)
    rows, tallies = _method_rows(cases, ctx)
    report = RunReport(
        total_cases=len(cases),
        accepted=sum(1 for c in cases if c.resolution is ResolutionLabel.ACCEPTED),
        rejected=sum(1 for c in cases if c.resolution is ResolutionLabel.REJECTED),
        doubtful=sum(1 for c in cases if c.resolution is ResolutionLabel.DOUBTFUL),
        registry_hits=registry_hits,
        enqueued=len(ctx.queue.pending()),
        distribution=class_distribution(cases),
        metrics=rows,
        tallies=tallies,
        errors=sorted(ctx.errors),
        seed=config.seed,
        decider=config.decider,
        out_dir=str(out_dir),
        abbreviations=dict(config.profile.abbreviation_dictionary),
    )
    _write_run_artifacts(out_dir, cases, report)
    ctx.store.write_snapshot()
    return report


def calibrate_thresholds(
    cases: Sequence[MatchCase],
    metric: str,
    thresholds: Optional[Sequence[float]] = None,
) -> list[dict[str, float]]:
    """Sweep hard accept thresholds for one metric over labeled, scored cases.

    For each candidate threshold the band collapses (``reject_below ==
    accept_at``), every case gets a hard Accept/Reject, and the resulting
    accuracy and false-positive rate are reported so an operator can pick the
    trade-off point.

    Returns:
        One row per threshold: ``{"threshold", "accuracy", "fpr"}`` with the
        percentages rounded to two decimals.
    """
    labeled = [
        case for case in _labeled(cases)
        if metric in case.scores and case.ground_truth is not ResolutionLabel.DOUBTFUL
    ]
    if not labeled:
        raise ConfigError(f"no labeled cases carry a {metric!r} score")
    if thresholds is None:
        thresholds = sorted({round(i / 20, 2) for i in range(1, 21)})
    results = []
    for threshold in thresholds:
        policy = ThresholdPolicy(accept_at=threshold, reject_below=threshold)
        predictions = {
            case.case_id: threshold_classify(case.scores[metric], policy) for case in labeled
        }
        tally = confusion_from_cases(labeled, predictions)
        row = compute_metrics(tally.matrix, metric)
        results.append({"threshold": threshold, "accuracy": row.accuracy, "fpr": row.fpr})
    return results


class RunDirectory:
    """Handle on a completed run's artifacts for review and serving."""

    def __init__(self, path: Path | str, clock: Optional[Clock] = None):
        self.path = Path(path)
        if not self.path.is_dir():
            raise ConfigError(f"run directory {self.path} does not exist")
        clock = clock or SystemClock()
        self.report: dict[str, Any] = {}
        report_file = self.path / REPORT_FILE
        if report_file.exists():
            self.report = json.loads(report_file.read_text(encoding="utf-8"))
        abbreviations = self.report.get("abbreviations")
        if abbreviations is None:
            self.profile = default_profile()
        else:
            self.profile = NormalizationProfile(abbreviation_dictionary=dict(abbreviations))
        self.queue = ReviewQueue(self.path / QUEUE_LOG, clock)
        self.store = RegistryStore(self.path / REGISTRY_LOG, clock)

    def metrics_rows(self) -> Optional[list[MetricsRow]]:
        metrics_file = self.path / METRICS_JSON
        if not metrics_file.exists():
            return None
        data = json.loads(metrics_file.read_text(encoding="utf-8"))
        return [MetricsRow.from_dict(row) for row in data.get("rows", [])]


def apply_review_decision(
    run_dir: RunDirectory,
    case_id: str,
    decision: ResolutionLabel,
    reviewer: str,
    reason: Optional[RejectReason] = None,
) -> MatchCase:
    """Apply a human decision to a queued case, issuing a code on acceptance.

    All validations run before anything is written, so a failed request
    leaves both the queue log and the registry log untouched.

    Raises:
        QueueLookupError / QueueStateError / QueueValidationError: as for
            :meth:`ReviewQueue.decide`.
    """
    if decision not in (ResolutionLabel.ACCEPTED, ResolutionLabel.REJECTED):
        raise QueueValidationError("a review decision must be Accepted or Rejected")
    if not reviewer.strip():
        raise QueueValidationError("reviewer must be non-empty")
    if decision is ResolutionLabel.REJECTED and reason is None:
        raise QueueValidationError("rejecting a case requires a reject reason")
    entry = run_dir.queue.get(case_id)  # raises QueueLookupError
    if entry.status is not QueueStatus.PENDING:
        raise QueueStateError(f"case {case_id} is not pending (status: {entry.status.value})")

    assigned_code: Optional[str] = None
    if decision is ResolutionLabel.ACCEPTED:
        case = entry.case
        official = case.reference.official_name or case.record.company_name
        assigned_code = run_dir.store.register(
            country=case.record.country,
            identifier=case.record.national_identifier,
            name=normalize_name(official, run_dir.profile),
        )
    decided = run_dir.queue.decide(case_id, decision, reviewer, reason, assigned_code)
    return decided.case


def reprocess_case(run_dir: RunDirectory, case_id: str, reviewer: str = "") -> MatchCase:
    """Reopen a resolved case; any issued code is superseded, never deleted."""
    entry = run_dir.queue.get(case_id)  # raises QueueLookupError
    if entry.status is not QueueStatus.RESOLVED:
        raise QueueStateError(f"case {case_id} is not resolved (status: {entry.status.value})")
    if entry.case.assigned_code:
        run_dir.store.supersede(entry.case.assigned_code)
    reopened = run_dir.queue.reprocess(case_id, reviewer)
    return reopened.case
