"""Shared test helpers: builders for cases and paths to the bundled fixtures."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import pytest

from entitymatch.models import (
    EntityRecord,
    MatchCase,
    ReferenceEntry,
    ResolutionLabel,
    default_case_id,
)

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"


def make_record(
    company_name: str = "ACME LDA",
    country: str = "PT",
    national_identifier: str = "500000001",
    **kwargs,
) -> EntityRecord:
    return EntityRecord(
        country=country,
        company_name=company_name,
        national_identifier=national_identifier,
        **kwargs,
    )


def make_case(
    company_name: str = "ACME LDA",
    official_name: Optional[str] = "ACME, LDA",
    previous_names: tuple[str, ...] = (),
    ground_truth: Optional[ResolutionLabel] = None,
    case_id: Optional[str] = None,
    national_identifier: str = "500000001",
    **record_kwargs,
) -> MatchCase:
    record = make_record(
        company_name=company_name,
        national_identifier=national_identifier,
        **record_kwargs,
    )
    return MatchCase(
        case_id=case_id
        or default_case_id(record.country, record.company_name, record.national_identifier),
        record=record,
        reference=ReferenceEntry(official_name=official_name, previous_names=previous_names),
        ground_truth=ground_truth,
    )


@pytest.fixture()
def fixtures_dir() -> Path:
    return FIXTURES
