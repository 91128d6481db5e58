"""Loading and saving the declared-entities dataset.

The on-disk format is a UTF-8 delimited file with a fixed twelve-column
header. Both comma and semicolon delimiters occur in the wild; the loader
auto-detects from the header line unless told otherwise.
"""

from __future__ import annotations

import csv
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

from .legal_forms import LegalFormError, parse_legal_form_code
from .models import (
    EntityRecord,
    MatchCase,
    ModelError,
    ReferenceEntry,
    ResolutionLabel,
    default_case_id,
    parse_resolution_label,
)

__all__ = [
    "COLUMNS",
    "DatasetError",
    "DatasetFormat",
    "load_dataset",
    "save_dataset",
]

COLUMNS = (
    "Country",
    "CompanyName",
    "Entity",
    "NationalIdentifier",
    "IdentifierType",
    "LEI",
    "Sector",
    "LegalForm",
    "Abbreviation",
    "OfficialName",
    "PreviousNames",
    "Result",
)

_PREVIOUS_NAMES_SEPARATOR = "|"


class DatasetError(ValueError):
    """Raised for malformed dataset files; messages name row and column."""


class DatasetFormat(str, Enum):
    """Dataset delimiter selection."""

    AUTO = "auto"
    COMMA = "comma"
    SEMICOLON = "semicolon"

    @property
    def delimiter(self) -> str:
        return ";" if self is DatasetFormat.SEMICOLON else ","


def _detect_delimiter(header_line: str) -> str:
    """Pick the delimiter that splits the header into the expected columns."""
    for delimiter in (",", ";"):
        columns = next(csv.reader([header_line], delimiter=delimiter))
        if tuple(columns) == COLUMNS:
            return delimiter
    raise DatasetError(
        f"header does not match the expected columns {list(COLUMNS)} "
        f"with either ',' or ';': got {header_line.strip()!r}"
    )


def _row_to_case(values: Sequence[str], row_number: int) -> MatchCase:
    """Convert one data row (already split) into a MatchCase."""
    if len(values) != len(COLUMNS):
        raise DatasetError(
            f"row {row_number}: expected {len(COLUMNS)} columns, got {len(values)}"
        )
    row = dict(zip(COLUMNS, (value.strip() for value in values)))

    legal_form_code = None
    if row["LegalForm"]:
        try:
            legal_form_code = parse_legal_form_code(row["LegalForm"])
        except LegalFormError as exc:
            raise DatasetError(f"row {row_number}, column LegalForm: {exc}") from exc

    try:
        record = EntityRecord(
            country=row["Country"],
            company_name=row["CompanyName"],
            entity_app=row["Entity"],
            national_identifier=row["NationalIdentifier"],
            identifier_type=row["IdentifierType"],
            lei=row["LEI"],
            sector=row["Sector"],
            legal_form_code=legal_form_code,
            legal_form_abbreviation=row["Abbreviation"],
        )
    except ModelError as exc:
        # Attribute the failure to the column whose value broke the contract.
        message = str(exc)
        column = "CompanyName"
        if "country" in message:
            column = "Country"
        elif "LEI" in message:
            column = "LEI"
        raise DatasetError(f"row {row_number}, column {column}: {exc}") from exc

    previous = tuple(
        part.strip()
        for part in row["PreviousNames"].split(_PREVIOUS_NAMES_SEPARATOR)
        if part.strip()
    )
    try:
        reference = ReferenceEntry(
            official_name=row["OfficialName"] or None,
            previous_names=previous,
        )
    except ModelError as exc:
        raise DatasetError(f"row {row_number}, column OfficialName: {exc}") from exc

    ground_truth: Optional[ResolutionLabel] = None
    if row["Result"]:
        try:
            ground_truth = parse_resolution_label(row["Result"])
        except ModelError as exc:
            raise DatasetError(f"row {row_number}, column Result: {exc}") from exc

    return MatchCase(
        case_id=default_case_id(
            record.country, record.company_name, record.national_identifier
        ),
        record=record,
        reference=reference,
        ground_truth=ground_truth,
    )


def load_dataset(path: Path | str, fmt: DatasetFormat = DatasetFormat.AUTO) -> list[MatchCase]:
    """Load a dataset file into cases.

    Args:
        path: dataset file; must be UTF-8.
        fmt: delimiter selection; AUTO detects from the header line.

    Returns:
        One MatchCase per data row, in file order, with deterministic case
        ids derived from (country, company name, national identifier). A
        header-only file yields an empty list.

    Raises:
        DatasetError: wrong header, malformed rows (message names the row
            number and column), unknown result labels, or non-UTF-8 bytes.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DatasetError(f"{path} is not valid UTF-8: {exc}") from exc
    lines = text.splitlines()
    if not lines:
        raise DatasetError(f"{path} is empty; expected at least a header line")

    if fmt is DatasetFormat.AUTO:
        delimiter = _detect_delimiter(lines[0])
    else:
        delimiter = fmt.delimiter
        header = tuple(next(csv.reader([lines[0]], delimiter=delimiter)))
        if header != COLUMNS:
            raise DatasetError(
                f"header does not match the expected columns {list(COLUMNS)}: got {list(header)}"
            )

    reader = csv.reader(lines[1:], delimiter=delimiter)
    cases: list[MatchCase] = []
    seen_ids: dict[str, int] = {}
    for offset, values in enumerate(reader, start=2):
        if not values or all(not value.strip() for value in values):
            continue  # ignore trailing blank lines
        case = _row_to_case(values, offset)
        # Duplicate declaring fields get a deterministic ordinal suffix so
        # case ids stay unique within a file.
        count = seen_ids.get(case.case_id, 0)
        seen_ids[case.case_id] = count + 1
        if count:
            case.case_id = f"{case.case_id}-{count + 1}"
        cases.append(case)
    return cases


def save_dataset(
    cases: Sequence[MatchCase],
    path: Path | str,
    fmt: DatasetFormat = DatasetFormat.COMMA,
) -> None:
    """Write cases back to the twelve-column format.

    Loading a saved file yields equal records, references, and ground truth
    (scores and resolutions live in run artifacts, not in the dataset).

    Raises:
        ValueError: for AUTO, which is a loading mode, not a delimiter.
    """
    if fmt is DatasetFormat.AUTO:
        raise ValueError("choose COMMA or SEMICOLON when saving")
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, delimiter=fmt.delimiter, lineterminator="\n")
        writer.writerow(COLUMNS)
        for case in cases:
            record = case.record
            writer.writerow(
                [
                    record.country,
                    record.company_name,
                    record.entity_app,
                    record.national_identifier,
                    record.identifier_type,
                    record.lei,
                    record.sector,
                    str(record.legal_form_code) if record.legal_form_code else "",
                    record.legal_form_abbreviation,
                    case.reference.official_name or "",
                    _PREVIOUS_NAMES_SEPARATOR.join(case.reference.previous_names),
                    case.ground_truth.value if case.ground_truth else "",
                ]
            )
