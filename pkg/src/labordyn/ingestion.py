"""Monthly CAGED-style aggregates: parsing, validation and normalized output.

Input is delimiter-separated text with four columns: period, balance of
workers, worker stock, active employers. Brazilian formatting (the default)
uses ``.`` as thousands separator, so ``23.743.110`` is 23743110. A plain
reader would take the same token as a decimal and silently shrink the value
by three orders of magnitude, so plain mode rejects it instead.
"""
from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import NamedTuple

from .errors import EmptyInput, GapError, MonotonicityError, ParseError, SchemaError, TooFewRecords

LOCALES = ("brazilian", "plain")
COLUMNS = ("period", "balance", "workers", "employers")
DELIMITERS = (";", "\t", ",")

_BR_INT = re.compile(r"^[+-]?(\d{1,3}(\.\d{3})+|\d+)$")
_PLAIN_NUM = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_PERIOD_MY = re.compile(r"^(\d{1,2})/(\d{4})$")
_PERIOD_YM = re.compile(r"^(\d{4})-(\d{1,2})$")


class Period(NamedTuple):
    year: int
    month: int

    @classmethod
    def parse(cls, text):
        """Parse ``MM/YYYY`` or ``YYYY-MM``."""
        text = text.strip()
        m = _PERIOD_MY.match(text)
        if m:
            month, year = int(m.group(1)), int(m.group(2))
        else:
            m = _PERIOD_YM.match(text)
            if not m:
                raise ValueError(f"not a period: {text!r}")
            year, month = int(m.group(1)), int(m.group(2))
        if not 1 <= month <= 12:
            raise ValueError(f"month out of range in {text!r}")
        return cls(year, month)

    @property
    def ordinal(self):
        return self.year * 12 + self.month - 1

    def next(self):
        return Period(self.year + self.month // 12, self.month % 12 + 1)

    def __str__(self):
        return f"{self.year:04d}-{self.month:02d}"


@dataclass(frozen=True)
class LaborRecord:
    period: Period
    balance: int
    workers: int
    employers: int

    def __post_init__(self):
        if self.workers < 0:
            raise ValueError(f"workers must be >= 0, got {self.workers}")
        if self.employers < 0:
            raise ValueError(f"employers must be >= 0, got {self.employers}")

    def feature(self, name):
        return getattr(self, name)


@dataclass(frozen=True)
class Dataset:
    """Records sorted by period.

    Attributes:
        records (tuple of LaborRecord): one per month.
        source (str): free-text provenance.
        gaps (tuple of Period): months missing from the sequence; only
            non-empty when parsed with ``allow_gaps=True``.
    """

    records: tuple
    source: str = ""
    gaps: tuple = field(default=())

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def column(self, name):
        return [getattr(r, name) for r in self.records]


def _parse_int(token, locale, line, col):
    token = token.strip()
    if locale == "brazilian":
        if not _BR_INT.match(token):
            raise ParseError(f"{token!r} is not a Brazilian-formatted integer", line, col)
        return int(token.replace(".", ""))
    if not _PLAIN_NUM.match(token):
        raise ParseError(f"{token!r} is not a plain number", line, col)
    value = float(token)
    if not value.is_integer():
        raise ParseError(f"{token!r} is not an integer value", line, col)
    return int(value)


def _detect_delimiter(line):
    for d in DELIMITERS:
        if d in line:
            return d
    raise SchemaError("no delimiter found (expected ';', tab or ',')", 1)


def parse_dataset(source, locale="brazilian", allow_gaps=False, name=None):
    """Parse monthly aggregates into a Dataset.

    Args:
        source (str or text stream): the delimiter-separated text. A header
            row is recognised by its first cell not being a period.
        locale (str): ``"brazilian"`` (dots group thousands) or ``"plain"``
            (dot is a decimal point; values must still be integral).
        allow_gaps (bool): accept missing months, listing them in
            ``Dataset.gaps``; otherwise a missing month is an error.
        name (str): provenance stored in ``Dataset.source``.

    Raises:
        EmptyInput: no data rows.
        SchemaError: a row does not have four columns.
        ParseError: a cell failed to parse; carries line and column.
        MonotonicityError: periods out of order or repeated.
        GapError: a month is missing and ``allow_gaps`` is false.
    """
    if locale not in LOCALES:
        raise ValueError(f"locale must be one of {LOCALES}, got {locale!r}")
    text = source if isinstance(source, str) else source.read()
    lines = text.splitlines()
    numbered = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not numbered:
        raise EmptyInput("input contains no rows")
    delimiter = _detect_delimiter(numbered[0][1])

    records, gaps = [], []
    for k, (lineno, raw) in enumerate(numbered):
        row = next(csv.reader([raw], delimiter=delimiter))
        if len(row) != 4:
            raise SchemaError(f"expected 4 columns, found {len(row)}", lineno)
        try:
            period = Period.parse(row[0])
        except ValueError as exc:
            if k == 0:
                continue  # header
            raise ParseError(str(exc), lineno, 1) from None
        balance = _parse_int(row[1], locale, lineno, 2)
        workers = _parse_int(row[2], locale, lineno, 3)
        employers = _parse_int(row[3], locale, lineno, 4)
        try:
            rec = LaborRecord(period, balance, workers, employers)
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if records:
            prev = records[-1].period
            if period.ordinal <= prev.ordinal:
                raise MonotonicityError(f"period {period} does not follow {prev}", lineno, 1)
            if period.ordinal != prev.ordinal + 1:
                missing = []
                p = prev.next()
                while p.ordinal < period.ordinal:
                    missing.append(p)
                    p = p.next()
                if not allow_gaps:
                    raise GapError(f"missing month(s) between {prev} and {period}", lineno, 1)
                gaps.extend(missing)
        records.append(rec)
    if not records:
        raise EmptyInput("input contains a header but no data rows")
    return Dataset(tuple(records), name or "", tuple(gaps))


def load_dataset(path, locale="brazilian", allow_gaps=False):
    path = Path(path)
    with open(path, encoding="utf-8-sig", newline="") as fh:
        return parse_dataset(fh, locale=locale, allow_gaps=allow_gaps, name=str(path))


def bundled_caged_1996_text():
    return resources.files("labordyn").joinpath("data/caged_1996.csv").read_text(encoding="utf-8")


def load_caged_1996():
    """The bundled 12 months of 1996 aggregates (Brazilian formatting)."""
    return parse_dataset(bundled_caged_1996_text(), locale="brazilian", name="CAGED aggregates, 01/1996-12/1996")


def serialize_dataset(dataset):
    """Normalized CSV: comma-delimited, plain integers, ``YYYY-MM`` periods."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in dataset.records:
        writer.writerow((str(r.period), r.balance, r.workers, r.employers))
    return buf.getvalue()


def validate_balances(dataset):
    """Months whose balance differs from the month-over-month worker change.

    Pairs straddling a gap are skipped.

    Returns:
        list of (Period, int): ``(period, (workers_t - workers_{t-1}) - balance_t)``
        for every mismatch; empty when the identity holds throughout.

    Raises:
        TooFewRecords: fewer than two records.
    """
    records = dataset.records if isinstance(dataset, Dataset) else tuple(dataset)
    if len(records) < 2:
        raise TooFewRecords(f"need at least 2 records, got {len(records)}")
    out = []
    for prev, cur in zip(records, records[1:]):
        if cur.period.ordinal != prev.period.ordinal + 1:
            continue
        discrepancy = (cur.workers - prev.workers) - cur.balance
        if discrepancy != 0:
            out.append((cur.period, discrepancy))
    return out
