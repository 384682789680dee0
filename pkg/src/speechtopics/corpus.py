"""Corpus records and their CSV serialization.

A corpus is an ordered list of :class:`DocumentRecord`. On disk it is a
UTF-8 CSV with header ``pmid,title,authors,year,journal,abstract,doi,language``,
RFC-4180 quoting, authors joined by ``"; "``. Optional fields are written
as empty cells and read back as ``None`` (never as empty-string sentinels).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

CSV_HEADER = ["pmid", "title", "authors", "year", "journal", "abstract", "doi", "language"]

AUTHOR_SEPARATOR = "; "


class CorpusFormatError(ValueError):
    """Raised when a corpus CSV file does not match the expected schema."""


@dataclass
class DocumentRecord:
    """One PubMed article: identification metadata plus the abstract text."""

    pmid: str
    title: str = ""
    authors: list[str] = field(default_factory=list)
    year: Optional[int] = None
    journal: str = ""
    abstract: Optional[str] = None
    doi: Optional[str] = None
    language: Optional[str] = None

    def validate(self) -> list[str]:
        problems = []
        if not self.pmid:
            problems.append("pmid must be non-empty")
        if self.year is not None and not (1800 <= self.year <= 2100):
            problems.append(f"year {self.year} outside [1800, 2100]")
        if self.language is not None and self.language != self.language.lower():
            problems.append(f"language {self.language!r} must be lowercase")
        return problems


def _check_unique_pmids(records: list[DocumentRecord]) -> None:
    seen: set[str] = set()
    for rec in records:
        if rec.pmid in seen:
            raise CorpusFormatError(f"duplicate pmid {rec.pmid!r} in corpus")
        seen.add(rec.pmid)


def write_corpus_csv(records: list[DocumentRecord], path) -> int:
    """Write records to ``path``; returns the number of data rows written."""
    _check_unique_pmids(records)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in records:
            problems = rec.validate()
            if problems:
                raise CorpusFormatError(f"invalid record {rec.pmid!r}: {'; '.join(problems)}")
            writer.writerow(
                [
                    rec.pmid,
                    rec.title,
                    AUTHOR_SEPARATOR.join(rec.authors),
                    "" if rec.year is None else str(rec.year),
                    rec.journal,
                    rec.abstract or "",
                    rec.doi or "",
                    rec.language or "",
                ]
            )
    return len(records)


def read_corpus_csv(path) -> list[DocumentRecord]:
    """Read a corpus CSV produced by :func:`write_corpus_csv`.

    Raises :class:`CorpusFormatError` naming the offending line on a header
    mismatch, a short/long row, or a non-integer year.
    """
    records: list[DocumentRecord] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CorpusFormatError(f"{path}: empty file, expected header {CSV_HEADER}")
        if header != CSV_HEADER:
            raise CorpusFormatError(f"{path}: line 1: bad header {header!r}")
        for row in reader:
            line = reader.line_num
            if len(row) != len(CSV_HEADER):
                raise CorpusFormatError(
                    f"{path}: line {line}: expected {len(CSV_HEADER)} fields, got {len(row)}"
                )
            pmid, title, authors, year, journal, abstract, doi, language = row
            if year:
                try:
                    year_val: Optional[int] = int(year)
                except ValueError:
                    raise CorpusFormatError(f"{path}: line {line}: bad year {year!r}")
            else:
                year_val = None
            records.append(
                DocumentRecord(
                    pmid=pmid,
                    title=title,
                    authors=authors.split(AUTHOR_SEPARATOR) if authors else [],
                    year=year_val,
                    journal=journal,
                    abstract=abstract or None,
                    doi=doi or None,
                    language=language or None,
                )
            )
    _check_unique_pmids(records)
    return records
