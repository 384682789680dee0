"""PubMed retrieval via the NCBI E-utilities HTTP interface.

``build_query`` turns a :class:`QuerySpec` into an esearch term string;
:class:`EutilsClient` pages ``esearch.fcgi`` for PMIDs and batches
``efetch.fcgi`` for article XML, which ``parse_pubmed_xml`` converts to
:class:`~speechtopics.corpus.DocumentRecord`.

The HTTP layer is injectable: the client calls a ``transport(url, params)
-> bytes`` callable, so tests replay canned responses and never touch the
network. The default transport uses ``requests``. Rate limiting and retry
sleeps go through injectable ``clock``/``sleep`` for the same reason.
"""

from __future__ import annotations

import os
import re
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Callable, Optional

from speechtopics.corpus import DocumentRecord

EUTILS_BASE_URL = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils"
API_KEY_ENV_VAR = "NCBI_API_KEY"

# NCBI usage policy: 3 requests/second anonymous, 10 with an API key.
MAX_RPS_WITH_KEY = 10.0
MAX_RPS_WITHOUT_KEY = 3.0

FETCH_BATCH_SIZE = 200

DEFAULT_QUERY_KEYWORDS = (
    "stuttering",
    "stammering",
    "speech disorder",
    "communication disorder",
    "language disorder",
    "tempering",
    "temperament",
)


class InvalidQueryError(ValueError):
    """The query specification violates its own invariants."""


class TransportError(RuntimeError):
    """Terminal HTTP failure (4xx, or retries exhausted)."""


class TransientTransportError(TransportError):
    """Retryable HTTP failure: 5xx or timeout."""


class EutilsParseError(ValueError):
    """The service response could not be parsed."""


@dataclass(frozen=True)
class QuerySpec:
    """Keyword phrases plus a publication-year range."""

    keywords: tuple[str, ...] = DEFAULT_QUERY_KEYWORDS
    boolean_op: str = "OR"
    date_from: int = 2015
    date_to: int = 2025
    database: str = "pubmed"

    def validate(self) -> list[str]:
        problems = []
        if not self.keywords:
            problems.append("keywords must be non-empty")
        if self.boolean_op not in ("AND", "OR"):
            problems.append(f"boolean_op must be AND or OR, got {self.boolean_op!r}")
        if self.date_from > self.date_to:
            problems.append(f"date_from {self.date_from} > date_to {self.date_to}")
        return problems


def build_query(spec: QuerySpec) -> str:
    """Render the esearch term: quoted phrases joined by the boolean
    operator, AND-ed with a ``[pdat]`` publication-date range clause."""
    problems = spec.validate()
    if problems:
        raise InvalidQueryError("; ".join(problems))
    joined = f" {spec.boolean_op} ".join(f'"{kw}"' for kw in spec.keywords)
    return f'({joined}) AND ("{spec.date_from}"[pdat] : "{spec.date_to}"[pdat])'


@dataclass
class FetchSession:
    """Connection settings for one retrieval run."""

    base_url: str = EUTILS_BASE_URL
    api_key: Optional[str] = None
    requests_per_second: float = MAX_RPS_WITHOUT_KEY
    retmax: int = 500

    @classmethod
    def from_env(cls, **kwargs) -> "FetchSession":
        key = os.environ.get(API_KEY_ENV_VAR) or None
        rps = MAX_RPS_WITH_KEY if key else MAX_RPS_WITHOUT_KEY
        return cls(api_key=key, requests_per_second=rps, **kwargs)

    def validate(self) -> list[str]:
        problems = []
        if self.requests_per_second <= 0:
            problems.append("requests_per_second must be positive")
        limit = MAX_RPS_WITH_KEY if self.api_key else MAX_RPS_WITHOUT_KEY
        if self.requests_per_second > limit:
            problems.append(
                f"requests_per_second {self.requests_per_second} exceeds "
                f"{limit} ({'with' if self.api_key else 'without'} api_key)"
            )
        if self.retmax < 1:
            problems.append("retmax must be positive")
        return problems


def default_transport(url: str, params: dict) -> bytes:
    import requests

    try:
        resp = requests.get(url, params=params, timeout=30)
    except requests.Timeout as exc:
        raise TransientTransportError(f"timeout for {url}") from exc
    except requests.RequestException as exc:
        raise TransientTransportError(f"connection failure for {url}: {exc}") from exc
    if resp.status_code >= 500:
        raise TransientTransportError(f"HTTP {resp.status_code} for {url}")
    if resp.status_code >= 400:
        raise TransportError(f"HTTP {resp.status_code} for {url}")
    return resp.content


class EutilsClient:
    """Rate-limited, retrying client for esearch/efetch."""

    RETRY_ATTEMPTS = 3
    RETRY_BACKOFF_S = 1.0

    def __init__(
        self,
        session: FetchSession,
        transport: Callable[[str, dict], bytes] = default_transport,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        problems = session.validate()
        if problems:
            raise ValueError("; ".join(problems))
        self.session = session
        self._transport = transport
        self._clock = clock
        self._sleep = sleep
        self._last_request_at: Optional[float] = None

    def _throttle(self) -> None:
        gap = 1.0 / self.session.requests_per_second
        if self._last_request_at is not None:
            wait = self._last_request_at + gap - self._clock()
            if wait > 0:
                self._sleep(wait)
        self._last_request_at = self._clock()

    def _request(self, endpoint: str, params: dict) -> bytes:
        url = f"{self.session.base_url}/{endpoint}"
        if self.session.api_key:
            params = dict(params, api_key=self.session.api_key)
        last_error: Optional[Exception] = None
        for attempt in range(self.RETRY_ATTEMPTS):
            self._throttle()
            try:
                return self._transport(url, params)
            except TransientTransportError as exc:
                last_error = exc
                if attempt + 1 < self.RETRY_ATTEMPTS:
                    self._sleep(self.RETRY_BACKOFF_S * 2**attempt)
        raise TransportError(
            f"{endpoint} failed after {self.RETRY_ATTEMPTS} attempts: {last_error}"
        )

    def search_ids(self, query: str, db: str = "pubmed") -> list[str]:
        """All PMIDs matching ``query``, paged with ``retmax``, in the
        service's result order, de-duplicated."""
        if not query:
            raise InvalidQueryError("query must be non-empty")
        ids: list[str] = []
        seen: set[str] = set()
        count: Optional[int] = None
        retstart = 0
        while count is None or retstart < count:
            payload = self._request(
                "esearch.fcgi",
                {
                    "db": db,
                    "term": query,
                    "retstart": str(retstart),
                    "retmax": str(self.session.retmax),
                    "retmode": "xml",
                },
            )
            page_count, page_ids = _parse_esearch(payload)
            if count is None:
                count = page_count
            if count > 0 and not page_ids:
                raise EutilsParseError(
                    f"esearch advertised Count={count} but page at retstart={retstart} was empty"
                )
            for pmid in page_ids:
                if pmid not in seen:
                    seen.add(pmid)
                    ids.append(pmid)
            retstart += self.session.retmax
        return ids

    def fetch_records(self, pmids: list[str]) -> tuple[list[DocumentRecord], list[str]]:
        """Fetch article records in batches of at most 200 ids.

        Returns ``(records, skipped_ids)``; ids absent from the response are
        reported in ``skipped_ids`` rather than silently dropped, so
        ``len(records) + len(skipped_ids) == len(pmids)``.
        """
        if not pmids:
            raise ValueError("pmids must be non-empty")
        records: list[DocumentRecord] = []
        skipped: list[str] = []
        for start in range(0, len(pmids), FETCH_BATCH_SIZE):
            batch = pmids[start : start + FETCH_BATCH_SIZE]
            payload = self._request(
                "efetch.fcgi",
                {"db": "pubmed", "id": ",".join(batch), "retmode": "xml"},
            )
            batch_records = parse_pubmed_xml(payload)
            by_pmid = {rec.pmid: rec for rec in batch_records}
            for pmid in batch:
                if pmid in by_pmid:
                    records.append(by_pmid[pmid])
                else:
                    skipped.append(pmid)
        return records, skipped


def _parse_esearch(payload: bytes) -> tuple[int, list[str]]:
    try:
        root = ET.fromstring(payload)
    except ET.ParseError as exc:
        raise EutilsParseError(f"malformed esearch XML: {exc}") from exc
    count_text = root.findtext("Count")
    if count_text is None or not count_text.isdigit():
        raise EutilsParseError(f"esearch response missing Count (got {count_text!r})")
    ids = [el.text.strip() for el in root.findall("IdList/Id") if el.text]
    return int(count_text), ids


_MEDLINE_YEAR = re.compile(r"\b(1[89]\d\d|20\d\d|2100)\b")


def _element_text(elem) -> str:
    # ArticleTitle/AbstractText may contain inline markup (<i>, <sup>, ...).
    return "".join(elem.itertext()).strip()


def _parse_year(article) -> Optional[int]:
    year = article.findtext(".//Journal//PubDate/Year")
    if year and year.strip().isdigit():
        return int(year.strip())
    medline_date = article.findtext(".//Journal//PubDate/MedlineDate")
    if medline_date:
        match = _MEDLINE_YEAR.search(medline_date)
        if match:
            return int(match.group(0))
    return None


def _parse_authors(article) -> list[str]:
    authors = []
    for author in article.findall(".//AuthorList/Author"):
        collective = author.findtext("CollectiveName")
        if collective and collective.strip():
            authors.append(collective.strip())
            continue
        last = (author.findtext("LastName") or "").strip()
        fore = (author.findtext("ForeName") or author.findtext("Initials") or "").strip()
        name = f"{fore} {last}".strip()
        if name:
            authors.append(name)
    return authors


def _parse_abstract(article) -> Optional[str]:
    sections = article.findall(".//Abstract/AbstractText")
    if not sections:
        return None
    # Labeled sections (Background/Methods/...) are concatenated with single
    # spaces in document order; labels themselves are dropped.
    parts = [_element_text(sec) for sec in sections]
    text = " ".join(part for part in parts if part)
    return text or None


def _parse_doi(article) -> Optional[str]:
    for article_id in article.findall(".//ArticleIdList/ArticleId"):
        if article_id.get("IdType") == "doi" and article_id.text:
            return article_id.text.strip()
    for eloc in article.findall(".//ELocationID"):
        if eloc.get("EIdType") == "doi" and eloc.text:
            return eloc.text.strip()
    return None


def parse_pubmed_xml(payload: bytes) -> list[DocumentRecord]:
    """Parse an efetch ``PubmedArticleSet`` into records.

    Absent elements map to absent fields (``None`` / empty list), never to
    empty-string sentinels.
    """
    try:
        root = ET.fromstring(payload)
    except ET.ParseError as exc:
        raise EutilsParseError(f"malformed efetch XML: {exc}") from exc
    records = []
    for article in root.findall(".//PubmedArticle"):
        pmid = (article.findtext(".//MedlineCitation/PMID") or "").strip()
        if not pmid:
            continue
        title_el = article.find(".//Article/ArticleTitle")
        language = (article.findtext(".//Article/Language") or "").strip().lower() or None
        records.append(
            DocumentRecord(
                pmid=pmid,
                title=_element_text(title_el) if title_el is not None else "",
                authors=_parse_authors(article),
                year=_parse_year(article),
                journal=(article.findtext(".//Journal/Title") or "").strip(),
                abstract=_parse_abstract(article),
                doi=_parse_doi(article),
                language=language,
            )
        )
    return records
