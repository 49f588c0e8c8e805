"""Document ingestion, text normalization, and monthly bucketing."""

import csv
import datetime
import json
import re
import unicodedata
from dataclasses import dataclass
from importlib import resources

from .errors import EmptyCorpus, MalformedRecord
from .months import month_key, month_range

# Maximal runs of ASCII letters/digits; runs containing a digit are
# dropped afterwards, so "q3" and "5" never survive.
_TOKEN_RE = re.compile(r"[a-z0-9]+")
_DIGIT_RE = re.compile(r"[0-9]")


@dataclass(frozen=True)
class Document:
    id: str
    date: datetime.date
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    vocabulary: tuple[str, ...]


@dataclass(frozen=True)
class MonthlySlice:
    month: str
    documents: tuple[Document, ...]


def default_stopwords() -> frozenset[str]:
    """English stopword list shipped with the package."""
    text = resources.files("recession_signal.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w for w in text.split() if w)


def load_stopwords(path) -> frozenset[str]:
    """One token per line, UTF-8."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip().lower() for line in fh if line.strip())


def preprocess(raw_text: str, stopwords) -> list[str]:
    """Normalize raw text into cleaned lowercase tokens.

    NFC-normalize, lowercase, split into maximal ASCII alphanumeric
    runs; runs containing any digit are dropped entirely, as are
    stopwords. Order is preserved.
    """
    text = unicodedata.normalize("NFC", raw_text).lower()
    out = []
    for tok in _TOKEN_RE.findall(text):
        if _DIGIT_RE.search(tok):
            continue
        if tok in stopwords:
            continue
        out.append(tok)
    return out


def _build_corpus(records, stopwords) -> Corpus:
    docs = []
    vocab = set()
    for rec_id, date, text in records:
        tokens = tuple(preprocess(text, stopwords))
        vocab.update(tokens)
        docs.append(Document(id=rec_id, date=date, tokens=tokens))
    docs.sort(key=lambda d: (d.date, d.id))
    return Corpus(documents=tuple(docs), vocabulary=tuple(sorted(vocab)))


def _parse_date(value, lineno) -> datetime.date:
    try:
        return datetime.date.fromisoformat(str(value).strip())
    except ValueError:
        raise MalformedRecord(lineno, f"bad date {value!r}") from None


def load_documents(path, format="jsonl", stopwords=None) -> Corpus:
    """Read a JSONL or CSV document file into a preprocessed Corpus.

    JSONL records carry `id` (optional; line number if absent), `date`
    (ISO-8601), `text`. CSV uses a `id,date,text` header. Raises
    MalformedRecord on unparseable rows and EmptyCorpus when no valid
    record remains.
    """
    if stopwords is None:
        stopwords = default_stopwords()
    records = []
    if format == "jsonl":
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError:
                    raise MalformedRecord(lineno, "invalid JSON") from None
                if not isinstance(obj, dict) or "date" not in obj or "text" not in obj:
                    raise MalformedRecord(lineno, "missing date/text field")
                rec_id = str(obj.get("id", lineno))
                records.append((rec_id, _parse_date(obj["date"], lineno), str(obj["text"])))
    elif format == "csv":
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"date", "text"} <= set(reader.fieldnames):
                raise MalformedRecord(1, "CSV header must contain date,text")
            for lineno, row in enumerate(reader, start=2):
                if row.get("date") is None or row.get("text") is None:
                    raise MalformedRecord(lineno, "short row")
                rec_id = row.get("id") or str(lineno)
                records.append((rec_id, _parse_date(row["date"], lineno), row["text"]))
    else:
        raise ValueError(f"unknown format {format!r}")

    if not records:
        raise EmptyCorpus(f"no valid records in {path}")
    return _build_corpus(records, stopwords)


def bucket_monthly(corpus: Corpus, span: tuple[str, str]) -> list[MonthlySlice]:
    """One MonthlySlice per month of the inclusive span, empty months included."""
    months = month_range(span[0], span[1])
    by_month = {m: [] for m in months}
    for doc in corpus.documents:
        key = month_key(doc.date)
        if key in by_month:
            by_month[key].append(doc)
    return [MonthlySlice(month=m, documents=tuple(by_month[m])) for m in months]


def corpus_span(corpus: Corpus) -> tuple[str, str]:
    """Smallest month span covering every document."""
    if not corpus.documents:
        raise EmptyCorpus("corpus has no documents")
    keys = [month_key(d.date) for d in corpus.documents]
    return min(keys), max(keys)
