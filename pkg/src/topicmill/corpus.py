"""Corpus ingestion and deterministic text preprocessing.

Narratives arrive as JSON-lines records and leave as ordered token lists.
The pipeline is fixed: URL removal, HTML tag removal, lowercasing,
alphanumeric splitting, length/digit filtering, stopword removal and an
optional rule-based lemmatization pass.  Everything is pure and
deterministic so repeated runs produce identical corpora.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import DuplicateId, MalformedRecord, MissingField

_URL_RE = re.compile(r"[a-z][a-z0-9+.-]*://\S+|www\.\S+", re.IGNORECASE)
_TAG_RE = re.compile(r"<[^>]*>")
_SPLIT_RE = re.compile(r"[^a-z0-9]+")

_VOWELS = "aeiou"

# Stopword files bundled under topicmill/data, keyed by list id.
_STOPWORD_FILES = {"english": "stopwords_en.txt"}
_LEMMA_EXCEPTIONS_FILE = "lemma_exceptions.tsv"

_stopword_cache: dict[str, frozenset[str]] = {}
_lemma_exceptions: dict[str, str] | None = None


@dataclass
class Document:
    """One raw narrative record."""

    id: str
    text: str
    date: str | None = None


@dataclass
class TokenizedDoc:
    """A preprocessed narrative: ordered lowercase tokens."""

    id: str
    tokens: list[str] = field(default_factory=list)


@dataclass
class PreprocessConfig:
    stopword_list_id: str = "english"
    min_token_len: int = 2
    strip_urls: bool = True
    strip_html: bool = True
    lemmatize: bool = True

    def __post_init__(self):
        if self.min_token_len < 1:
            raise ValueError("min_token_len must be >= 1")


def _data_path(name: str) -> Path:
    return Path(str(resources.files("topicmill").joinpath("data", name)))


def bundled_corpus_path() -> Path:
    """Path of the bundled 200-document synthetic demo corpus."""
    return _data_path("mini_corpus.jsonl")


def load_stopwords(list_id: str = "english") -> frozenset[str]:
    """Return the bundled stopword list for `list_id` (cached)."""
    if list_id not in _stopword_cache:
        try:
            fname = _STOPWORD_FILES[list_id]
        except KeyError:
            raise ValueError(f"unknown stopword list: {list_id!r}") from None
        text = _data_path(fname).read_text(encoding="utf-8")
        _stopword_cache[list_id] = frozenset(w for w in text.split() if w)
    return _stopword_cache[list_id]


def load_lemma_exceptions() -> dict[str, str]:
    """Return the bundled irregular-form table (form -> lemma, cached)."""
    global _lemma_exceptions
    if _lemma_exceptions is None:
        table = {}
        for line in _data_path(_LEMMA_EXCEPTIONS_FILE).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line:
                continue
            form, lemma = line.split("\t")
            table[form] = lemma
        _lemma_exceptions = table
    return _lemma_exceptions


def ingest_jsonl(
    path: str | Path,
    id_field: str = "id",
    text_field: str = "narrative",
    date_field: str = "date",
) -> list[Document]:
    """Read one Document per non-blank JSON line, preserving file order.

    Raises MalformedRecord for unparseable lines, MissingField when the id
    or text field is absent or empty, and DuplicateId on a repeated id.
    """
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(line_no, str(exc)) from None
            if not isinstance(record, dict):
                raise MalformedRecord(line_no, "record is not an object")
            doc_id = record.get(id_field)
            if doc_id is None or str(doc_id) == "":
                raise MissingField(line_no, id_field)
            doc_id = str(doc_id)
            text = record.get(text_field)
            if text is None:
                raise MissingField(line_no, text_field)
            if doc_id in seen:
                raise DuplicateId(doc_id)
            seen.add(doc_id)
            date = record.get(date_field)
            docs.append(Document(id=doc_id, text=str(text), date=None if date is None else str(date)))
    return docs


def _restore_stem(stem: str) -> str:
    """Undo inflection artifacts after stripping -ing/-ed.

    Doubled final consonants are collapsed (stopp -> stop) except for the
    ll/ss/zz families, and a trailing 'e' is restored for
    consonant-vowel-consonant stems (mak -> make).
    """
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS and stem[-1] not in "lsz":
        return stem[:-1]
    if (
        len(stem) >= 3
        and stem[-1] not in _VOWELS
        and stem[-1] not in "wxy"
        and stem[-2] in _VOWELS
        and stem[-3] not in _VOWELS
    ):
        return stem + "e"
    return stem


def lemmatize(token: str) -> str:
    """Map a lowercase token to its base form.

    The bundled exception table wins; otherwise suffix rules are tried in
    a fixed order and the first rule whose result keeps length >= 3
    applies.  Pure function: the same token always yields the same lemma.
    """
    table = load_lemma_exceptions()
    if token in table:
        return table[token]
    if token.endswith("ies"):
        cand = token[:-3] + "y"
        if len(cand) >= 3:
            return cand
    if token.endswith("sses"):
        cand = token[:-2]
        if len(cand) >= 3:
            return cand
    if token.endswith("s") and not token.endswith("ss") and not token.endswith("us"):
        cand = token[:-1]
        if len(cand) >= 3:
            return cand
    if token.endswith("ing"):
        cand = _restore_stem(token[:-3])
        if len(cand) >= 3:
            return cand
    if token.endswith("ed"):
        cand = _restore_stem(token[:-2])
        if len(cand) >= 3:
            return cand
    return token


def _lemmatize_fixed_point(token: str) -> str:
    # Iterate so stacked suffixes ("housings") settle; bounded because each
    # rule shortens the token and the exception table has no cycles.
    for _ in range(10):
        new = lemmatize(token)
        if new == token:
            return token
        token = new
    return token


def preprocess(text: str, cfg: PreprocessConfig | None = None) -> list[str]:
    """Run the full preprocessing pipeline on one narrative.

    Steps, in order: URL removal, HTML tag removal, lowercasing, splitting
    on non-alphanumerics, dropping short and all-digit tokens, stopword
    removal, then lemmatization.  Lemmas are re-checked against the length,
    digit and stopword filters so the output is a fixed point of the
    pipeline (preprocessing its own output changes nothing).
    """
    if cfg is None:
        cfg = PreprocessConfig()
    if cfg.strip_urls:
        text = _URL_RE.sub(" ", text)
    if cfg.strip_html:
        text = _TAG_RE.sub(" ", text)
    text = text.lower()
    stopwords = load_stopwords(cfg.stopword_list_id)

    out: list[str] = []
    for token in _SPLIT_RE.split(text):
        if not token or len(token) < cfg.min_token_len or token.isdigit():
            continue
        if token in stopwords:
            continue
        if cfg.lemmatize:
            token = _lemmatize_fixed_point(token)
            if len(token) < cfg.min_token_len or token.isdigit() or token in stopwords:
                continue
        out.append(token)
    return out


def tokenize_corpus(docs: Iterable[Document], cfg: PreprocessConfig | None = None) -> list[TokenizedDoc]:
    """Preprocess every document; per-document work is independent."""
    if cfg is None:
        cfg = PreprocessConfig()
    return [TokenizedDoc(id=d.id, tokens=preprocess(d.text, cfg)) for d in docs]
