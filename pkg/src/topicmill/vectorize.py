"""Vocabulary construction and sparse document-term matrices."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .corpus import TokenizedDoc
from .errors import EmptyVocabulary

COUNTS = "counts"
TFIDF = "tfidf"


@dataclass
class Vocabulary:
    terms: list[str]
    index: dict[str, int]
    doc_freq: np.ndarray  # per-term document frequency, aligned with terms

    def __len__(self) -> int:
        return len(self.terms)

    @classmethod
    def from_terms(cls, terms: Sequence[str], doc_freq: Sequence[int]) -> "Vocabulary":
        terms = list(terms)
        return cls(terms=terms, index={t: i for i, t in enumerate(terms)}, doc_freq=np.asarray(doc_freq, dtype=np.int64))


@dataclass
class DocTermMatrix:
    """Sparse nonnegative documents x terms matrix (counts or tf-idf)."""

    matrix: sp.csr_matrix
    kind: str
    row_ids: list[str]

    @property
    def n_docs(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_terms(self) -> int:
        return self.matrix.shape[1]


def build_vocabulary(
    docs: Iterable[TokenizedDoc],
    min_df: int = 1,
    max_df_ratio: float = 1.0,
    max_size: int | None = None,
) -> Vocabulary:
    """Collect terms with min_df <= doc_freq <= max_df_ratio * n_docs.

    When more than `max_size` terms survive, the highest-doc_freq terms win
    (ties lexicographic).  The final ordering is lexicographic.
    """
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    if not 0 < max_df_ratio <= 1:
        raise ValueError("max_df_ratio must be in (0, 1]")
    docs = list(docs)
    df: dict[str, int] = {}
    for doc in docs:
        for term in set(doc.tokens):
            df[term] = df.get(term, 0) + 1
    ceiling = max_df_ratio * len(docs)
    kept = [t for t, f in df.items() if min_df <= f <= ceiling]
    if max_size is not None and max_size > 0 and len(kept) > max_size:
        kept.sort(key=lambda t: (-df[t], t))
        kept = kept[:max_size]
    kept.sort()
    if not kept:
        raise EmptyVocabulary("no term survived the document-frequency filters")
    return Vocabulary.from_terms(kept, [df[t] for t in kept])


def count_matrix(docs: Iterable[TokenizedDoc], vocab: Vocabulary) -> DocTermMatrix:
    """Raw term counts; out-of-vocabulary tokens are ignored, empty rows kept."""
    if len(vocab) == 0:
        raise EmptyVocabulary("vocabulary is empty")
    docs = list(docs)
    rows: list[int] = []
    cols: list[int] = []
    vals: list[int] = []
    index = vocab.index
    for i, doc in enumerate(docs):
        seen: dict[int, int] = {}
        for token in doc.tokens:
            j = index.get(token)
            if j is not None:
                seen[j] = seen.get(j, 0) + 1
        for j, c in sorted(seen.items()):
            rows.append(i)
            cols.append(j)
            vals.append(c)
    m = sp.csr_matrix(
        (np.asarray(vals, dtype=np.float64), (rows, cols)),
        shape=(len(docs), len(vocab)),
    )
    return DocTermMatrix(matrix=m, kind=COUNTS, row_ids=[d.id for d in docs])


def tfidf(counts: DocTermMatrix) -> DocTermMatrix:
    """Smoothed tf-idf with L2 row normalization.

    idf(j) = ln((1 + n_docs) / (1 + doc_freq_j)) + 1, doc_freq taken from the
    counts matrix itself; nonzero rows end up with unit L2 norm.
    """
    if counts.kind != COUNTS:
        raise ValueError(f"tfidf expects a counts matrix, got kind={counts.kind!r}")
    m = counts.matrix.tocsr().copy()
    n_docs = m.shape[0]
    df = np.diff(m.tocsc().indptr)  # nonzero entries per column
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    m.data = m.data * idf[m.indices]
    norms = np.sqrt(np.asarray(m.multiply(m).sum(axis=1)).ravel())
    scale = np.zeros_like(norms)
    nz = norms > 0
    scale[nz] = 1.0 / norms[nz]
    m = sp.csr_matrix(sp.diags(scale) @ m)
    return DocTermMatrix(matrix=m, kind=TFIDF, row_ids=list(counts.row_ids))


def write_sparse(m: DocTermMatrix, path: str | Path) -> None:
    """Text export: header "n_docs n_terms nnz kind", then "row col value"."""
    csr = m.matrix.tocsr()
    csr.sum_duplicates()
    lines = [f"{m.n_docs} {m.n_terms} {csr.nnz} {m.kind}"]
    coo = csr.tocoo()
    for r, c, v in zip(coo.row, coo.col, coo.data):
        if m.kind == COUNTS:
            lines.append(f"{r} {c} {int(v)}")
        else:
            lines.append(f"{r} {c} {float(v)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_sparse(path: str | Path, row_ids: list[str] | None = None) -> DocTermMatrix:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    n_docs, n_terms, nnz, kind = text[0].split()
    n_docs, n_terms, nnz = int(n_docs), int(n_terms), int(nnz)
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.float64)
    for i, line in enumerate(text[1 : nnz + 1]):
        r, c, v = line.split()
        rows[i], cols[i], vals[i] = int(r), int(c), float(v)
    m = sp.csr_matrix((vals, (rows, cols)), shape=(n_docs, n_terms))
    if row_ids is None:
        row_ids = [str(i) for i in range(n_docs)]
    return DocTermMatrix(matrix=m, kind=kind, row_ids=row_ids)
