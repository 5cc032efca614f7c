"""Topic inspection and C_v coherence scoring.

C_v uses a boolean sliding window over the corpus, NPMI word vectors under
one-set segmentation, and cosine similarity: each top word is compared
against the whole top-word set through their NPMI profiles.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .corpus import TokenizedDoc
from .errors import IndexOutOfRange, InsufficientWords, UnknownTerm
from .vectorize import Vocabulary

_NPMI_EPS = 1e-12
_COS_EPS = 1e-12

DEFAULT_WINDOW = 110
DEFAULT_TOP_N = 10


@dataclass
class TopicSummary:
    topic_id: int
    top_words: list[tuple[str, float]]  # (term, weight), ranked
    model_kind: str


@dataclass
class CoherenceReport:
    per_topic: list[tuple[int, float]]
    mean_cv: float
    window_size: int
    top_n: int


@dataclass
class CooccurrenceIndex:
    window_size: int
    n_windows: int
    occur: dict[str, int]
    cooccur: dict[tuple[str, str], int]  # key is the sorted pair


def top_words(
    topic_term: np.ndarray,
    vocab: Vocabulary,
    topic_id: int,
    n: int,
    model_kind: str = "lda",
) -> TopicSummary:
    """The n heaviest terms of one topic row, ties broken lexicographically.

    For LSA the ranking uses absolute weight but the reported weight keeps
    its sign.
    """
    topic_term = np.asarray(topic_term)
    if not 0 <= topic_id < topic_term.shape[0]:
        raise IndexOutOfRange(f"topic {topic_id} outside [0, {topic_term.shape[0]})")
    if n < 1:
        raise ValueError("n must be >= 1")
    row = topic_term[topic_id]
    signed = model_kind == "lsa"
    key = np.abs(row) if signed else row
    order = sorted(range(len(row)), key=lambda j: (-key[j], vocab.terms[j]))
    chosen = order[: min(n, len(row))]
    return TopicSummary(
        topic_id=topic_id,
        top_words=[(vocab.terms[j], float(row[j])) for j in chosen],
        model_kind=model_kind,
    )


def build_cooccurrence(
    docs: Iterable[TokenizedDoc],
    window_size: int,
    terms: Iterable[str] | None = None,
) -> CooccurrenceIndex:
    """Boolean sliding-window counts.

    A document of length L contributes max(1, L - window_size + 1) windows;
    occur counts windows containing a term, cooccur counts windows
    containing both members of a pair.  `terms` restricts counting to the
    given subset (window totals are unaffected).
    """
    if window_size < 1:
        raise ValueError("window_size must be >= 1")
    docs = list(docs)
    if terms is None:
        term_ids: dict[str, int] = {}
        for doc in docs:
            for tok in doc.tokens:
                if tok not in term_ids:
                    term_ids[tok] = len(term_ids)
    else:
        term_ids = {t: i for i, t in enumerate(dict.fromkeys(terms))}
    id_terms = list(term_ids)

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    offset = 0
    for doc in docs:
        length = len(doc.tokens)
        n_win = max(1, length - window_size + 1)
        ids = np.array([term_ids.get(t, -1) for t in doc.tokens], dtype=np.int64)
        pos = np.nonzero(ids >= 0)[0]
        if pos.size:
            # token at position p falls in windows [p - window + 1, p], clipped
            starts = np.maximum(0, pos - window_size + 1)
            ends = np.minimum(pos, n_win - 1)
            spans = ends - starts + 1
            win = np.repeat(starts, spans) + (
                np.arange(spans.sum()) - np.repeat(np.cumsum(spans) - spans, spans)
            )
            rows.append(win + offset)
            cols.append(np.repeat(ids[pos], spans))
        offset += n_win

    n_windows = offset
    n_terms = len(term_ids)
    if rows and n_terms:
        incidence = sp.csr_matrix(
            (np.ones(sum(len(r) for r in rows), dtype=np.int64), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n_windows, n_terms),
        )
        incidence.data = np.minimum(incidence.data, 1)
        pair_counts = (incidence.T @ incidence).tocoo()
        occur = {}
        cooccur = {}
        for a, b, v in zip(pair_counts.row, pair_counts.col, pair_counts.data):
            if a == b:
                occur[id_terms[a]] = int(v)
            elif a < b:
                ta, tb = id_terms[a], id_terms[b]
                cooccur[(ta, tb) if ta < tb else (tb, ta)] = int(v)
    else:
        occur, cooccur = {}, {}
    return CooccurrenceIndex(window_size=window_size, n_windows=n_windows, occur=occur, cooccur=cooccur)


def npmi(index: CooccurrenceIndex, a: str, b: str) -> float:
    """Normalized pointwise mutual information of a term pair, in [-1, 1]."""
    occ_a = index.occur.get(a, 0)
    occ_b = index.occur.get(b, 0)
    if occ_a <= 0:
        raise UnknownTerm(a)
    if occ_b <= 0:
        raise UnknownTerm(b)
    if a == b:
        joint = occ_a
    else:
        joint = index.cooccur.get((a, b) if a < b else (b, a), 0)
    p_a = occ_a / index.n_windows
    p_b = occ_b / index.n_windows
    p_ab = joint / index.n_windows
    value = float(np.log((p_ab + _NPMI_EPS) / (p_a * p_b)) / -np.log(p_ab + _NPMI_EPS))
    # the epsilon terms can push the ratio past the ideal bounds by ~1e-12
    return min(1.0, max(-1.0, value))


def _cosine(u: np.ndarray, v: np.ndarray) -> float:
    denom = max(float(np.linalg.norm(u) * np.linalg.norm(v)), _COS_EPS)
    return float(np.dot(u, v) / denom)


def coherence_cv(
    summaries: Sequence[TopicSummary],
    docs: Iterable[TokenizedDoc],
    window_size: int = DEFAULT_WINDOW,
    top_n: int | None = None,
) -> CoherenceReport:
    """C_v per topic under one-set segmentation.

    Every top word is represented by its vector of NPMI values against the
    whole top-word set; the set itself is the elementwise sum of those
    vectors; the topic score is the mean cosine between word vectors and
    the set vector.  Top words absent from the corpus are dropped with a
    warning; a topic keeping fewer than two words is an error.
    """
    docs = list(docs)
    wanted: list[str] = []
    for s in summaries:
        wanted.extend(term for term, _ in s.top_words)
    index = build_cooccurrence(docs, window_size, terms=wanted)

    per_topic: list[tuple[int, float]] = []
    for s in summaries:
        words = [term for term, _ in s.top_words]
        present = [w for w in words if index.occur.get(w, 0) > 0]
        missing = [w for w in words if w not in present]
        if missing:
            warnings.warn(f"topic {s.topic_id}: dropping out-of-corpus words {missing}")
        if len(present) < 2:
            raise InsufficientWords(f"topic {s.topic_id} keeps {len(present)} in-corpus words")
        size = len(present)
        grid = np.empty((size, size), dtype=np.float64)
        for i, a in enumerate(present):
            for j, b in enumerate(present):
                grid[i, j] = npmi(index, a, b)
        set_vector = grid.sum(axis=0)
        sims = [_cosine(grid[i], set_vector) for i in range(size)]
        per_topic.append((s.topic_id, float(np.mean(sims))))
    mean_cv = float(np.mean([score for _, score in per_topic]))
    return CoherenceReport(
        per_topic=per_topic,
        mean_cv=mean_cv,
        window_size=window_size,
        top_n=top_n if top_n is not None else max((len(s.top_words) for s in summaries), default=0),
    )


def format_coherence_table(rows: Sequence[tuple[str, float]]) -> str:
    """Two-column comparison table: technique and mean C_v, as given."""
    width = max([len("Technique")] + [len(name) for name, _ in rows])
    lines = [f"{'Technique':<{width}} | Coherence Value"]
    lines.append("-" * len(lines[0]))
    for name, value in rows:
        lines.append(f"{name:<{width}} | {value:.4f}")
    return "\n".join(lines)
