"""Shared fixtures and oracle helpers."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linear_sum_assignment

from topicmill.corpus import TokenizedDoc
from topicmill.vectorize import DocTermMatrix


def dtm(dense, kind="counts", ids=None) -> DocTermMatrix:
    """Wrap a dense array as a DocTermMatrix for the numeric modules."""
    dense = np.asarray(dense, dtype=np.float64)
    if ids is None:
        ids = [f"d{i}" for i in range(dense.shape[0])]
    return DocTermMatrix(matrix=sp.csr_matrix(dense), kind=kind, row_ids=list(ids))


def make_planted_lda_corpus(seed, n_topics=3, vocab_size=30, n_docs=200, doc_len=100, alpha=0.1):
    """Generate a corpus from known topic-word distributions.

    Topics are uniform over disjoint vocabulary blocks; document mixtures
    come from a symmetric Dirichlet(alpha).  Returns (docs, true_phi) where
    docs are vocab-id token lists.
    """
    rng = np.random.default_rng(seed)
    block = vocab_size // n_topics
    phi = np.zeros((n_topics, vocab_size))
    for k in range(n_topics):
        phi[k, k * block : (k + 1) * block] = 1.0 / block
    docs = []
    for _ in range(n_docs):
        theta = rng.dirichlet([alpha] * n_topics)
        z = rng.choice(n_topics, size=doc_len, p=theta)
        words = np.array([rng.choice(vocab_size, p=phi[k]) for k in z], dtype=np.int64)
        docs.append(words.tolist())
    return docs, phi


def matched_mean_tv(estimated: np.ndarray, truth: np.ndarray) -> float:
    """Mean total-variation distance after Hungarian topic matching."""
    T = truth.shape[0]
    cost = np.zeros((T, T))
    for i in range(T):
        for j in range(T):
            cost[i, j] = 0.5 * np.abs(estimated[i] - truth[j]).sum()
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].mean())


def silhouette(points: np.ndarray, labels: np.ndarray) -> float:
    """Plain mean silhouette coefficient, computed from first principles."""
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels)
    n = len(points)
    dists = np.sqrt(
        np.maximum(
            np.einsum("ij,ij->i", points, points)[:, None]
            - 2 * points @ points.T
            + np.einsum("ij,ij->i", points, points)[None, :],
            0.0,
        )
    )
    scores = []
    for i in range(n):
        same = labels == labels[i]
        if same.sum() <= 1:
            scores.append(0.0)
            continue
        a = dists[i][same].sum() / (same.sum() - 1)
        b = min(dists[i][labels == other].mean() for other in np.unique(labels) if other != labels[i])
        scores.append((b - a) / max(a, b))
    return float(np.mean(scores))
