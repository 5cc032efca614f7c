"""Matrix-factorization topic models: truncated-SVD LSA and multiplicative-update NMF.

LSA uses a seeded randomized range finder (oversampling 10, two power
iterations) followed by an exact SVD of the projected matrix.  NMF runs
Lee-Seung multiplicative updates for the Frobenius objective
0.5 * ||V - W H||_F^2 on the terms x documents orientation of the input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateMatrix, NegativeInput, RankTooLarge, ShapeMismatch
from .vectorize import DocTermMatrix

_EPS = 1e-12

_OVERSAMPLING = 10
_POWER_ITERATIONS = 2


@dataclass
class LsaModel:
    doc_factors: np.ndarray      # d x t, documents in latent space (U_t * S_t)
    singular_values: np.ndarray  # t, non-increasing
    term_factors: np.ndarray     # t x V, orthonormal rows
    t: int


@dataclass
class NmfModel:
    W: np.ndarray  # n_terms x t, nonnegative term loadings per topic
    H: np.ndarray  # t x n_docs, nonnegative topic weights per document
    t: int
    objective_trace: list[float] = field(default_factory=list)

    @property
    def topic_term(self) -> np.ndarray:
        """Topics over the vocabulary, t x V."""
        return self.W.T


def _as_docs_by_terms(m) -> sp.csr_matrix:
    if isinstance(m, DocTermMatrix):
        return m.matrix.tocsr()
    if sp.issparse(m):
        return m.tocsr()
    return sp.csr_matrix(np.asarray(m, dtype=np.float64))


def fit_lsa(m: DocTermMatrix, t: int, seed: int) -> LsaModel:
    """Rank-t truncated SVD via seeded randomized range finding."""
    a = _as_docs_by_terms(m)
    n_docs, n_terms = a.shape
    if not 1 <= t <= min(n_docs, n_terms):
        raise RankTooLarge(f"t={t} outside [1, {min(n_docs, n_terms)}] for a {n_docs}x{n_terms} matrix")
    if a.nnz == 0 or np.all(a.data == 0):
        raise DegenerateMatrix("cannot decompose an all-zero matrix")

    rng = np.random.default_rng(seed)
    sketch = rng.standard_normal((n_terms, t + _OVERSAMPLING))
    q, _ = np.linalg.qr(a @ sketch)
    for _ in range(_POWER_ITERATIONS):
        z, _ = np.linalg.qr(a.T @ q)
        q, _ = np.linalg.qr(a @ z)
    b = (a.T @ q).T  # (t + oversampling) x n_terms projection of the input
    u_b, s, vt = np.linalg.svd(b, full_matrices=False)
    u = q @ u_b
    return LsaModel(
        doc_factors=u[:, :t] * s[:t],
        singular_values=s[:t].copy(),
        term_factors=vt[:t].copy(),
        t=t,
    )


def lsa_reconstruction(model: LsaModel) -> np.ndarray:
    return model.doc_factors @ model.term_factors


def _nmf_orient(m) -> sp.csr_matrix:
    """Terms x documents view of the input (the factorization orientation)."""
    return _as_docs_by_terms(m).T.tocsr()


def nmf_objective(m, W: np.ndarray, H: np.ndarray) -> float:
    """0.5 * ||V - W H||_F^2 with V the terms x documents view of `m`.

    Evaluated sparsely: the cross term iterates nonzeros of V only and the
    ||W H||^2 term reduces to trace((W'W)(HH')).
    """
    v = _nmf_orient(m)
    W = np.asarray(W, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    if W.ndim != 2 or H.ndim != 2 or W.shape[1] != H.shape[0] or v.shape != (W.shape[0], H.shape[1]):
        raise ShapeMismatch(
            f"V is {v.shape[0]}x{v.shape[1]} but W is {W.shape} and H is {H.shape}"
        )
    coo = v.tocoo()
    norm_v = float(np.dot(coo.data, coo.data))
    cross = float(np.einsum("nt,tn->n", W[coo.row], H[:, coo.col]).dot(coo.data))
    gram = float(np.trace((W.T @ W) @ (H @ H.T)))
    # cancellation can leave a tiny negative residue when the fit is exact
    return max(0.0, 0.5 * (norm_v - 2.0 * cross + gram))


def fit_nmf(
    m: DocTermMatrix,
    t: int,
    seed: int,
    max_iter: int = 200,
    tol: float = 1e-6,
    on_iteration: Callable[[int, np.ndarray, np.ndarray], None] | None = None,
) -> NmfModel:
    """Lee-Seung multiplicative updates with seeded nonnegative init.

    W and H start as |N(0,1)| scaled by sqrt(mean(V)/t); every update keeps
    both factors nonnegative and the Frobenius objective non-increasing.
    Stops at max_iter or when the relative objective decrease falls below
    tol over one iteration.  `on_iteration(i, W, H)` runs after each update
    pair so callers can audit the factors mid-fit.
    """
    v = _nmf_orient(m)
    if v.nnz and v.data.min() < 0:
        raise NegativeInput("NMF input must be nonnegative")
    n_terms, n_docs = v.shape
    if not 1 <= t <= min(n_terms, n_docs):
        raise RankTooLarge(f"t={t} outside [1, {min(n_terms, n_docs)}] for a {n_terms}x{n_docs} matrix")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    rng = np.random.default_rng(seed)
    scale = np.sqrt(v.sum() / (n_terms * n_docs) / t)
    W = np.abs(rng.standard_normal((n_terms, t))) * scale
    H = np.abs(rng.standard_normal((t, n_docs))) * scale

    trace = [nmf_objective(m, W, H)]
    for i in range(max_iter):
        # H update: H <- H * (W'V) / (W'W H)
        H = H * np.asarray((v.T @ W).T) / ((W.T @ W) @ H + _EPS)
        # W update: W <- W * (V H') / (W H H')
        W = W * np.asarray(v @ H.T) / (W @ (H @ H.T) + _EPS)
        if on_iteration is not None:
            on_iteration(i, W, H)
        obj = nmf_objective(m, W, H)
        trace.append(obj)
        prev = trace[-2]
        if prev > 0 and (prev - obj) < tol * prev:
            break
    return NmfModel(W=W, H=H, t=t, objective_trace=trace)
