"""Probabilistic topic models: pLSA fit by EM and LDA fit by collapsed Gibbs sampling.

pLSA models P(D, W) = P(D) * sum_z P(z|d) P(w|z) with P(D) fixed to the
empirical document-length distribution and the two conditionals estimated
by expectation-maximization over the nonzero count cells.

LDA integrates out phi and theta and resamples one topic label per token
from p(z = k) proportional to (n_dk + alpha) * (n_kw + beta) / (n_k + V beta).
phi and theta are posterior-mean estimates averaged over post-burn-in
samples.  All randomness comes from one seeded generator and the sweep
visits tokens in fixed document order, so runs are bit-for-bit repeatable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import EmptyCorpus, IndexOutOfRange, InvalidHyperparameter, ShapeMismatch
from .vectorize import DocTermMatrix

_LOG_FLOOR = 1e-300


class DegeneracyWarning(UserWarning):
    """Some probability mass collapsed to zero and was floored."""


@dataclass
class PlsaModel:
    p_z_given_d: np.ndarray  # d x T, rows on the simplex
    p_w_given_z: np.ndarray  # T x V, rows on the simplex
    p_d: np.ndarray          # length d, sums to 1
    loglik_trace: list[float] = field(default_factory=list)


@dataclass
class LdaModel:
    phi: np.ndarray    # T x V topic-word distributions
    theta: np.ndarray  # d x T document-topic distributions
    alpha: float
    beta: float
    T: int
    assignments: np.ndarray  # final topic label per token, document order


def _counts_arrays(counts: DocTermMatrix):
    coo = counts.matrix.tocoo()
    coo.sum_duplicates()
    return coo.row, coo.col, coo.data.astype(np.float64), counts.matrix.shape


def fit_plsa(
    counts: DocTermMatrix,
    T: int,
    seed: int,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> PlsaModel:
    """EM for pLSA on a counts matrix.

    The log-likelihood of the current parameters is recorded at the top of
    every iteration (its E-step computes the needed cell marginals), so the
    trace is non-decreasing by the usual EM argument.
    """
    if T < 1:
        raise InvalidHyperparameter("T must be >= 1")
    if max_iter < 1:
        raise InvalidHyperparameter("max_iter must be >= 1")
    rows, cols, vals, (n_docs, n_terms) = _counts_arrays(counts)
    total = vals.sum()
    if n_docs == 0 or total == 0:
        raise EmptyCorpus("pLSA needs at least one nonzero count")

    lengths = np.asarray(counts.matrix.sum(axis=1)).ravel()
    p_d = lengths / total

    rng = np.random.default_rng(seed)
    p_z_d = rng.random((n_docs, T))
    p_z_d /= p_z_d.sum(axis=1, keepdims=True)
    p_w_z = rng.random((T, n_terms))
    p_w_z /= p_w_z.sum(axis=1, keepdims=True)

    log_p_d = np.log(np.where(p_d > 0, p_d, 1.0))  # zero-length docs never hit a cell
    trace: list[float] = []
    for _ in range(max_iter):
        # E-step over nonzero cells: joint(nz, z) = P(z|d) P(w|z)
        joint = p_z_d[rows] * p_w_z[:, cols].T
        denom = joint.sum(axis=1)
        denom = np.maximum(denom, _LOG_FLOOR)
        loglik = float(np.dot(vals, log_p_d[rows] + np.log(denom)))
        trace.append(loglik)
        if len(trace) > 1 and (loglik - trace[-2]) < tol:
            break
        # expected counts, split back onto the two conditionals
        weighted = (vals / denom)[:, None] * joint
        for k in range(T):
            p_w_z[k] = np.bincount(cols, weights=weighted[:, k], minlength=n_terms)
            p_z_d[:, k] = np.bincount(rows, weights=weighted[:, k], minlength=n_docs)
        topic_mass = p_w_z.sum(axis=1, keepdims=True)
        dead = topic_mass.ravel() <= 0
        if dead.any():
            p_w_z[dead] = 1.0 / n_terms
            topic_mass[dead] = 1.0
        p_w_z /= topic_mass
        doc_mass = p_z_d.sum(axis=1, keepdims=True)
        empty = doc_mass.ravel() <= 0
        if empty.any():
            p_z_d[empty] = 1.0 / T
            doc_mass[empty] = 1.0
        p_z_d /= doc_mass
    return PlsaModel(p_z_given_d=p_z_d, p_w_given_z=p_w_z, p_d=p_d, loglik_trace=trace)


def plsa_log_likelihood(counts: DocTermMatrix, model: PlsaModel) -> float:
    """sum over cells of n(d,w) * ln[ P(d) * sum_z P(z|d) P(w|z) ].

    Cells whose inner sum is zero contribute ln(1e-300); a DegeneracyWarning
    carrying the number of floored cells is issued when that happens.
    """
    rows, cols, vals, (n_docs, n_terms) = _counts_arrays(counts)
    if model.p_z_given_d.shape[0] != n_docs or model.p_w_given_z.shape[1] != n_terms:
        raise ShapeMismatch(
            f"model is {model.p_z_given_d.shape[0]} docs x {model.p_w_given_z.shape[1]} terms, "
            f"counts are {n_docs} x {n_terms}"
        )
    inner = np.einsum("nz,nz->n", model.p_z_given_d[rows], model.p_w_given_z[:, cols].T)
    degenerate = int(np.count_nonzero(inner <= 0))
    if degenerate:
        warnings.warn(DegeneracyWarning(f"{degenerate} cells had zero probability mass"))
    inner = np.maximum(inner, _LOG_FLOOR)
    p_d = np.maximum(model.p_d[rows], _LOG_FLOOR)
    return float(np.dot(vals, np.log(p_d) + np.log(inner)))


def _gibbs_sweep_py(token_doc, token_word, z, n_dk, n_kw, n_k, alpha, beta, uniforms, probs):
    n_topics = n_k.shape[0]
    v_beta = n_kw.shape[1] * beta
    for i in range(token_doc.shape[0]):
        d = token_doc[i]
        w = token_word[i]
        k = z[i]
        n_dk[d, k] -= 1
        n_kw[k, w] -= 1
        n_k[k] -= 1
        total = 0.0
        for j in range(n_topics):
            total += (n_dk[d, j] + alpha) * (n_kw[j, w] + beta) / (n_k[j] + v_beta)
            probs[j] = total
        target = uniforms[i] * total
        k = 0
        while k < n_topics - 1 and probs[k] < target:
            k += 1
        z[i] = k
        n_dk[d, k] += 1
        n_kw[k, w] += 1
        n_k[k] += 1


try:  # pragma: no cover - exercised indirectly
    import numba

    _gibbs_sweep = numba.njit(cache=True)(_gibbs_sweep_py)
except ImportError:  # pragma: no cover
    _gibbs_sweep = _gibbs_sweep_py


def fit_lda_gibbs(
    docs: Sequence[Sequence[int]],
    T: int,
    alpha: float,
    beta: float,
    seed: int,
    iterations: int = 1000,
    burn_in: int = 200,
    sample_lag: int = 10,
    vocab_size: int | None = None,
    sweep_callback: Callable[[int, np.ndarray, np.ndarray, np.ndarray], None] | None = None,
) -> LdaModel:
    """Collapsed Gibbs sampling over vocab-id token sequences.

    After burn_in sweeps the posterior-mean estimates
    (n_kw + beta)/(n_k + V beta) and (n_dk + alpha)/(N_d + T alpha) are
    accumulated every sample_lag sweeps and averaged into phi and theta.
    `sweep_callback(it, n_dk, n_kw, n_k)` runs after every sweep; it exists
    so tests can audit the count tables without reaching into the sampler.
    """
    if T < 1:
        raise InvalidHyperparameter("T must be >= 1")
    if alpha <= 0 or beta <= 0:
        raise InvalidHyperparameter("alpha and beta must be > 0")
    if not iterations > burn_in >= 0:
        raise InvalidHyperparameter("need iterations > burn_in >= 0")
    if sample_lag < 1:
        raise InvalidHyperparameter("sample_lag must be >= 1")

    doc_list = [np.asarray(d, dtype=np.int32) for d in docs]
    n_docs = len(doc_list)
    lengths = np.array([len(d) for d in doc_list], dtype=np.int64)
    total = int(lengths.sum())
    if n_docs == 0 or total == 0:
        raise EmptyCorpus("LDA needs at least one token")
    token_word = np.concatenate(doc_list) if total else np.empty(0, dtype=np.int32)
    token_doc = np.repeat(np.arange(n_docs, dtype=np.int32), lengths)
    n_terms = int(token_word.max()) + 1 if vocab_size is None else int(vocab_size)
    if token_word.min() < 0 or int(token_word.max()) >= n_terms:
        raise IndexOutOfRange("token id outside [0, vocab_size)")

    rng = np.random.default_rng(seed)
    z = rng.integers(0, T, size=total).astype(np.int32)
    n_dk = np.zeros((n_docs, T), dtype=np.int64)
    n_kw = np.zeros((T, n_terms), dtype=np.int64)
    n_k = np.zeros(T, dtype=np.int64)
    np.add.at(n_dk, (token_doc, z), 1)
    np.add.at(n_kw, (z, token_word), 1)
    np.add.at(n_k, z, 1)

    probs = np.empty(T, dtype=np.float64)
    phi_acc = np.zeros((T, n_terms), dtype=np.float64)
    theta_acc = np.zeros((n_docs, T), dtype=np.float64)
    n_samples = 0
    for it in range(iterations):
        uniforms = rng.random(total)
        _gibbs_sweep(token_doc, token_word, z, n_dk, n_kw, n_k, float(alpha), float(beta), uniforms, probs)
        if sweep_callback is not None:
            sweep_callback(it, n_dk, n_kw, n_k)
        if it >= burn_in and (it - burn_in) % sample_lag == 0:
            phi_acc += (n_kw + beta) / (n_k + n_terms * beta)[:, None]
            theta_acc += (n_dk + alpha) / (lengths + T * alpha)[:, None]
            n_samples += 1
    return LdaModel(
        phi=phi_acc / n_samples,
        theta=theta_acc / n_samples,
        alpha=float(alpha),
        beta=float(beta),
        T=T,
        assignments=z,
    )


def doc_topics(model: PlsaModel | LdaModel, doc_index: int) -> np.ndarray:
    """The stored topic distribution of one document (sums to 1)."""
    table = model.theta if isinstance(model, LdaModel) else model.p_z_given_d
    if not 0 <= doc_index < table.shape[0]:
        raise IndexOutOfRange(f"document index {doc_index} outside [0, {table.shape[0]})")
    return table[doc_index].copy()
