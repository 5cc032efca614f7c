"""Document clustering (K-means with k-means++ seeding) and exact t-SNE projection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PerplexityOutOfRange, TooManyClusters


@dataclass
class ClusterModel:
    K: int
    centroids: np.ndarray    # K x F
    assignments: np.ndarray  # per-point cluster id in [0, K)
    inertia: float
    iterations_run: int
    inertia_trace: list[float] = field(default_factory=list)


@dataclass
class Projection2D:
    coords: np.ndarray  # n x 2
    kl_trace: list[float]
    perplexity: float


def _sq_dists_to(points: np.ndarray, centroid: np.ndarray) -> np.ndarray:
    diff = points - centroid
    return np.einsum("ij,ij->i", diff, diff)


def kmeans_pp_init(points: np.ndarray, K: int, seed: int) -> np.ndarray:
    """D^2-weighted seeding: each new centroid is drawn with probability
    proportional to its squared distance to the nearest chosen one."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if K > n:
        raise TooManyClusters(f"K={K} exceeds {n} points")
    if K < 1:
        raise TooManyClusters("K must be >= 1")
    rng = np.random.default_rng(seed)
    centroids = np.empty((K, points.shape[1]), dtype=np.float64)
    idx = int(rng.integers(n))
    centroids[0] = points[idx]
    d2 = _sq_dists_to(points, centroids[0])
    for j in range(1, K):
        total = d2.sum()
        if total <= 0:
            idx = int(rng.integers(n))
        else:
            target = rng.random() * total
            idx = min(int(np.searchsorted(np.cumsum(d2), target, side="right")), n - 1)
        centroids[j] = points[idx]
        d2 = np.minimum(d2, _sq_dists_to(points, centroids[j]))
    return centroids


def _random_init(points: np.ndarray, K: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return points[rng.choice(points.shape[0], size=K, replace=False)].astype(np.float64)


def fit_kmeans(
    points: np.ndarray,
    K: int,
    seed: int,
    max_iter: int = 100,
    tol: float = 1e-6,
    init: str = "kmeans++",
) -> ClusterModel:
    """Lloyd iterations from k-means++ (or plain random) seeding.

    Assignment ties go to the lowest cluster id; an emptied cluster is
    re-seeded with the point farthest from its assigned centroid.  Stops on
    unchanged assignments, relative inertia improvement below tol, or
    max_iter.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if K > n:
        raise TooManyClusters(f"K={K} exceeds {n} points")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if init == "kmeans++":
        centroids = kmeans_pp_init(points, K, seed)
    elif init == "random":
        centroids = _random_init(points, K, seed)
    else:
        raise ValueError(f"unknown init: {init!r}")

    prev_assign = None
    trace: list[float] = []
    iterations = 0
    assign = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        iterations += 1
        d2 = (
            np.einsum("ij,ij->i", points, points)[:, None]
            - 2.0 * points @ centroids.T
            + np.einsum("ij,ij->i", centroids, centroids)[None, :]
        )
        assign = np.argmin(d2, axis=1)
        # re-seed emptied clusters with the current farthest point
        for k in range(K):
            if np.any(assign == k):
                continue
            own = np.einsum("ij,ij->i", points - centroids[assign], points - centroids[assign])
            far = int(np.argmax(own))
            centroids[k] = points[far]
            assign[far] = k
        diffs = points - centroids[assign]
        inertia = float(np.einsum("ij,ij->", diffs, diffs))
        trace.append(inertia)
        if prev_assign is not None and np.array_equal(assign, prev_assign):
            break
        if len(trace) > 1 and trace[-2] > 0 and (trace[-2] - inertia) < tol * trace[-2]:
            break
        for k in range(K):
            centroids[k] = points[assign == k].mean(axis=0)
        prev_assign = assign
    return ClusterModel(
        K=K,
        centroids=centroids,
        assignments=assign,
        inertia=trace[-1],
        iterations_run=iterations,
        inertia_trace=trace,
    )


def _pairwise_sq_dists(x: np.ndarray) -> np.ndarray:
    sq = np.einsum("ij,ij->i", x, x)
    d2 = sq[:, None] - 2.0 * x @ x.T + sq[None, :]
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def _conditional_affinities(d2: np.ndarray, perplexity: float, n_steps: int = 50) -> np.ndarray:
    """Per-point Gaussian affinities calibrated to entropy ln(perplexity).

    The precision beta_i is found by bisection; the search always runs the
    full step budget, which makes the result reproducible across uniform
    rescalings of the input distances.
    """
    n = d2.shape[0]
    target = np.log(perplexity)
    p = np.zeros((n, n), dtype=np.float64)
    others = np.arange(n)
    for i in range(n):
        d = d2[i][others != i]
        mean_d = d.mean()
        beta = 1.0 / mean_d if mean_d > 0 else 1.0
        lo, hi = 0.0, np.inf
        row = np.exp(-beta * d)
        for _ in range(n_steps):
            s = row.sum()
            if s <= 0:
                entropy = 0.0
            else:
                entropy = np.log(s) + beta * float(np.dot(d, row)) / s
            if entropy > target:
                lo = beta
                beta = beta * 2.0 if hi == np.inf else (beta + hi) / 2.0
            else:
                hi = beta
                beta = beta / 2.0 if lo == 0.0 else (beta + lo) / 2.0
            row = np.exp(-beta * d)
        s = row.sum()
        if s <= 0:
            row = np.ones_like(row) / row.shape[0]
        else:
            row = row / s
        p[i][others != i] = row
    return p


def tsne_affinities(points: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized t-SNE input affinities: nonnegative, zero diagonal, sum 1."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if n < 4 or not 1.0 < perplexity < (n - 1) / 3.0:
        raise PerplexityOutOfRange(
            f"need n >= 4 and 1 < perplexity < (n-1)/3; got n={n}, perplexity={perplexity}"
        )
    cond = _conditional_affinities(_pairwise_sq_dists(points), perplexity)
    return (cond + cond.T) / (2.0 * n)


def _kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def project_tsne(
    points: np.ndarray,
    perplexity: float,
    seed: int,
    iterations: int = 1000,
) -> Projection2D:
    """Exact (all-pairs) t-SNE to 2-D.

    Gradient descent with learning rate 200, momentum 0.5 for the first 250
    steps then 0.8, early exaggeration 12 for the first 250 steps, initial
    coordinates seeded Gaussian with sigma 1e-4.  The KL divergence of the
    un-exaggerated affinities is recorded every 50 steps and at the final
    step.
    """
    p = tsne_affinities(points, perplexity)
    n = p.shape[0]
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    rng = np.random.default_rng(seed)
    y = rng.standard_normal((n, 2)) * 1e-4
    update = np.zeros_like(y)

    def q_kernel(coords):
        num = 1.0 / (1.0 + _pairwise_sq_dists(coords))
        np.fill_diagonal(num, 0.0)
        return num, num / num.sum()

    num, q = q_kernel(y)
    kl_trace: list[float] = []
    for step in range(1, iterations + 1):
        exaggeration = 12.0 if step <= 250 else 1.0
        momentum = 0.5 if step <= 250 else 0.8
        pq = (exaggeration * p - q) * num
        grad = 4.0 * (np.diag(pq.sum(axis=1)) - pq) @ y
        update = momentum * update - 200.0 * grad
        y = y + update
        num, q = q_kernel(y)
        if step % 50 == 0 or step == iterations:
            kl_trace.append(_kl_divergence(p, q))
    return Projection2D(coords=y, kl_trace=kl_trace, perplexity=perplexity)
