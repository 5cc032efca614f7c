import numpy as np
import pytest

from conftest import dtm
from topicmill.decompose import fit_lsa, fit_nmf, lsa_reconstruction, nmf_objective
from topicmill.errors import DegenerateMatrix, NegativeInput, RankTooLarge, ShapeMismatch


def jacobi_singular_values(a, sweeps=60, tol=1e-14):
    """One-sided Jacobi SVD oracle: rotate column pairs until orthogonal.

    Independent of the LAPACK path used by the implementation; singular
    values are the column norms of the final rotated matrix.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[1]
    for _ in range(sweeps):
        largest = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                app = a[:, p] @ a[:, p]
                aqq = a[:, q] @ a[:, q]
                apq = a[:, p] @ a[:, q]
                if abs(apq) <= tol * np.sqrt(app * aqq):
                    continue
                largest = max(largest, abs(apq))
                tau = (aqq - app) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                col_p = a[:, p].copy()
                a[:, p] = c * col_p - s * a[:, q]
                a[:, q] = s * col_p + c * a[:, q]
        if largest == 0.0:
            break
    return np.sort(np.linalg.norm(a, axis=0))[::-1]


def planted_matrix(rng, n=60, m=40, rank=5, noise=1e-3):
    u = rng.standard_normal((n, rank))
    v = rng.standard_normal((rank, m))
    scales = np.linspace(5.0, 1.0, rank)
    return u @ np.diag(scales) @ v + noise * rng.standard_normal((n, m))


class TestLsa:
    def test_diagonal_exact(self):
        model = fit_lsa(dtm(np.diag([3.0, 2.0, 1.0])), t=3, seed=0)
        assert np.allclose(model.singular_values, [3.0, 2.0, 1.0], atol=1e-9)

    def test_full_rank_reconstruction(self):
        rng = np.random.default_rng(1)
        a = rng.random((8, 5))
        model = fit_lsa(dtm(a), t=5, seed=0)
        err = np.linalg.norm(a - lsa_reconstruction(model)) / np.linalg.norm(a)
        assert err <= 1e-6

    def test_planted_rank5_vs_jacobi_oracle(self):
        rng = np.random.default_rng(42)
        a = np.abs(planted_matrix(rng))
        model = fit_lsa(dtm(a), t=5, seed=3)
        oracle = jacobi_singular_values(a)[:5]
        rel = np.abs(model.singular_values - oracle) / oracle
        assert np.all(rel <= 1e-3)

    def test_singular_values_non_increasing(self):
        rng = np.random.default_rng(2)
        model = fit_lsa(dtm(rng.random((20, 12))), t=8, seed=0)
        assert np.all(np.diff(model.singular_values) <= 1e-12)
        assert np.all(model.singular_values >= 0)

    def test_term_factor_rows_orthonormal(self):
        rng = np.random.default_rng(3)
        model = fit_lsa(dtm(rng.random((30, 18))), t=6, seed=0)
        gram = model.term_factors @ model.term_factors.T
        assert np.allclose(gram, np.eye(6), atol=1e-6)

    def test_reconstruction_improves_with_rank(self):
        rng = np.random.default_rng(4)
        a = rng.random((25, 18))
        errs = []
        for t in (2, 4, 8, 12):
            model = fit_lsa(dtm(a), t=t, seed=9)
            errs.append(np.linalg.norm(a - lsa_reconstruction(model)))
        assert all(e2 <= e1 + 1e-9 for e1, e2 in zip(errs, errs[1:]))

    def test_scaling_scales_singular_values(self):
        rng = np.random.default_rng(5)
        a = rng.random((15, 10))
        base = fit_lsa(dtm(a), t=4, seed=7).singular_values
        scaled = fit_lsa(dtm(3.5 * a), t=4, seed=7).singular_values
        assert np.all(np.abs(scaled - 3.5 * base) <= 1e-9 * np.abs(scaled))

    def test_rank_too_large(self):
        with pytest.raises(RankTooLarge):
            fit_lsa(dtm(np.ones((3, 4))), t=4, seed=0)
        with pytest.raises(RankTooLarge):
            fit_lsa(dtm(np.ones((3, 4))), t=0, seed=0)

    def test_degenerate_matrix(self):
        with pytest.raises(DegenerateMatrix):
            fit_lsa(dtm(np.zeros((3, 3))), t=1, seed=0)

    def test_seed_determinism(self):
        rng = np.random.default_rng(6)
        a = rng.random((12, 9))
        m1 = fit_lsa(dtm(a), t=3, seed=5)
        m2 = fit_lsa(dtm(a), t=3, seed=5)
        assert np.array_equal(m1.doc_factors, m2.doc_factors)
        assert np.array_equal(m1.term_factors, m2.term_factors)


class TestNmfObjective:
    def test_exact_factorization_is_zero(self):
        m = np.array([[6.0]])
        assert nmf_objective(m, np.array([[2.0]]), np.array([[3.0]])) == 0.0

    def test_all_zero_factors(self):
        assert nmf_objective(np.array([[1.0]]), np.array([[0.0]]), np.array([[0.0]])) == 0.5

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(8)
        a = rng.random((7, 5))
        w = rng.random((5, 3))
        h = rng.random((3, 7))
        dense = 0.5 * np.linalg.norm(a.T - w @ h) ** 2
        assert abs(nmf_objective(dtm(a), w, h) - dense) <= 1e-10

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            nmf_objective(np.ones((2, 3)), np.ones((3, 2)), np.ones((2, 3)))

    def test_quadratic_scaling_at_fixed_factors(self):
        rng = np.random.default_rng(9)
        a = rng.random((6, 4))
        w = rng.random((4, 2))
        h = rng.random((2, 6))
        base = nmf_objective(a, w, h)
        scaled = nmf_objective(2.0 * a, 2.0 * w, h)
        assert abs(scaled - 4.0 * base) <= 1e-9 * max(1.0, scaled)


class TestFitNmf:
    def test_rank_one_exact_recovery(self):
        v = np.outer([1.0, 2.0], [3.0, 0.0, 1.0])
        model = fit_nmf(dtm(v, kind="tfidf"), t=1, seed=0, max_iter=500, tol=0.0)
        assert model.objective_trace[-1] <= 1e-8
        assert np.allclose((model.W @ model.H).T, v, atol=1e-4)

    def test_monotone_trace_and_nonnegativity(self):
        rng = np.random.default_rng(10)
        v = rng.random((30, 20))

        def assert_nonneg(i, w, h):
            assert w.min() >= 0 and h.min() >= 0

        model = fit_nmf(dtm(v, kind="tfidf"), t=4, seed=1, max_iter=200, tol=0.0, on_iteration=assert_nonneg)
        trace = np.array(model.objective_trace)
        assert np.all(trace[1:] <= trace[:-1] * (1 + 1e-9))

    def test_seed_insensitivity_of_objective(self):
        rng = np.random.default_rng(12)
        v = rng.random((50, 40))
        m = dtm(v, kind="tfidf")
        a = fit_nmf(m, t=6, seed=101, max_iter=500, tol=0.0).objective_trace[-1]
        b = fit_nmf(m, t=6, seed=202, max_iter=500, tol=0.0).objective_trace[-1]
        assert abs(a - b) / max(a, b) <= 0.05

    def test_negative_input(self):
        with pytest.raises(NegativeInput):
            fit_nmf(dtm([[1.0, -0.5]]), t=1, seed=0)

    def test_rank_too_large(self):
        with pytest.raises(RankTooLarge):
            fit_nmf(dtm(np.ones((2, 3))), t=3, seed=0)

    def test_seed_determinism(self):
        rng = np.random.default_rng(13)
        v = rng.random((12, 9))
        m = dtm(v, kind="tfidf")
        a = fit_nmf(m, t=3, seed=4, max_iter=50)
        b = fit_nmf(m, t=3, seed=4, max_iter=50)
        assert np.array_equal(a.W, b.W) and np.array_equal(a.H, b.H)
        assert a.objective_trace == b.objective_trace

    def test_tolerance_stops_early(self):
        rng = np.random.default_rng(14)
        v = rng.random((20, 15))
        model = fit_nmf(dtm(v, kind="tfidf"), t=3, seed=0, max_iter=5000, tol=1e-3)
        assert len(model.objective_trace) - 1 < 5000
