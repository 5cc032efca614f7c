import json

import numpy as np
import pytest

from conftest import dtm, make_planted_lda_corpus
from topicmill import persist
from topicmill.decompose import fit_lsa, fit_nmf
from topicmill.errors import ArtifactError, UnknownModelKind
from topicmill.probmodel import fit_lda_gibbs, fit_plsa


def save_load(tmp_path, kind, payload):
    path = tmp_path / f"{kind}.json"
    persist.save_artifact(path, kind, payload, {"seed": 1}, "sha256:x")
    return persist.load_artifact(path)


class TestRoundTrips:
    def test_lsa(self, tmp_path):
        rng = np.random.default_rng(0)
        model = fit_lsa(dtm(rng.random((10, 7))), t=3, seed=1)
        payload = persist.lsa_payload(model, [f"t{i}" for i in range(7)], [f"d{i}" for i in range(10)], seed=1)
        back, vocab, ids = persist.model_from_artifact(save_load(tmp_path, "lsa", payload))
        assert np.array_equal(back.doc_factors, model.doc_factors)
        assert np.array_equal(back.singular_values, model.singular_values)
        assert np.array_equal(back.term_factors, model.term_factors)
        assert len(vocab) == 7 and len(ids) == 10

    def test_nmf(self, tmp_path):
        rng = np.random.default_rng(1)
        model = fit_nmf(dtm(rng.random((8, 6)), kind="tfidf"), t=2, seed=2, max_iter=30)
        payload = persist.nmf_payload(model, [f"t{i}" for i in range(6)], [f"d{i}" for i in range(8)],
                                      seed=2, max_iter=30, tol=1e-6)
        back, _, _ = persist.model_from_artifact(save_load(tmp_path, "nmf", payload))
        assert np.array_equal(back.W, model.W)
        assert np.array_equal(back.H, model.H)
        assert back.objective_trace == model.objective_trace

    def test_plsa(self, tmp_path):
        counts = dtm(np.array([[2, 1, 0], [0, 1, 3]]))
        model = fit_plsa(counts, T=2, seed=3, max_iter=10)
        payload = persist.plsa_payload(model, ["a", "b", "c"], ["d0", "d1"], seed=3, max_iter=10, tol=1e-6)
        back, _, _ = persist.model_from_artifact(save_load(tmp_path, "plsa", payload))
        assert np.array_equal(back.p_z_given_d, model.p_z_given_d)
        assert np.array_equal(back.p_w_given_z, model.p_w_given_z)
        assert np.array_equal(back.p_d, model.p_d)
        assert back.loglik_trace == model.loglik_trace

    @pytest.mark.parametrize("keep", [False, True])
    def test_lda_assignments_flag(self, tmp_path, keep):
        docs, _ = make_planted_lda_corpus(seed=4, n_docs=5, doc_len=8)
        model = fit_lda_gibbs(docs, T=2, alpha=0.1, beta=0.1, seed=0, iterations=4, burn_in=1, sample_lag=1)
        payload = persist.lda_payload(model, [f"t{i}" for i in range(30)], [f"d{i}" for i in range(5)],
                                      seed=0, iterations=4, burn_in=1, sample_lag=1, keep_assignments=keep)
        back, _, _ = persist.model_from_artifact(save_load(tmp_path, "lda", payload))
        assert np.array_equal(back.phi, model.phi)
        assert np.array_equal(back.theta, model.theta)
        if keep:
            assert np.array_equal(back.assignments, model.assignments)
        else:
            assert back.assignments.size == 0

    def test_identical_models_produce_identical_bytes(self, tmp_path):
        counts = dtm(np.array([[2, 1], [1, 3]]))
        for i, name in enumerate(("a.json", "b.json")):
            model = fit_plsa(counts, T=2, seed=5, max_iter=8)
            payload = persist.plsa_payload(model, ["x", "y"], ["d0", "d1"], seed=5, max_iter=8, tol=0.0)
            persist.save_artifact(tmp_path / name, "plsa", payload, {"seed": 5}, "sha256:x")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


class TestArtifactValidation:
    def test_missing_top_level_field(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"schema_version": 1, "model_kind": "lsa", "payload": {}}))
        with pytest.raises(ArtifactError) as err:
            persist.load_artifact(path)
        assert "config_snapshot" in str(err.value)

    def test_unsupported_schema_version(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({
            "schema_version": 99, "model_kind": "lsa", "config_snapshot": {},
            "corpus_fingerprint": "x", "payload": {},
        }))
        with pytest.raises(ArtifactError) as err:
            persist.load_artifact(path)
        assert err.value.field == "schema_version"

    def test_missing_payload_field_named(self, tmp_path):
        docs, _ = make_planted_lda_corpus(seed=6, n_docs=3, doc_len=5)
        model = fit_lda_gibbs(docs, T=2, alpha=0.1, beta=0.1, seed=0, iterations=2, burn_in=1, sample_lag=1)
        payload = persist.lda_payload(model, [f"t{i}" for i in range(30)], ["a", "b", "c"],
                                      seed=0, iterations=2, burn_in=1, sample_lag=1)
        del payload["phi"]
        doc = save_load(tmp_path, "lda", payload)
        with pytest.raises(ArtifactError) as err:
            persist.model_from_artifact(doc)
        assert err.value.field == "payload.phi"

    def test_wrong_matrix_size_named(self, tmp_path):
        payload = {
            "t": 2, "n_docs": 3, "n_terms": 4, "seed": 0,
            "doc_factors": [0.0] * 5,  # should be 6
            "singular_values": [1.0, 0.5],
            "term_factors": [0.0] * 8,
            "vocab": ["a", "b", "c", "d"],
            "doc_ids": ["x", "y", "z"],
        }
        doc = save_load(tmp_path, "lsa", payload)
        with pytest.raises(ArtifactError) as err:
            persist.model_from_artifact(doc)
        assert err.value.field == "payload.doc_factors"

    def test_unparseable_file(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text("{ not json")
        with pytest.raises(ArtifactError):
            persist.load_artifact(path)

    def test_unknown_kind_rejected_on_save(self, tmp_path):
        with pytest.raises(UnknownModelKind):
            persist.save_artifact(tmp_path / "m.json", "svd2000", {}, {}, "sha256:x")


class TestModelViews:
    def test_topic_term_and_document_features_shapes(self, tmp_path):
        rng = np.random.default_rng(7)
        counts = dtm(np.where(rng.random((12, 9)) < 0.4, 1.0, 0.0) + 1.0)
        lsa = fit_lsa(counts, t=3, seed=0)
        nmf = fit_nmf(counts, t=3, seed=0, max_iter=10)
        plsa = fit_plsa(counts, T=3, seed=0, max_iter=5)
        docs, _ = make_planted_lda_corpus(seed=8, n_docs=12, doc_len=9)
        lda = fit_lda_gibbs(docs, T=3, alpha=0.1, beta=0.1, seed=0, iterations=3, burn_in=1,
                            sample_lag=1, vocab_size=30)
        for kind, model, n_terms in (("lsa", lsa, 9), ("nmf", nmf, 9), ("plsa", plsa, 9), ("lda", lda, 30)):
            assert persist.topic_term_matrix(kind, model).shape == (3, n_terms)
            assert persist.document_features(kind, model).shape == (12, 3)
