"""Versioned JSON persistence for fitted models.

An artifact is a single JSON document:

    {"schema_version": 1, "model_kind": ..., "config_snapshot": {...},
     "corpus_fingerprint": "sha256:...", "payload": {...}}

Factor matrices are stored as flat row-major float lists next to their
dimensions.  Serialization uses repr-roundtrip floats, so identical models
produce identical bytes.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .decompose import LsaModel, NmfModel
from .errors import ArtifactError, UnknownModelKind
from .probmodel import LdaModel, PlsaModel

SCHEMA_VERSION = 1

MODEL_KINDS = ("lda", "plsa", "lsa", "nmf")


def write_text_atomic(path: str | Path, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _flat(a: np.ndarray) -> list[float]:
    return np.asarray(a, dtype=np.float64).ravel().tolist()


def save_artifact(
    path: str | Path,
    model_kind: str,
    payload: dict,
    config_snapshot: dict,
    corpus_fingerprint: str,
) -> None:
    if model_kind not in MODEL_KINDS:
        raise UnknownModelKind(model_kind)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "model_kind": model_kind,
        "config_snapshot": config_snapshot,
        "corpus_fingerprint": corpus_fingerprint,
        "payload": payload,
    }
    write_text_atomic(path, json.dumps(doc, indent=1) + "\n")


def load_artifact(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ArtifactError("<document>", str(exc)) from None
    for fieldname in ("schema_version", "model_kind", "config_snapshot", "corpus_fingerprint", "payload"):
        if fieldname not in doc:
            raise ArtifactError(fieldname, "absent")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ArtifactError("schema_version", f"unsupported version {doc['schema_version']}")
    if doc["model_kind"] not in MODEL_KINDS:
        raise ArtifactError("model_kind", f"unknown kind {doc['model_kind']!r}")
    return doc


def _get(payload: dict, name: str):
    if name not in payload:
        raise ArtifactError(f"payload.{name}", "absent")
    return payload[name]


def _matrix(payload: dict, name: str, rows: int, cols: int) -> np.ndarray:
    flat = np.asarray(_get(payload, name), dtype=np.float64)
    if flat.size != rows * cols:
        raise ArtifactError(f"payload.{name}", f"expected {rows * cols} values, found {flat.size}")
    return flat.reshape(rows, cols)


def lsa_payload(model: LsaModel, vocab_terms: list[str], doc_ids: list[str], seed: int) -> dict:
    return {
        "t": model.t,
        "n_docs": model.doc_factors.shape[0],
        "n_terms": model.term_factors.shape[1],
        "seed": seed,
        "doc_factors": _flat(model.doc_factors),
        "singular_values": _flat(model.singular_values),
        "term_factors": _flat(model.term_factors),
        "vocab": list(vocab_terms),
        "doc_ids": list(doc_ids),
    }


def nmf_payload(model: NmfModel, vocab_terms: list[str], doc_ids: list[str], seed: int, max_iter: int, tol: float) -> dict:
    return {
        "t": model.t,
        "n_docs": model.H.shape[1],
        "n_terms": model.W.shape[0],
        "seed": seed,
        "max_iter": max_iter,
        "tol": tol,
        "W": _flat(model.W),
        "H": _flat(model.H),
        "objective_trace": [float(x) for x in model.objective_trace],
        "vocab": list(vocab_terms),
        "doc_ids": list(doc_ids),
    }


def plsa_payload(model: PlsaModel, vocab_terms: list[str], doc_ids: list[str], seed: int, max_iter: int, tol: float) -> dict:
    return {
        "T": model.p_w_given_z.shape[0],
        "n_docs": model.p_z_given_d.shape[0],
        "n_terms": model.p_w_given_z.shape[1],
        "seed": seed,
        "max_iter": max_iter,
        "tol": tol,
        "p_z_given_d": _flat(model.p_z_given_d),
        "p_w_given_z": _flat(model.p_w_given_z),
        "p_d": _flat(model.p_d),
        "loglik_trace": [float(x) for x in model.loglik_trace],
        "vocab": list(vocab_terms),
        "doc_ids": list(doc_ids),
    }


def lda_payload(
    model: LdaModel,
    vocab_terms: list[str],
    doc_ids: list[str],
    seed: int,
    iterations: int,
    burn_in: int,
    sample_lag: int,
    keep_assignments: bool = False,
) -> dict:
    return {
        "T": model.T,
        "n_docs": model.theta.shape[0],
        "n_terms": model.phi.shape[1],
        "seed": seed,
        "alpha": model.alpha,
        "beta": model.beta,
        "iterations": iterations,
        "burn_in": burn_in,
        "sample_lag": sample_lag,
        "phi": _flat(model.phi),
        "theta": _flat(model.theta),
        "assignments": model.assignments.tolist() if keep_assignments else None,
        "vocab": list(vocab_terms),
        "doc_ids": list(doc_ids),
    }


def model_from_artifact(doc: dict):
    """Materialize (model, vocab_terms, doc_ids) from a loaded artifact."""
    kind = doc["model_kind"]
    payload = doc["payload"]
    vocab_terms = list(_get(payload, "vocab"))
    doc_ids = list(_get(payload, "doc_ids"))
    n_docs = int(_get(payload, "n_docs"))
    n_terms = int(_get(payload, "n_terms"))
    if kind == "lsa":
        t = int(_get(payload, "t"))
        model = LsaModel(
            doc_factors=_matrix(payload, "doc_factors", n_docs, t),
            singular_values=np.asarray(_get(payload, "singular_values"), dtype=np.float64),
            term_factors=_matrix(payload, "term_factors", t, n_terms),
            t=t,
        )
    elif kind == "nmf":
        t = int(_get(payload, "t"))
        model = NmfModel(
            W=_matrix(payload, "W", n_terms, t),
            H=_matrix(payload, "H", t, n_docs),
            t=t,
            objective_trace=[float(x) for x in _get(payload, "objective_trace")],
        )
    elif kind == "plsa":
        T = int(_get(payload, "T"))
        model = PlsaModel(
            p_z_given_d=_matrix(payload, "p_z_given_d", n_docs, T),
            p_w_given_z=_matrix(payload, "p_w_given_z", T, n_terms),
            p_d=np.asarray(_get(payload, "p_d"), dtype=np.float64),
            loglik_trace=[float(x) for x in _get(payload, "loglik_trace")],
        )
    elif kind == "lda":
        T = int(_get(payload, "T"))
        assignments = payload.get("assignments")
        model = LdaModel(
            phi=_matrix(payload, "phi", T, n_terms),
            theta=_matrix(payload, "theta", n_docs, T),
            alpha=float(_get(payload, "alpha")),
            beta=float(_get(payload, "beta")),
            T=T,
            assignments=np.asarray([] if assignments is None else assignments, dtype=np.int32),
        )
    else:  # pragma: no cover - load_artifact already rejects unknown kinds
        raise UnknownModelKind(kind)
    return model, vocab_terms, doc_ids


def topic_term_matrix(kind: str, model) -> np.ndarray:
    """The T x V topic-over-terms view every report consumes."""
    if kind == "lda":
        return model.phi
    if kind == "plsa":
        return model.p_w_given_z
    if kind == "nmf":
        return model.topic_term
    if kind == "lsa":
        return model.term_factors
    raise UnknownModelKind(kind)


def document_features(kind: str, model) -> np.ndarray:
    """The d x t document representation used for clustering."""
    if kind == "lda":
        return model.theta
    if kind == "plsa":
        return model.p_z_given_d
    if kind == "nmf":
        return model.H.T
    if kind == "lsa":
        return model.doc_factors
    raise UnknownModelKind(kind)
