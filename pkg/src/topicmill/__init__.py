"""Topic modeling and clustering for incident narratives.

A small, fully deterministic engine: JSON-lines ingestion, rule-based
preprocessing, counts/tf-idf vectorization, four topic models (LDA by
collapsed Gibbs, pLSA by EM, LSA by randomized truncated SVD, NMF by
multiplicative updates), C_v coherence scoring, K-means clustering and an
exact t-SNE projection, wired together by the `topicmill` CLI.
"""

from .corpus import (
    Document,
    PreprocessConfig,
    TokenizedDoc,
    bundled_corpus_path,
    ingest_jsonl,
    lemmatize,
    preprocess,
    tokenize_corpus,
)
from .vectorize import DocTermMatrix, Vocabulary, build_vocabulary, count_matrix, tfidf
from .decompose import LsaModel, NmfModel, fit_lsa, fit_nmf, nmf_objective
from .probmodel import LdaModel, PlsaModel, doc_topics, fit_lda_gibbs, fit_plsa, plsa_log_likelihood
from .cluster import ClusterModel, Projection2D, fit_kmeans, kmeans_pp_init, project_tsne
from .evaluate import (
    CoherenceReport,
    CooccurrenceIndex,
    TopicSummary,
    build_cooccurrence,
    coherence_cv,
    npmi,
    top_words,
)

__version__ = "0.1.0"

__all__ = [
    "Document",
    "bundled_corpus_path",
    "PreprocessConfig",
    "TokenizedDoc",
    "ingest_jsonl",
    "lemmatize",
    "preprocess",
    "tokenize_corpus",
    "DocTermMatrix",
    "Vocabulary",
    "build_vocabulary",
    "count_matrix",
    "tfidf",
    "LsaModel",
    "NmfModel",
    "fit_lsa",
    "fit_nmf",
    "nmf_objective",
    "LdaModel",
    "PlsaModel",
    "doc_topics",
    "fit_lda_gibbs",
    "fit_plsa",
    "plsa_log_likelihood",
    "ClusterModel",
    "Projection2D",
    "fit_kmeans",
    "kmeans_pp_init",
    "project_tsne",
    "CoherenceReport",
    "CooccurrenceIndex",
    "TopicSummary",
    "build_cooccurrence",
    "coherence_cv",
    "npmi",
    "top_words",
]
