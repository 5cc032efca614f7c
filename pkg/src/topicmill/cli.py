"""Command-line front end wiring the pipeline end to end.

Commands: preprocess, fit, topics, coherence, cluster.  A flat key = value
config file drives everything; every key is overridable by a flag of the
same name.  Exit codes: 0 success, 1 validation error, 2 runtime error.

Output layout under --output_dir:

    tokenized/   corpus.tsv, vocabulary.tsv, stats.txt
    models/      <kind>.json
    reports/     topics_<kind>.{json,txt}, coherence.{json,txt},
                 projection.csv, clusters.csv, figures/*.png
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import cluster as cl
from . import decompose, evaluate, persist, probmodel
from .config import RunConfig, build_config, read_config_file, validate_config, _FIELD_TYPES
from .corpus import PreprocessConfig, TokenizedDoc, ingest_jsonl, tokenize_corpus
from .errors import ConfigError, FingerprintMismatch, TopicmillError
from .persist import write_text_atomic
from .vectorize import Vocabulary, count_matrix, tfidf


def _paths(cfg: RunConfig) -> dict[str, Path]:
    out = Path(cfg.output_dir)
    return {
        "tokenized": out / "tokenized",
        "corpus": out / "tokenized" / "corpus.tsv",
        "vocabulary": out / "tokenized" / "vocabulary.tsv",
        "stats": out / "tokenized" / "stats.txt",
        "models": out / "models",
        "reports": out / "reports",
        "figures": out / "reports" / "figures",
    }


def _fingerprint(path: Path) -> str:
    return "sha256:" + hashlib.sha256(path.read_bytes()).hexdigest()


def _preprocess_config(cfg: RunConfig) -> PreprocessConfig:
    return PreprocessConfig(
        stopword_list_id=cfg.stopwords,
        min_token_len=cfg.min_token_len,
        strip_urls=cfg.strip_urls,
        strip_html=cfg.strip_html,
        lemmatize=cfg.lemmatize,
    )


def _write_tokenized(path: Path, docs: list[TokenizedDoc]) -> None:
    lines = []
    for doc in docs:
        if "\t" in doc.id or "\n" in doc.id:
            raise TopicmillError(f"document id {doc.id!r} contains tab or newline")
        lines.append(f"{doc.id}\t{' '.join(doc.tokens)}")
    write_text_atomic(path, "\n".join(lines) + "\n")


def _read_tokenized(path: Path) -> list[TokenizedDoc]:
    if not path.exists():
        raise TopicmillError(f"tokenized corpus not found: {path} (run `topicmill preprocess` first)")
    docs = []
    for line in path.read_text(encoding="utf-8").splitlines():
        doc_id, _, rest = line.partition("\t")
        docs.append(TokenizedDoc(id=doc_id, tokens=rest.split() if rest else []))
    return docs


def _read_vocabulary(path: Path) -> Vocabulary:
    terms, freqs = [], []
    for line in path.read_text(encoding="utf-8").splitlines():
        term, _, freq = line.partition("\t")
        terms.append(term)
        freqs.append(int(freq))
    return Vocabulary.from_terms(terms, freqs)


def cmd_preprocess(cfg: RunConfig) -> int:
    if not cfg.input_path:
        raise ConfigError("input_path is required for preprocess")
    paths = _paths(cfg)
    docs = ingest_jsonl(cfg.input_path, cfg.id_field, cfg.text_field, cfg.date_field)
    tokenized = tokenize_corpus(docs, _preprocess_config(cfg))
    from .vectorize import build_vocabulary

    vocab = build_vocabulary(
        tokenized,
        min_df=cfg.min_df,
        max_df_ratio=cfg.max_df_ratio,
        max_size=cfg.max_size or None,
    )
    _write_tokenized(paths["corpus"], tokenized)
    write_text_atomic(
        paths["vocabulary"],
        "\n".join(f"{t}\t{f}" for t, f in zip(vocab.terms, vocab.doc_freq.tolist())) + "\n",
    )
    n_tokens = sum(len(d.tokens) for d in tokenized)
    stats = f"docs={len(tokenized)} tokens={n_tokens} vocab={len(vocab)}"
    write_text_atomic(paths["stats"], stats + "\n")
    print(stats)
    return 0


def _fit_model(cfg: RunConfig, counts, vocab: Vocabulary, token_docs: list[TokenizedDoc]):
    """Dispatch to the configured model; returns (payload, summary line)."""
    kind = cfg.model
    doc_ids = counts.row_ids
    if kind == "lsa":
        model = decompose.fit_lsa(tfidf(counts), t=cfg.topics, seed=cfg.seed)
        top = model.singular_values[0]
        summary = f"fit lsa: t={model.t} top_singular_value={top:.6g}"
        payload = persist.lsa_payload(model, vocab.terms, doc_ids, cfg.seed)
    elif kind == "nmf":
        model = decompose.fit_nmf(tfidf(counts), t=cfg.topics, seed=cfg.seed, max_iter=cfg.max_iter, tol=cfg.tol)
        iters = len(model.objective_trace) - 1
        summary = f"fit nmf: t={model.t} iterations={iters} final_objective={model.objective_trace[-1]:.6g}"
        payload = persist.nmf_payload(model, vocab.terms, doc_ids, cfg.seed, cfg.max_iter, cfg.tol)
    elif kind == "plsa":
        model = probmodel.fit_plsa(counts, T=cfg.topics, seed=cfg.seed, max_iter=cfg.max_iter, tol=cfg.tol)
        summary = (
            f"fit plsa: T={cfg.topics} iterations={len(model.loglik_trace)} "
            f"final_loglik={model.loglik_trace[-1]:.6g}"
        )
        payload = persist.plsa_payload(model, vocab.terms, doc_ids, cfg.seed, cfg.max_iter, cfg.tol)
    else:  # lda; unknown kinds rejected by validate_config
        ids = [[vocab.index[t] for t in d.tokens if t in vocab.index] for d in token_docs]
        model = probmodel.fit_lda_gibbs(
            ids,
            T=cfg.topics,
            alpha=cfg.alpha,
            beta=cfg.beta,
            seed=cfg.seed,
            iterations=cfg.iterations,
            burn_in=cfg.burn_in,
            sample_lag=cfg.sample_lag,
            vocab_size=len(vocab),
        )
        summary = f"fit lda: T={cfg.topics} iterations={cfg.iterations} tokens={model.assignments.size}"
        payload = persist.lda_payload(
            model, vocab.terms, doc_ids, cfg.seed, cfg.iterations, cfg.burn_in, cfg.sample_lag,
            keep_assignments=cfg.keep_assignments,
        )
    return payload, summary


def cmd_fit(cfg: RunConfig) -> int:
    paths = _paths(cfg)
    token_docs = _read_tokenized(paths["corpus"])
    vocab = _read_vocabulary(paths["vocabulary"])
    counts = count_matrix(token_docs, vocab)
    payload, summary = _fit_model(cfg, counts, vocab, token_docs)
    artifact_path = paths["models"] / f"{cfg.model}.json"
    persist.save_artifact(
        artifact_path,
        model_kind=cfg.model,
        payload=payload,
        config_snapshot=cfg.to_dict(),
        corpus_fingerprint=_fingerprint(paths["corpus"]),
    )
    print(summary)
    print(f"wrote {artifact_path}")
    return 0


def _load(artifact: str | Path):
    doc = persist.load_artifact(artifact)
    model, vocab_terms, doc_ids = persist.model_from_artifact(doc)
    return doc, model, vocab_terms, doc_ids


def _summaries(doc, model, vocab_terms: list[str], n: int) -> list[evaluate.TopicSummary]:
    kind = doc["model_kind"]
    matrix = persist.topic_term_matrix(kind, model)
    vocab = Vocabulary.from_terms(vocab_terms, [0] * len(vocab_terms))
    return [evaluate.top_words(matrix, vocab, k, n, model_kind=kind) for k in range(matrix.shape[0])]


def _check_fingerprint(doc: dict, corpus_path: Path) -> None:
    actual = _fingerprint(corpus_path)
    if doc["corpus_fingerprint"] != actual:
        raise FingerprintMismatch(
            f"artifact was fitted on a different corpus (artifact {doc['corpus_fingerprint']}, corpus {actual})"
        )


def cmd_topics(cfg: RunConfig, artifact: str) -> int:
    paths = _paths(cfg)
    doc, model, vocab_terms, _ = _load(artifact)
    kind = doc["model_kind"]
    summaries = _summaries(doc, model, vocab_terms, cfg.top_n)
    lines = [f"Top {cfg.top_n} words per topic ({kind})"]
    for s in summaries:
        words = " ".join(term for term, _ in s.top_words)
        lines.append(f"topic {s.topic_id:>2}: {words}")
    table = "\n".join(lines)
    print(table)
    write_text_atomic(paths["reports"] / f"topics_{kind}.txt", table + "\n")
    report = {
        "model_kind": kind,
        "top_n": cfg.top_n,
        "topics": [
            {"topic_id": s.topic_id, "words": [[t, w] for t, w in s.top_words]} for s in summaries
        ],
    }
    write_text_atomic(paths["reports"] / f"topics_{kind}.json", json.dumps(report, indent=1) + "\n")
    if cfg.figures:
        from . import figures

        figures.topic_word_bars(summaries, paths["figures"] / f"topics_{kind}.png", kind)
    return 0


def cmd_coherence(cfg: RunConfig, artifacts: list[str]) -> int:
    if not artifacts:
        raise ConfigError("coherence needs at least one artifact")
    paths = _paths(cfg)
    token_docs = _read_tokenized(paths["corpus"])
    rows = []
    detail = []
    for artifact in artifacts:
        doc, model, vocab_terms, _ = _load(artifact)
        _check_fingerprint(doc, paths["corpus"])
        kind = doc["model_kind"]
        summaries = _summaries(doc, model, vocab_terms, cfg.top_n)
        report = evaluate.coherence_cv(summaries, token_docs, window_size=cfg.window_size, top_n=cfg.top_n)
        rows.append((kind, report.mean_cv))
        detail.append(
            {
                "model_kind": kind,
                "mean_cv": report.mean_cv,
                "window_size": report.window_size,
                "top_n": report.top_n,
                "per_topic": [[tid, score] for tid, score in report.per_topic],
                "top_words": [[t for t, _ in s.top_words] for s in summaries],
            }
        )
    rows.sort(key=lambda r: -r[1])
    detail.sort(key=lambda d: -d["mean_cv"])
    table = evaluate.format_coherence_table(rows)
    print(table)
    write_text_atomic(paths["reports"] / "coherence.txt", table + "\n")
    write_text_atomic(paths["reports"] / "coherence.json", json.dumps(detail, indent=1) + "\n")
    if cfg.figures:
        from . import figures

        figures.coherence_bars(rows, paths["figures"] / "coherence.png")
    return 0


def cmd_cluster(cfg: RunConfig, artifact: str) -> int:
    paths = _paths(cfg)
    doc, model, _, doc_ids = _load(artifact)
    _check_fingerprint(doc, paths["corpus"])
    features = persist.document_features(doc["model_kind"], model)
    km = cl.fit_kmeans(
        features,
        K=cfg.clusters,
        seed=cfg.seed + 1,
        max_iter=cfg.cluster_max_iter,
        tol=cfg.cluster_tol,
        init=cfg.cluster_init,
    )
    proj = cl.project_tsne(features, perplexity=cfg.perplexity, seed=cfg.seed + 2, iterations=cfg.tsne_iterations)
    lines = ["id,x,y,cluster"]
    for i, doc_id in enumerate(doc_ids):
        x, y = proj.coords[i]
        lines.append(f"{doc_id},{x:.6f},{y:.6f},{km.assignments[i]}")
    write_text_atomic(paths["reports"] / "projection.csv", "\n".join(lines) + "\n")

    summary_lines = ["cluster,size,top_dims"]
    for k in range(km.K):
        size = int(np.sum(km.assignments == k))
        order = np.argsort(-km.centroids[k])[:3]
        dims = "|".join(f"{d}:{km.centroids[k][d]:.4f}" for d in order)
        summary_lines.append(f"{k},{size},{dims}")
    write_text_atomic(paths["reports"] / "clusters.csv", "\n".join(summary_lines) + "\n")
    print(f"kmeans: K={km.K} inertia={km.inertia:.6g} iterations={km.iterations_run}")
    print(f"tsne: final_kl={proj.kl_trace[-1]:.6g}")
    if cfg.figures:
        from . import figures

        figures.projection_scatter(proj.coords, km.assignments, paths["figures"] / "projection.png")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key = value configuration file")
    for f in fields(RunConfig):
        kind = _FIELD_TYPES[f.name]
        names = [f"--{f.name}"]
        if "_" in f.name:
            names.append(f"--{f.name.replace('_', '-')}")
        if kind is bool:
            common.add_argument(*names, dest=f.name, action=argparse.BooleanOptionalAction, default=None)
        else:
            common.add_argument(*names, dest=f.name, type=kind, default=None)

    parser = argparse.ArgumentParser(prog="topicmill", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("preprocess", parents=[common], help="tokenize a JSON-lines corpus and build the vocabulary")
    sub.add_parser("fit", parents=[common], help="fit the configured model on the preprocessed corpus")
    p_topics = sub.add_parser("topics", parents=[common], help="report top words per topic")
    p_topics.add_argument("--artifact", required=True, help="path to a fitted model artifact")
    p_coh = sub.add_parser("coherence", parents=[common], help="compare artifacts by mean C_v coherence")
    p_coh.add_argument("--artifacts", nargs="+", required=True, help="paths to fitted model artifacts")
    p_cluster = sub.add_parser("cluster", parents=[common], help="cluster documents and project them to 2-D")
    p_cluster.add_argument("--artifact", required=True, help="path to a fitted model artifact")
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    file_values = read_config_file(args.config) if args.config else {}
    overrides = {
        f.name: getattr(args, f.name)
        for f in fields(RunConfig)
        if getattr(args, f.name, None) is not None
    }
    cfg = build_config(file_values, overrides)
    validate_config(cfg)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        if args.command == "preprocess":
            return cmd_preprocess(cfg)
        if args.command == "fit":
            return cmd_fit(cfg)
        if args.command == "topics":
            return cmd_topics(cfg, args.artifact)
        if args.command == "coherence":
            return cmd_coherence(cfg, args.artifacts)
        if args.command == "cluster":
            return cmd_cluster(cfg, args.artifact)
        raise ConfigError(f"unknown command {args.command!r}")  # pragma: no cover
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (TopicmillError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
