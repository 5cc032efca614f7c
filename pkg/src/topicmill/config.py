"""Declarative run configuration for the CLI.

One flat key = value document drives the whole pipeline; every key is also
a CLI flag of the same name.  Validation happens before any work starts so
an invalid configuration never touches output files.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import get_type_hints

from .errors import ConfigError, UnknownModelKind
from .persist import MODEL_KINDS


@dataclass
class RunConfig:
    # corpus / preprocessing
    input_path: str = ""
    id_field: str = "id"
    text_field: str = "narrative"
    date_field: str = "date"
    stopwords: str = "english"
    min_token_len: int = 2
    strip_urls: bool = True
    strip_html: bool = True
    lemmatize: bool = True
    # vocabulary
    min_df: int = 5
    max_df_ratio: float = 0.5
    max_size: int = 0  # 0 means unlimited
    # model
    model: str = "lda"
    topics: int = 10
    alpha: float = 0.1
    beta: float = 0.01
    max_iter: int = 200      # pLSA / NMF / K-means inner loops cap separately
    tol: float = 1e-6
    iterations: int = 1000   # LDA Gibbs sweeps
    burn_in: int = 200
    sample_lag: int = 10
    keep_assignments: bool = False
    # clustering
    clusters: int = 10
    cluster_init: str = "kmeans++"
    cluster_max_iter: int = 100
    cluster_tol: float = 1e-6
    # t-SNE
    perplexity: float = 30.0
    tsne_iterations: int = 1000
    # coherence
    window_size: int = 110
    top_n: int = 10
    # run
    seed: int = 42
    output_dir: str = "out"
    figures: bool = True

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_FIELD_TYPES = get_type_hints(RunConfig)

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def coerce(key: str, raw: str):
    kind = _FIELD_TYPES.get(key)
    if kind is None:
        raise ConfigError(f"unknown configuration key: {key!r}")
    if kind is bool:
        low = raw.strip().lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected {kind.__name__}, got {raw!r}") from None


def read_config_file(path: str | Path) -> dict:
    """Parse `key = value` lines; '#' starts a comment, blanks are skipped."""
    values: dict = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value', got {line!r}")
        key, raw = line.split("=", 1)
        values[key.strip()] = coerce(key.strip(), raw.strip())
    return values


def build_config(file_values: dict | None = None, overrides: dict | None = None) -> RunConfig:
    cfg = RunConfig()
    for source in (file_values or {}), (overrides or {}):
        for key, value in source.items():
            if key not in _FIELD_TYPES:
                raise ConfigError(f"unknown configuration key: {key!r}")
            if value is not None:
                setattr(cfg, key, value)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    """Check every numeric field against the precondition of the operation it feeds."""
    problems: list[str] = []
    if cfg.min_token_len < 1:
        problems.append("min_token_len must be >= 1")
    if cfg.min_df < 1:
        problems.append("min_df must be >= 1")
    if not 0 < cfg.max_df_ratio <= 1:
        problems.append("max_df_ratio must be in (0, 1]")
    if cfg.max_size < 0:
        problems.append("max_size must be >= 0 (0 = unlimited)")
    if cfg.model not in MODEL_KINDS:
        raise UnknownModelKind(cfg.model)
    if cfg.topics < 1:
        problems.append("topics must be >= 1")
    if cfg.alpha <= 0:
        problems.append("alpha must be > 0")
    if cfg.beta <= 0:
        problems.append("beta must be > 0")
    if cfg.max_iter < 1:
        problems.append("max_iter must be >= 1")
    if cfg.tol < 0:
        problems.append("tol must be >= 0")
    if not cfg.iterations > cfg.burn_in >= 0:
        problems.append("need iterations > burn_in >= 0")
    if cfg.sample_lag < 1:
        problems.append("sample_lag must be >= 1")
    if cfg.clusters < 1:
        problems.append("clusters must be >= 1")
    if cfg.cluster_init not in ("kmeans++", "random"):
        problems.append("cluster_init must be 'kmeans++' or 'random'")
    if cfg.cluster_max_iter < 1:
        problems.append("cluster_max_iter must be >= 1")
    if cfg.cluster_tol < 0:
        problems.append("cluster_tol must be >= 0")
    if cfg.perplexity <= 1:
        problems.append("perplexity must be > 1")
    if cfg.tsne_iterations < 1:
        problems.append("tsne_iterations must be >= 1")
    if cfg.window_size < 1:
        problems.append("window_size must be >= 1")
    if cfg.top_n < 1:
        problems.append("top_n must be >= 1")
    if cfg.seed < 0:
        problems.append("seed must be >= 0")
    if problems:
        raise ConfigError("; ".join(problems))
