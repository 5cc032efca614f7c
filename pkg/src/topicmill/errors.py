"""Exception types shared across the package.

Every error raised on a documented failure path derives from
:class:`TopicmillError` so callers can catch package failures in one clause.
"""

from __future__ import annotations


class TopicmillError(Exception):
    """Base class for all topicmill errors."""


class ConfigError(TopicmillError):
    """A run configuration value violates a precondition."""


class UnknownModelKind(ConfigError):
    def __init__(self, kind: str):
        super().__init__(f"unknown model kind: {kind!r} (expected lda, plsa, lsa or nmf)")
        self.kind = kind


# --- corpus ---------------------------------------------------------------

class MalformedRecord(TopicmillError):
    def __init__(self, line_no: int, reason: str = ""):
        msg = f"line {line_no}: unparseable record"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)
        self.line_no = line_no


class DuplicateId(TopicmillError):
    def __init__(self, doc_id: str):
        super().__init__(f"duplicate document id: {doc_id!r}")
        self.doc_id = doc_id


class MissingField(TopicmillError):
    def __init__(self, line_no: int, field: str):
        super().__init__(f"line {line_no}: missing field {field!r}")
        self.line_no = line_no
        self.field = field


# --- vectorize ------------------------------------------------------------

class EmptyVocabulary(TopicmillError):
    """No term survived the document-frequency filters."""


# --- decompose ------------------------------------------------------------

class RankTooLarge(TopicmillError):
    """Requested latent dimension exceeds what the matrix supports."""


class DegenerateMatrix(TopicmillError):
    """The input matrix is all-zero and cannot be factorized."""


class NegativeInput(TopicmillError):
    """A matrix that must be nonnegative has a negative entry."""


class ShapeMismatch(TopicmillError):
    """Operand shapes do not conform."""


# --- probmodel ------------------------------------------------------------

class EmptyCorpus(TopicmillError):
    """The corpus holds no tokens to model."""


class InvalidHyperparameter(TopicmillError):
    """A model hyperparameter violates its precondition."""


class IndexOutOfRange(TopicmillError):
    """A document or topic index is out of range."""


# --- cluster --------------------------------------------------------------

class TooManyClusters(TopicmillError):
    """K exceeds the number of points."""


class PerplexityOutOfRange(TopicmillError):
    """t-SNE perplexity must satisfy 1 < perplexity < (n - 1) / 3."""


# --- evaluate -------------------------------------------------------------

class UnknownTerm(TopicmillError):
    def __init__(self, term: str):
        super().__init__(f"term {term!r} not present in the co-occurrence index")
        self.term = term


class InsufficientWords(TopicmillError):
    """A topic retains fewer than two in-corpus words."""


# --- persistence ----------------------------------------------------------

class ArtifactError(TopicmillError):
    """A persisted model artifact is unreadable; names the failing field."""

    def __init__(self, field: str, detail: str = ""):
        msg = f"corrupt artifact: field {field!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.field = field


class FingerprintMismatch(TopicmillError):
    """Artifact was fitted on a different preprocessed corpus."""
