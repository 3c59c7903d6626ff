"""Typed errors raised across the simulator.

The CLI reports failures as ``<ClassName>: <message>`` on stderr, so every
error condition gets its own class rather than a bare ValueError.
"""


class SemRelayError(Exception):
    """Base class for all simulator errors."""


class DimensionError(SemRelayError):
    """Shape mismatch between tensors; message reports both shapes."""


class ContractViolationError(SemRelayError):
    """A documented precondition was violated by the caller."""


class VocabularyError(SemRelayError):
    """Token index out of range or unknown vocabulary entry."""


class LengthError(SemRelayError):
    """Sequence longer than the configured maximum."""


class TrainingFailureError(SemRelayError):
    """Loss became non-finite; carries the step index."""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"training diverged at step {step}")


class CheckInvalidError(SemRelayError):
    """Gradient check target is not deterministic under a fixed seed."""


class DeepFadeError(SemRelayError):
    """Fading coefficient too small to equalize; trial records a failure."""


class DegenerateBlockError(SemRelayError):
    """All-zero symbol block cannot be power-normalized."""


class UndefinedSimilarityError(SemRelayError):
    """Cosine similarity of a zero vector is undefined."""


class TemplateError(SemRelayError):
    """Corpus template references an undefined slot."""


class LexiconError(SemRelayError):
    """Translation lexicon violates ordering or idempotence rules."""


class ConfigError(SemRelayError):
    """Experiment configuration is inconsistent."""


class LoadError(SemRelayError):
    """Base class for model-file load failures."""


class MagicMismatchError(LoadError):
    pass


class VersionMismatchError(LoadError):
    pass


class RoleMismatchError(LoadError):
    pass


class DimMismatchError(LoadError):
    pass


class TruncatedFileError(LoadError):
    pass
