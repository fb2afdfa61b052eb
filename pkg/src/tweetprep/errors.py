"""Exception taxonomy shared across the toolkit.

The CLI maps these onto exit codes: ``BadConfig`` is a usage error (exit 1),
``DataError`` subclasses are malformed or unusable input (exit 2), and I/O
problems surface as ``OSError`` (exit 3).
"""


class ToolkitError(Exception):
    """Base class for all toolkit-raised errors."""


class BadConfig(ToolkitError):
    """Invalid configuration or flag value."""


class DataError(ToolkitError):
    """Input data violates a contract (bad record, empty corpus, ...)."""


class DomainUnparseable(ToolkitError):
    """No registrable domain label could be extracted from a URL host."""


class EmptyCorpus(DataError):
    """Tokenizer training received no trainable text."""


class VocabTooSmall(DataError):
    """Requested vocabulary cannot hold the alphabet and reserved tokens."""


class UnknownId(DataError):
    """Token id outside the model vocabulary."""


class BlockFormatError(DataError):
    """Block file has a bad magic number, version, or truncated record."""


class ClassTooSmall(DataError):
    """A class has fewer members than the number of folds."""

    def __init__(self, label: str, count: int, k: int):
        super().__init__(f"class {label!r} has {count} members, need >= {k}")
        self.label = label
        self.count = count
        self.k = k


class UnknownDataset(DataError):
    """Named dataset is not among the provided manifests."""


class LengthMismatch(DataError):
    """Paired sequences have different lengths."""


class EmptyInput(DataError):
    """Operation requires at least one element."""
