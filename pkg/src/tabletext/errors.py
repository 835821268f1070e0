"""Exception hierarchy shared across the toolkit.

Everything except :class:`RemoteUnavailable` derives from
:class:`DataError`; the CLI maps ``DataError`` to exit code 2 and
``RemoteUnavailable`` to exit code 3.
"""


class TabletextError(Exception):
    """Base class for all toolkit errors."""


class DataError(TabletextError):
    """Bad input data or files (CLI exit code 2)."""


class MalformedMR(DataError):
    """Meaning-representation string does not follow name[value] syntax."""


class UnboundPlaceholder(DataError):
    """A delexicalized placeholder names a slot absent from the table."""


class RuleSyntax(DataError):
    """A phrase-rule file line could not be parsed."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateRule(DataError):
    """Two rules share the same (slot, condition) pair."""


class PatternError(DataError):
    """A match-pattern line is malformed or its regex does not compile."""


class ZeroSlots(DataError):
    """Slot error rate requested for a report with no slots."""


class EmptyCorpus(DataError):
    """An operation that needs at least one sample received none."""


class LengthMismatch(DataError):
    """Parallel evaluation inputs have different lengths."""


class CorpusFormat(DataError):
    """A corpus file line violates the tab-separated format."""


class ConfigError(DataError):
    """Unknown or unparsable key in a config file."""


class RemoteUnavailable(TabletextError):
    """Remote scorer failed after bounded retries (CLI exit code 3)."""
