"""Exception types shared across the library.

Errors that callers are expected to branch on get their own class; everything
else raises ValueError at the point of failure.
"""


class BreadthError(Exception):
    """Base class for all library-specific errors."""


class CorpusFormatError(BreadthError):
    """A corpus input file is malformed.

    Carries the file path and, when known, the 1-based line number of the
    offending record.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        super().__init__(prefix + message)


class UnknownAuthorError(BreadthError):
    """The requested author id appears in no paper's author list."""


class BelowMinPapersError(BreadthError):
    """The author exists but has fewer papers than the inclusion threshold.

    Distinct from UnknownAuthorError: this signals exclusion, not absence.
    """


class NoFieldLabelError(BreadthError):
    """No paper of the profile carries a field label."""


class NotEnoughEmbeddingsError(BreadthError):
    """Fewer than two of the author's papers have embeddings."""


class NoReferencesError(BreadthError):
    """The profile's papers cite nothing; self-reference rate is undefined."""


class NoPriorPapersError(BreadthError):
    """No paper has any potentially citable prior own paper."""


class DegenerateDataError(BreadthError):
    """Statistical input too small or without variance for the requested statistic."""
