"""Exception hierarchy shared across the toolkit.

Everything raised on a domain-level failure derives from TtngError so the
CLI can map it to exit code 1; programming errors stay ordinary exceptions.
"""


class TtngError(Exception):
    """Base class for all domain errors."""


# graph model

class EmptyInputError(TtngError):
    """An operation received an empty node list."""


class NoMatchingTrackError(TtngError):
    """A node matched no track and the rule does not permit new tracks."""


class DanglingEdgeError(TtngError):
    """An edge references a node id that is not in the graph."""


# motifs

class InfeasibleParametersError(TtngError):
    """Requested node count cannot fit the grid."""


class NotAMotifError(TtngError):
    """Occupancy pattern is not one of the nine 3-node motif classes."""


# rendering

class InvalidGraphError(TtngError):
    """Refusing to render a graph that fails constraint validation."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"graph fails validation: {report}")


# completion / embedding providers

class ProviderError(TtngError):
    """Base class for provider transport and protocol failures."""


class ProviderTimeout(ProviderError):
    """Request exceeded the configured timeout (after retries)."""


class AuthFailure(ProviderError):
    """Authentication rejected or no token available."""


class RateLimited(ProviderError):
    """Provider kept rejecting with rate-limit status after retries."""


class MalformedResponse(ProviderError):
    """Provider answered but the payload was not in the expected shape."""


class ReplayMiss(ProviderError):
    """Replay journal has no entry for this request."""


# generation pipeline

class SchemaViolation(TtngError):
    """Provider output failed context schema validation after all retries."""

    def __init__(self, problems):
        self.problems = tuple(problems)
        super().__init__("; ".join(self.problems))


class EmptyEntityPool(TtngError):
    """A theme offers no entities to sample from."""


class UnsatisfiableParentOverlap(TtngError):
    """Parents contribute no entities at all, so the overlap invariant cannot hold."""


class DatasetGenerationError(TtngError):
    """Dataset build aborted part-way; carries the stories that did finish."""

    def __init__(self, message, completed):
        self.completed = tuple(completed)
        super().__init__(f"{message} (completed: {', '.join(self.completed) or 'none'})")


# metrics

class EmptyCorpusError(TtngError):
    """tf-idf needs a corpus of at least two documents."""


class InsufficientSample(TtngError):
    """A statistical test needs at least two observations per sample."""


class DimensionMismatch(TtngError):
    """Embedding vectors disagree in length."""


# study service

class StudyNotConfigured(TtngError):
    """No dataset/config loaded into the study service."""


class UnknownSession(TtngError):
    """Session id not found."""


class UnknownTask(TtngError):
    """Task id not found or not the session's current task."""


class UnknownResponse(TtngError):
    """Response id not found."""


class WrongPhase(TtngError):
    """Operation not permitted in the session's current phase."""


class DuplicateResponse(TtngError):
    """A response for this (session, task) already exists."""
