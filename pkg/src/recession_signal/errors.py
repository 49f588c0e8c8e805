"""Exception types raised across the pipeline."""


class PipelineError(Exception):
    """Base class for all errors raised by this package."""


# --- corpus ingestion ---

class MalformedRecord(PipelineError):
    def __init__(self, line_number, reason=""):
        self.line_number = line_number
        msg = f"malformed record at line {line_number}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class EmptyCorpus(PipelineError):
    pass


# --- LDA ---

class EmptySlice(PipelineError):
    pass


class InvalidConfig(PipelineError):
    pass


# --- topic geometry ---

class DimensionMismatch(PipelineError):
    pass


class NotADistribution(PipelineError):
    pass


class TooFewTopics(PipelineError):
    pass


# --- indicator ---

class SpanMismatch(PipelineError):
    pass


class WindowTooLarge(PipelineError):
    pass


class InsufficientRegimeData(PipelineError):
    pass


# --- factor panel ---

class NonPositiveForLog(PipelineError):
    pass


class AllMissing(PipelineError):
    pass


class RankDeficient(PipelineError):
    pass


class UnbalancedPanel(PipelineError):
    pass


# --- probit ---

class NoOverlap(PipelineError):
    pass


class EmptyAfterLag(PipelineError):
    pass


class OneClassOnly(PipelineError):
    pass


class Noninvertible(PipelineError):
    pass


class SchemaMismatch(PipelineError):
    pass


class NotNested(PipelineError):
    pass


class SampleMismatch(PipelineError):
    pass


# --- evaluation ---

class LengthMismatch(PipelineError):
    pass


class InsufficientTraining(PipelineError):
    pass


class BlockTooLong(PipelineError):
    pass


class ZeroLossDifferential(PipelineError):
    pass
