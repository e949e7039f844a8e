"""Exception types shared across the pipeline."""


class SemasError(Exception):
    """Base class for all package errors."""


# -- bus --
class UnknownTopic(SemasError):
    pass


# -- datagen --
class InvalidProfile(SemasError):
    pass


class SingleClass(SemasError):
    """Operation needs both classes present."""


class CalledOnNormal(SemasError):
    pass


class SchemaMismatch(SemasError):
    pass


class UnreadableFile(SemasError):
    pass


# -- edge --
class WindowTooShort(SemasError):
    pass


class TickMismatch(SemasError):
    pass


# -- detect --
class EmptyTrainSet(SemasError):
    pass


class DimensionMismatch(SemasError):
    pass


class UnfittedMember(SemasError):
    pass


class InvalidNu(SemasError):
    pass


class TooFewNeighbors(SemasError):
    pass


class DegenerateCovariance(SemasError):
    pass


# -- consensus --
class InvalidPolicy(SemasError):
    pass


class NoAlert(SemasError):
    pass


class EmptyCandidates(SemasError):
    pass


# -- neural --
class ShapeMismatch(SemasError):
    pass


class NoCache(SemasError):
    pass


class EmptyDataset(SemasError):
    pass


# -- rul --
class Untrained(SemasError):
    pass


class WrongWindowLength(SemasError):
    pass


# -- evolve --
class LengthMismatch(SemasError):
    pass


class EmptyBuffer(SemasError):
    pass


class TooManyFeatures(SemasError):
    pass


class InsufficientHistory(SemasError):
    pass


# -- federate --
class EmptyRound(SemasError):
    pass


class AllZeroCounts(SemasError):
    pass


# -- baselines --
class AllZeroPerformance(SemasError):
    pass


# -- metrics --
class TooFewSamples(SemasError):
    pass


class TooFewIterations(SemasError):
    pass


# -- cli --
class ConfigError(SemasError):
    pass
