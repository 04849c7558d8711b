"""Exception types raised across the package."""


class MultiplicityError(ValueError):
    """Base class for all errors raised by this package."""


class InputError(MultiplicityError):
    """Malformed or inconsistent input data."""


class ComputationError(MultiplicityError):
    """Well-formed input on which a requested quantity is undefined."""


# core
class MisalignedIds(InputError):
    pass


class EmptySet(InputError):
    pass


class LabelOutOfRange(InputError):
    pass


class NotScoreMode(InputError):
    pass


class ModeMismatch(InputError):
    pass


class ParseError(InputError):
    """A prediction, truth or metadata file could not be parsed.

    ``line`` is the 1-based line number of the offending row, when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


# metrics / ensemble
class UnknownModelId(InputError):
    pass


class TauOutOfRange(InputError):
    pass


class OverlappingEntities(InputError):
    pass


class SizeMismatch(InputError):
    pass


class InsufficientModels(InputError):
    pass


class SampleOutOfRange(InputError):
    pass


class MissingValMetric(InputError):
    pass


class UnknownStrategy(InputError):
    pass


class DegenerateClass(ComputationError):
    pass


# stats
class ZeroVariance(ComputationError):
    pass


class InsufficientData(ComputationError):
    pass


class EmptyInput(ComputationError):
    pass


# synth / kde
class InvalidConfig(InputError):
    pass


class DegenerateSpread(ComputationError):
    pass
