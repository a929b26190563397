"""Exception hierarchy shared by every pirlab module."""


class PirlabError(Exception):
    """Base class for all data errors raised by pirlab."""


class InvalidArgumentError(PirlabError, ValueError):
    pass


class InvalidStateError(PirlabError, RuntimeError):
    pass


class LevelUnreachableError(PirlabError, ValueError):
    """A pattern level above the structural level of the sign sequence was requested."""


class DegenerateInstanceError(PirlabError, ValueError):
    pass


class FormatError(PirlabError, ValueError):
    """An instance or hierarchy file could not be parsed or failed validation."""


class ConsistencyError(PirlabError, AssertionError):
    pass


class RankDeficientError(PirlabError, ValueError):
    pass
