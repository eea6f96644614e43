"""Exception hierarchy shared across the toolkit."""


class GtcError(Exception):
    """Base class for all toolkit errors."""


class RankError(GtcError):
    """Word rank does not match the alphabet it is used against."""


class RangeError(GtcError):
    """Empty or invalid length range."""


class ParseError(GtcError):
    """Malformed word, element, or file input."""


class MoveError(GtcError):
    """Illegal presentation move (precondition violated)."""


class SetupError(GtcError):
    """Protocol setup assumption violated (e.g. subgroups do not commute)."""


class SamplingError(GtcError):
    """Rejection sampling exhausted its retry budget."""


class KeygenError(GtcError):
    """Key generation input invalid (e.g. images do not satisfy relators)."""


class LengthError(GtcError):
    """Could not produce a word inside the requested length range."""


class BoundError(GtcError):
    """Enumeration would exceed the configured guard."""


class AttackFailed(GtcError):
    """An attack's precondition does not hold on the given instance."""
