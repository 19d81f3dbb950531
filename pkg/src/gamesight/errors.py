"""Exception types shared across the package."""


class GamesightError(Exception):
    """Base class for all package errors."""


class InvalidGeometry(GamesightError):
    """Visual-angle conversion asked for something physically meaningless."""


class InvalidIntensity(GamesightError):
    """Stimulus intensity outside the channel's physical bounds."""


class AmbientTooBright(GamesightError):
    """Scotopic probe requested while the room is not dark."""


class GamutExceeded(GamesightError):
    """Requested color excursion leaves the displayable RGB cube."""


class InfeasibleStimulus(GamesightError):
    """Stimulus cannot be rendered (critical feature below one pixel)."""


class DuplicateTrial(GamesightError):
    """Trial id was already recorded in this session."""


class UnknownChannel(GamesightError):
    """Trial references a channel the session has no staircase for."""


class InsufficientData(GamesightError):
    """Not enough trials, levels or bins to run an estimator."""


class OutOfOrder(GamesightError):
    """Series update with a timestamp not after the last point."""


class NotFound(GamesightError):
    """Unknown child or resource."""


class BadRequest(GamesightError):
    """Payload fails schema validation."""


class ReplayError(GamesightError):
    """Event log line cannot be parsed."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason
