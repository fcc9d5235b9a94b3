"""Exception hierarchy shared by the handover toolkit."""


class HandoverError(Exception):
    """Base class for every error raised by this package."""


class ParseError(HandoverError, ValueError):
    """A rule, profile, config or CSV text could not be parsed."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class IncompleteRuleBase(HandoverError, ValueError):
    pass


class DuplicateAntecedent(HandoverError, ValueError):
    pass


class ResolutionTooCoarse(HandoverError, ValueError):
    pass


class ZeroMass(HandoverError, ValueError):
    pass


class NonPositiveInput(HandoverError, ValueError):
    pass


class ZeroDenominator(HandoverError, ValueError):
    pass


class NonPositiveSignal(HandoverError, ValueError):
    pass


class InvalidRange(HandoverError, ValueError):
    pass


class MissingProfile(HandoverError, KeyError):
    def __str__(self):
        # KeyError quotes its argument; keep diagnostics readable
        return str(self.args[0]) if self.args else ""


class InvalidSpec(HandoverError, ValueError):
    pass
