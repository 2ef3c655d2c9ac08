"""Exception hierarchy shared by every module."""


class SemiInfError(Exception):
    """Base class; ``module`` names the stage that raised."""

    module = "core"


class ArgumentError(SemiInfError, ValueError):
    pass


class StructuralError(SemiInfError):
    """Inputs that do not fit together (basis mismatch, leakage, bad shape)."""


class InversionError(SemiInfError):
    def __init__(self, msg, directions=()):
        super().__init__(msg)
        self.directions = list(directions)


class WindowError(SemiInfError):
    """An hbar power left the declared window."""


class ConfigurationError(SemiInfError):
    pass


class PreconditionError(SemiInfError):
    pass


class DomainError(SemiInfError):
    pass


class DegreeOverflow(SemiInfError):
    """A polynomial section exceeded its declared degree bound."""


class ParseError(SemiInfError):
    def __init__(self, msg, location=None):
        if location is not None:
            msg = "%s (at %s)" % (msg, location)
        super().__init__(msg)
        self.location = location


class ValidationError(SemiInfError):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report
