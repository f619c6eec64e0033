"""Exception hierarchy shared by every module of the package."""


class LineAdditionError(Exception):
    """Base class for all errors raised by this package."""


class NotASimplePath(LineAdditionError):
    """An edge set that should form a single unbranched path does not."""


class DegenerateGeometry(LineAdditionError):
    """Two positions that must be distinct coincide."""


class UnknownStation(LineAdditionError, KeyError):
    """A station id that is not part of the network."""

    def __str__(self) -> str:
        return Exception.__str__(self)


class UncoveredEdge(LineAdditionError):
    """An edge on a path is not served by any line."""


class DegeneratePath(LineAdditionError):
    """A path with fewer than two stations was given a complexity query."""


class UnreachablePair(LineAdditionError):
    """Demand exists between two stations that are not connected."""


class UnknownCostMode(LineAdditionError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class NonPositiveLogOperand(LineAdditionError, ValueError):
    """A log regression scheme was applied to a value <= 0."""


class NoFeasibleLine(LineAdditionError):
    """No candidate line meets the length and circuity constraints."""


class DataError(LineAdditionError, ValueError):
    """Malformed network or demand input files."""


class ConfigError(LineAdditionError, ValueError):
    pass


class MalformedLine(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class MissingKey(ConfigError):
    pass
