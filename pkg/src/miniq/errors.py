"""Exception hierarchy shared by all miniq modules.

Every domain error carries the name of the module that raised it so the
CLI can report ``{"error": "Unreachable", "module": "legkin"}``.
"""


class MiniQError(Exception):
    module = "miniq"

    @property
    def name(self):
        return type(self).__name__


class Unreachable(MiniQError, ValueError):
    module = "legkin"


class DegenerateGeometry(MiniQError, ValueError):
    module = "workspace"


class GridMismatch(MiniQError, ValueError):
    module = "workspace"


class InvalidParams(MiniQError, ValueError):
    module = "gait"


class SpeedViolation(MiniQError):
    module = "gait"


class OverTorque(MiniQError):
    module = "sim"


class ParseError(MiniQError, ValueError):
    module = "metrics"


class EmptyLog(MiniQError, ValueError):
    module = "metrics"


class ZeroVelocity(MiniQError, ValueError):
    module = "metrics"


class ConfigError(MiniQError, ValueError):
    module = "cli"
