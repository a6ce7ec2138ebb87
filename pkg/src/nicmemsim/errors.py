"""Exception hierarchy for the simulator."""


class ModelError(Exception):
    """Base class for every error raised by nicmemsim."""


class ConfigError(ModelError):
    """A scenario or calibration description is malformed."""


class CapExceeded(ConfigError):
    """The link's effective cap is larger than its raw lane aggregate."""


class IncompatibleEngine(ConfigError):
    """Engine kind does not fit the platform (RDMA on FPGA or DMA on SoC)."""


class NonPositiveRate(ConfigError):
    pass


class UnknownGeneration(ConfigError):
    pass


class CapacityExceeded(ModelError):
    """A transfer runs past the end of the memory endpoint."""

    def __init__(self, overflow: int, capacity: int):
        super().__init__(f"transfer overflows endpoint capacity {capacity} B by {overflow} B")
        self.overflow = overflow
        self.capacity = capacity


class EmptyPlan(ModelError):
    pass


class InvariantViolation(ModelError):
    """Internal consistency guard tripped inside the event simulator."""


class NoReferencePoints(ModelError):
    pass


class Unidentifiable(ModelError):
    def __init__(self, params):
        self.params = list(params)
        super().__init__("objective is flat across the bounds of: " + ", ".join(self.params))


class MissingCoverage(ModelError):
    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__("results do not cover reference points: " + "; ".join(self.missing))


class EmptyReport(ModelError):
    pass
