class PowerGameError(Exception):
    pass


class ConfigurationError(PowerGameError):
    pass


class CoincidentNodesError(PowerGameError):
    """Two positions coincide, so a path-loss gain is undefined."""

    def __init__(self, pairs):
        self.pairs = pairs
        super().__init__(f"Coincident positions for {len(pairs)} transmitter/receiver pairs")


class RoutingError(PowerGameError):
    pass


class ReceiverError(PowerGameError):
    pass


class SingularSpreadingError(ReceiverError):
    pass


class SolverError(PowerGameError):
    def __init__(self, message, condition_number=None):
        self.condition_number = condition_number
        if condition_number is not None:
            message = f"{message} (condition number {condition_number:.3e})"
        super().__init__(message)


class DegenerateEfficiencyError(PowerGameError):
    pass


class InfeasibleSinrError(PowerGameError):
    def __init__(self, message, sinr=None):
        self.sinr = sinr
        super().__init__(message)


class FixedPointError(PowerGameError):
    def __init__(self, message, trace=None):
        self.trace = list(trace or [])
        super().__init__(f"{message} after {len(self.trace)} iterations")


class OutputError(PowerGameError):
    def __init__(self, path, error):
        self.path = str(path)
        super().__init__(f"Cannot write {self.path}: {error}")
