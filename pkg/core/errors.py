"""Exception hierarchy for the simulator"""


class SimulationError(Exception):
    """Base class for all simulator errors"""


class InvalidInputError(SimulationError, ValueError):
    """A precondition on an argument was violated"""


class DomainCoverageError(SimulationError, ValueError):
    """A wavefunction no longer fits on its momentum grid"""

    def __init__(self, message: str, required_p_min: float = None,
                 required_p_max: float = None):
        super().__init__(message)
        self.required_p_min = required_p_min
        self.required_p_max = required_p_max


class OracleCapError(InvalidInputError):
    """The brute-force oracle was asked for more qubits than its cap"""
