"""Core simulation for the ion-register quadrature measurement"""

from .errors import SimulationError, InvalidInputError, DomainCoverageError, OracleCapError
from .register import RegisterState, Direction
from .cvmode import Grid, GridPolicy, GaussianSpec, ModeState
from .protocol import ReadoutDistribution, MappedDistribution, LambDickeStatus
from .oracle import JointState, ConditionalState

__all__ = [
    'SimulationError',
    'InvalidInputError',
    'DomainCoverageError',
    'OracleCapError',
    'RegisterState',
    'Direction',
    'Grid',
    'GridPolicy',
    'GaussianSpec',
    'ModeState',
    'ReadoutDistribution',
    'MappedDistribution',
    'LambDickeStatus',
    'JointState',
    'ConditionalState'
]
