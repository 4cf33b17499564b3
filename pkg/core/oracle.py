"""Brute-force joint state-vector simulation of the measurement protocol

Every register branch carries a full mode wavefunction, so memory grows as
2^N times the grid size.  Used as ground truth for core.protocol.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, TYPE_CHECKING

import numpy as np

from core.cvmode import (
    Grid, ModeState, momentum_support, position_distribution, rotate_quadrature,
    shift_momentum, characteristic_function,
)
from core.errors import DomainCoverageError, InvalidInputError, OracleCapError
from core.protocol import ReadoutDistribution, readout_distribution
from core.register import Direction, prepare_fourier_zero, qft_apply

if TYPE_CHECKING:
    from config.settings import ProtocolConfig

logger = logging.getLogger(__name__)

JOINT_NORM_TOLERANCE = 1e-9
EMPTY_BRANCH_NORM = 1e-15


@dataclass(frozen=True, eq=False)
class JointState:
    """Mode wavefunction psi_l(p) entangled with each register state |l>"""
    n_qubits: int
    grid: Grid
    branches: np.ndarray  # shape (2^N, n_points)

    def __post_init__(self):
        branches = np.array(self.branches, dtype=complex)
        expected = (2 ** self.n_qubits, self.grid.n_points)
        if branches.shape != expected:
            raise InvalidInputError(f"expected branch array {expected}, got {branches.shape}")
        norm = float(np.sum(np.abs(branches) ** 2) * self.grid.dp)
        if abs(norm - 1.0) > JOINT_NORM_TOLERANCE:
            raise InvalidInputError(f"joint state norm drifted to {norm!r}")
        branches.setflags(write=False)
        object.__setattr__(self, 'branches', branches)

    @property
    def size(self) -> int:
        return 2 ** self.n_qubits


@dataclass(frozen=True)
class ConditionalState:
    """Mode state left behind by register result l"""
    label: int
    probability: float
    state: Optional[ModeState]  # None when the branch is empty

    @property
    def is_empty(self) -> bool:
        return self.state is None


def _check_cap(config: 'ProtocolConfig') -> None:
    if config.n_qubits > config.max_oracle_qubits:
        raise OracleCapError(
            f"oracle limited to {config.max_oracle_qubits} qubits, "
            f"asked for {config.n_qubits}"
        )


def measured_mode(initial_mode: ModeState, config: 'ProtocolConfig') -> ModeState:
    """Input mode as seen by a coupling along the theta quadrature"""
    if config.theta:
        return rotate_quadrature(initial_mode, config.theta)
    return initial_mode


def _couple_and_mix(mode: ModeState, config: 'ProtocolConfig') -> JointState:
    n_qubits = config.n_qubits
    grid = mode.grid
    K = 2 ** n_qubits - 1

    lo, hi = momentum_support(mode)
    largest = config.r * K
    if hi + largest > grid.p_max:
        raise DomainCoverageError(
            f"coupling shifts momentum by up to {largest:.6g}; grid ends at "
            f"{grid.p_max:.6g} but needs p_max={hi + largest:.6g}",
            required_p_min=lo, required_p_max=hi + largest,
        )

    # first step: pi/2 pulses prepare the Fourier zero state
    register = prepare_fourier_zero(n_qubits)

    # second step: exp(i r x Upsilon) shifts branch k by r k in momentum
    branches = np.empty((K + 1, grid.n_points), dtype=complex)
    for k in range(K + 1):
        branches[k] = register.amplitudes[k] * shift_momentum(mode, config.r * k).psi_p

    # third step: inverse transform on the register mixes the branches
    branches = qft_apply(branches, Direction.INVERSE, axis=0)
    logger.debug("Joint state for N=%d on %d grid points", n_qubits, grid.n_points)
    return JointState(n_qubits, grid, branches)


def run_protocol(initial_mode: ModeState, config: 'ProtocolConfig') -> JointState:
    """Prepare, couple and inverse-transform; returns the pre-readout joint state"""
    _check_cap(config)
    return _couple_and_mix(measured_mode(initial_mode, config), config)


def total_norm(joint: JointState) -> float:
    return float(np.sum(np.abs(joint.branches) ** 2) * joint.grid.dp)


def branch_probabilities(joint: JointState) -> np.ndarray:
    """Squared norm of every branch"""
    return np.sum(np.abs(joint.branches) ** 2, axis=1) * joint.grid.dp


def readout_from_joint(joint: JointState) -> ReadoutDistribution:
    """P(l) read off the joint state"""
    probs = branch_probabilities(joint)
    return ReadoutDistribution(probs / probs.sum())


def conditional_state(joint: JointState, label: int) -> ConditionalState:
    """Normalized mode state after register result l, with its probability"""
    if not 0 <= label < joint.size:
        raise InvalidInputError(f"result l={label} outside 0..{joint.size - 1}")
    branch = joint.branches[label]
    probability = float(np.sum(np.abs(branch) ** 2) * joint.grid.dp)
    if probability < EMPTY_BRANCH_NORM:
        return ConditionalState(label, 0.0, None)
    return ConditionalState(label, probability,
                            ModeState(joint.grid, branch / np.sqrt(probability)))


def conditional_position(joint: JointState, label: int) -> Tuple[np.ndarray, np.ndarray]:
    """Position distribution of the conditional mode state"""
    outcome = conditional_state(joint, label)
    if outcome.is_empty:
        return joint.grid.x, np.zeros(joint.grid.n_points)
    return position_distribution(outcome.state)


def oracle_vs_analytic(initial_mode: ModeState, config: 'ProtocolConfig',
                       reference: Optional[ReadoutDistribution] = None) -> float:
    """max_l |P_oracle(l) - P_analytic(l)|.

    Without a reference the analytic side is the characteristic-function
    route evaluated on the same (rotated) input mode.
    """
    _check_cap(config)
    mode = measured_mode(initial_mode, config)
    oracle = readout_from_joint(_couple_and_mix(mode, config))
    if reference is None:
        reference = readout_distribution(
            lambda k: characteristic_function(mode, k), config.n_qubits, config.r)
    if reference.size != oracle.size:
        raise InvalidInputError("reference distribution has the wrong register size")
    error = float(np.max(np.abs(oracle.probs - reference.probs)))
    logger.info("Oracle vs analytic for N=%d: max error %.3g", config.n_qubits, error)
    return error
