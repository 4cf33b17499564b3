"""Electronic register of N two-level ions

The register basis |k> is labelled by the integer whose binary code is the
string of ion states, ion 1 being the least significant bit.  The Fourier
basis |l~> is reached with the discrete Fourier transform; the Upsilon
operator sum_k k|k><k| is diagonal in the energy basis.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, TYPE_CHECKING

import numpy as np

from core.errors import InvalidInputError

if TYPE_CHECKING:
    from core.protocol import ReadoutDistribution

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-12


class Direction(Enum):
    """Direction of the register Fourier transform"""
    FORWARD = "forward"
    INVERSE = "inverse"


@dataclass(frozen=True, eq=False)
class RegisterState:
    """Unit-norm amplitude vector over the 2^N register basis states"""
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise InvalidInputError(f"n_qubits must be >= 1, got {self.n_qubits}")
        amplitudes = np.array(self.amplitudes, dtype=complex)
        if amplitudes.shape != (2 ** self.n_qubits,):
            raise InvalidInputError(
                f"expected {2 ** self.n_qubits} amplitudes, got shape {amplitudes.shape}"
            )
        norm = float(np.sum(np.abs(amplitudes) ** 2))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise InvalidInputError(f"register state is not normalized (norm {norm!r})")
        amplitudes.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amplitudes)

    @property
    def size(self) -> int:
        """K + 1"""
        return 2 ** self.n_qubits

    def probabilities(self) -> np.ndarray:
        """Born-rule probabilities of the energy basis states"""
        return np.abs(self.amplitudes) ** 2


def _check_n_qubits(n_qubits: int) -> None:
    if not isinstance(n_qubits, (int, np.integer)) or n_qubits < 1:
        raise InvalidInputError(f"n_qubits must be a positive integer, got {n_qubits!r}")


def encode_bits(bits: Sequence[int]) -> int:
    """Binary code k = sum_i S_i 2^(i-1) of an ordered list of ion states"""
    k = 0
    for i, bit in enumerate(bits):
        if bit not in (0, 1):
            raise InvalidInputError(f"ion {i + 1} has non-binary state {bit!r}")
        k += int(bit) << i
    return k


def decode_bits(k: int, n_qubits: int) -> List[int]:
    """Inverse of encode_bits"""
    _check_n_qubits(n_qubits)
    if not 0 <= k < 2 ** n_qubits:
        raise InvalidInputError(f"k={k} outside 0..{2 ** n_qubits - 1}")
    return [(k >> i) & 1 for i in range(n_qubits)]


def basis_state(n_qubits: int, k: int) -> RegisterState:
    """Energy eigenstate |k>"""
    _check_n_qubits(n_qubits)
    if not 0 <= k < 2 ** n_qubits:
        raise InvalidInputError(f"k={k} outside 0..{2 ** n_qubits - 1}")
    amplitudes = np.zeros(2 ** n_qubits, dtype=complex)
    amplitudes[k] = 1.0
    return RegisterState(n_qubits, amplitudes)


def prepare_fourier_zero(n_qubits: int) -> RegisterState:
    """State after a pi/2 pulse on every ion: the uniform superposition |0~>"""
    _check_n_qubits(n_qubits)
    size = 2 ** n_qubits
    return RegisterState(n_qubits, np.full(size, 1.0 / np.sqrt(size), dtype=complex))


def qft_apply(array: np.ndarray, direction: Direction, axis: int = 0) -> np.ndarray:
    """Apply the unitary register transform along one axis of an array.

    FORWARD maps |l> to (K+1)^(-1/2) sum_k exp(+2 pi i k l/(K+1)) |k>;
    INVERSE is its adjoint.
    """
    if direction is Direction.FORWARD:
        return np.fft.ifft(array, axis=axis, norm="ortho")
    return np.fft.fft(array, axis=axis, norm="ortho")


def qft(state: RegisterState, direction: Direction = Direction.FORWARD) -> RegisterState:
    """Discrete Fourier transform of the register"""
    return RegisterState(state.n_qubits, qft_apply(state.amplitudes, direction))


def qft_matrix(n_qubits: int, direction: Direction = Direction.FORWARD) -> np.ndarray:
    """Dense transform matrix; column l is the image of |l>"""
    _check_n_qubits(n_qubits)
    if n_qubits > 12:
        raise InvalidInputError("dense transform matrices are limited to 12 qubits")
    size = 2 ** n_qubits
    k = np.arange(size)
    sign = 1.0 if direction is Direction.FORWARD else -1.0
    return np.exp(sign * 2j * np.pi * np.outer(k, k) / size) / np.sqrt(size)


def apply_upsilon_phase(state: RegisterState, phase_per_k: float) -> RegisterState:
    """exp(i phase Upsilon): amplitude k picks up exp(i phase k)"""
    k = np.arange(state.size)
    return RegisterState(state.n_qubits, state.amplitudes * np.exp(1j * phase_per_k * k))


def sample_readout(dist: 'ReadoutDistribution', seed: int, n_shots: int) -> np.ndarray:
    """Ideal projective readouts l drawn from a readout distribution"""
    if n_shots < 1:
        raise InvalidInputError(f"n_shots must be positive, got {n_shots}")
    weights = np.clip(np.asarray(dist.probs, dtype=float), 0.0, None)
    weights = weights / weights.sum()
    rng = np.random.default_rng(seed)
    shots = rng.choice(weights.size, size=n_shots, p=weights)
    logger.debug("Drew %d shots over %d outcomes (seed %d)", n_shots, weights.size, seed)
    return shots.astype(np.int64)
