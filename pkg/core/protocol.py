"""Analytic readout distributions of the register measurement

The register result l after Fourier preparation, coupling exp(i r x Upsilon)
and the inverse transform has probability

    P(l) = sqrt(2 pi)/(K+1)^2 sum_{m=-K}^{K} (K+1-|m|) exp(-2 pi i m l/(K+1)) chi(r m)

where chi is the characteristic function of the initial position
distribution.  Everything here works from chi alone; core.oracle checks it
against a full state-vector run.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np

from core.errors import InvalidInputError

logger = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2.0 * math.pi)
CLAMP_TOLERANCE = 1e-12
SUM_TOLERANCE = 1e-10
CHI_TOLERANCE = 1e-8

# Empirical fit constant for the minimum register size at tolerance 0.01
NMIN_OFFSET = 8.14
NMIN_EPSILON = 0.01
VARIANCE_MAX = 10.0


class LambDickeStatus(Enum):
    """Outcome of the Lamb-Dicke validity check"""
    PASS = "pass"
    WARNING = "warning"


@dataclass(frozen=True)
class LambDickeResult:
    """Position spread compared with the Lamb-Dicke bound sqrt(N)/eta"""
    status: LambDickeStatus
    ratio: float  # sqrt(Delta) / (sqrt(N)/eta)
    margin: float

    @property
    def passed(self) -> bool:
        return self.status is LambDickeStatus.PASS


@dataclass(frozen=True, eq=False)
class ReadoutDistribution:
    """Probabilities P(l), l = 0..K.

    A truncated series (truncation_order set) may keep negative ripple of
    the size of its tail bound; exact distributions only tolerate
    floating-point residues, which are clamped to 0.
    """
    probs: np.ndarray
    truncation_order: Optional[int] = None

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        size = probs.size
        if probs.ndim != 1 or size < 2 or size & (size - 1):
            raise InvalidInputError(f"readout needs 2^N >= 2 entries, got shape {probs.shape}")
        residue = (probs < 0) & (probs >= -CLAMP_TOLERANCE)
        probs[residue] = 0.0
        if self.truncation_order is None and np.any(probs < 0):
            raise InvalidInputError(f"negative probability {probs.min():.3g} in readout")
        total = float(probs.sum())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise InvalidInputError(f"readout probabilities sum to {total!r}")
        probs.setflags(write=False)
        object.__setattr__(self, 'probs', probs)

    @property
    def size(self) -> int:
        """K + 1"""
        return self.probs.size

    @property
    def n_qubits(self) -> int:
        return self.probs.size.bit_length() - 1


@dataclass(frozen=True, eq=False)
class MappedDistribution:
    """Readout probabilities placed at dimensionless positions x"""
    x: np.ndarray
    probs: np.ndarray
    labels: np.ndarray  # register result l behind each point

    def __post_init__(self):
        if not (len(self.x) == len(self.probs) == len(self.labels)):
            raise InvalidInputError("x, probs and labels must have equal length")
        if np.any(np.diff(self.x) <= 0):
            raise InvalidInputError("mapped x values must be strictly increasing")
        if abs(float(np.sum(self.probs)) - 1.0) > SUM_TOLERANCE:
            raise InvalidInputError("mapped probabilities must sum to 1")


def _register_size(n_qubits: int) -> int:
    if not isinstance(n_qubits, (int, np.integer)) or n_qubits < 1:
        raise InvalidInputError(f"n_qubits must be a positive integer, got {n_qubits!r}")
    return 2 ** int(n_qubits)


def _check_variance(variance: float) -> None:
    if not variance > 0 or not math.isfinite(variance):
        raise InvalidInputError(f"variance must be positive, got {variance}")


def _evaluate_chi(chi: Callable, args: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(chi(args), dtype=complex)
        if values.shape == args.shape:
            return values
    except (TypeError, ValueError):
        pass
    return np.array([chi(float(a)) for a in args], dtype=complex)


def readout_distribution(chi: Callable, n_qubits: int, r: float = 1.0) -> ReadoutDistribution:
    """P(l) for every l from the characteristic function.

    The double sum over k, k' only depends on m = k - k', weighted by the
    K+1-|m| pairs sharing it; folding m onto 0..K turns it into one FFT.
    """
    size = _register_size(n_qubits)
    K = size - 1
    m = np.arange(-K, K + 1)
    values = _evaluate_chi(chi, r * m.astype(float))

    if abs(values[K] - 1.0 / SQRT_2PI) > CHI_TOLERANCE:
        raise InvalidInputError(
            f"chi(0) = {values[K]:.10g}, expected 1/sqrt(2 pi) for a normalized state"
        )
    asymmetry = np.max(np.abs(values[::-1] - np.conj(values)))
    if asymmetry > CHI_TOLERANCE:
        raise InvalidInputError(f"chi violates chi(-k) = conj(chi(k)) by {asymmetry:.3g}")

    weighted = (size - np.abs(m)) * values
    folded = np.empty(size, dtype=complex)
    folded[0] = weighted[K]
    folded[1:] = weighted[K + 1:] + weighted[:K]

    probs = np.fft.fft(folded) * SQRT_2PI / size ** 2
    residue = float(np.max(np.abs(probs.imag)))
    if residue > SUM_TOLERANCE:
        logger.warning("Readout carries imaginary residue %.3g", residue)
    return ReadoutDistribution(probs.real)


def truncation_order(variance: float, epsilon: float, n_qubits: Optional[int] = None) -> int:
    """Smallest m with exp(-m^2 Delta/2) <= epsilon, capped at K"""
    _check_variance(variance)
    if not 0.0 < epsilon < 1.0:
        raise InvalidInputError(f"epsilon must lie in (0, 1), got {epsilon}")
    exact = math.sqrt(2.0 * math.log(1.0 / epsilon) / variance)
    order = max(1, math.ceil(exact - 1e-9))
    if n_qubits is not None:
        order = min(order, _register_size(n_qubits) - 1)
    return order


def truncation_error_bound(variance: float, n_qubits: int, order: int) -> float:
    """Largest per-entry change from dropping the terms m > order"""
    size = _register_size(n_qubits)
    m = np.arange(order + 1, size)
    return float(2.0 / size ** 2 * np.sum((size - m) * np.exp(-0.5 * variance * m ** 2)))


def readout_distribution_gaussian(variance: float, n_qubits: int,
                                  epsilon: Optional[float] = None) -> ReadoutDistribution:
    """Closed form for a zero-mean minimum-uncertainty Gaussian with r = 1.

    P(l) = 1/(K+1) [1 + 2/(K+1) sum_{m=1}^{m_trunc} (K+1-m) cos(2 pi m l/(K+1)) exp(-m^2 Delta/2)]

    epsilon=None keeps every term up to K.
    """
    _check_variance(variance)
    size = _register_size(n_qubits)
    K = size - 1
    order = K if epsilon is None else truncation_order(variance, epsilon, n_qubits)

    m = np.arange(1, order + 1)
    series = np.zeros(size)
    series[1:order + 1] = (size - m) * np.exp(-0.5 * variance * m ** 2)
    cosine_sum = np.fft.fft(series).real

    probs = (1.0 + 2.0 / size * cosine_sum) / size
    truncated = order < K
    if truncated:
        logger.debug("Gaussian readout for variance %g truncated at m=%d of %d",
                     variance, order, K)
        if probs.min() < -CLAMP_TOLERANCE:
            logger.debug("Truncation ripple reaches %.3g", probs.min())
    return ReadoutDistribution(probs, truncation_order=order if truncated else None)


def label_positions(size: int, reflect: bool = True, r: float = 1.0) -> np.ndarray:
    """Dimensionless position of each result l = 0..size-1.

    x = 2 pi l/(r 2^N); with reflect, l > K/2 maps to 2 pi (l - 2^N)/(r 2^N).
    """
    if not r > 0:
        raise InvalidInputError(f"mapping needs a positive coupling, got r={r}")
    labels = np.arange(size)
    if reflect:
        labels = np.where(labels > (size - 1) / 2.0, labels - size, labels)
    return 2.0 * math.pi * labels / (size * r)


def reflect_and_map(dist: ReadoutDistribution, reflect: bool = True,
                    r: float = 1.0) -> MappedDistribution:
    """Readout placed on the position axis, sorted by x"""
    labels = np.arange(dist.size)
    x = label_positions(dist.size, reflect, r)
    order = np.argsort(x, kind="stable")
    return MappedDistribution(x=x[order], probs=np.asarray(dist.probs)[order],
                              labels=labels[order])


def estimate_moments(mapped: MappedDistribution) -> Tuple[float, float]:
    """(mean, variance) of the mapped distribution"""
    mean = float(np.sum(mapped.probs * mapped.x))
    variance = float(np.sum(mapped.probs * mapped.x ** 2) - mean ** 2)
    return mean, variance


def n_min(variance: float) -> int:
    """Fewest ions resolving a position variance at tolerance 0.01"""
    _check_variance(variance)
    return max(1, math.floor(NMIN_OFFSET - 0.5 * math.log2(variance) + 0.5))


def min_resolvable_variance(n_qubits: int) -> float:
    """Smallest variance an N-ion register resolves; inverse of n_min"""
    _register_size(n_qubits)
    return 2.0 ** (2.0 * (NMIN_OFFSET - n_qubits))


def lamb_dicke_check(variance: float, n_qubits: int, eta: float,
                     margin: float = 0.1) -> LambDickeResult:
    """Compare sqrt(Delta) with margin * sqrt(N)/eta"""
    if not variance >= 0:
        raise InvalidInputError(f"variance must be non-negative, got {variance}")
    _register_size(n_qubits)
    if not eta > 0:
        raise InvalidInputError(f"eta must be positive, got {eta}")
    ratio = math.sqrt(variance) * eta / math.sqrt(n_qubits)
    if ratio <= margin:
        return LambDickeResult(LambDickeStatus.PASS, ratio, margin)
    logger.warning("Position spread %.4g exceeds %.3g of the Lamb-Dicke bound %.4g",
                   math.sqrt(variance), margin, math.sqrt(n_qubits) / eta)
    return LambDickeResult(LambDickeStatus.WARNING, ratio, margin)


def upper_variance_limit() -> float:
    """Variance above which P(l) is flat and carries no position information"""
    return VARIANCE_MAX


def flat_regime(variance: float) -> bool:
    return variance >= upper_variance_limit()


def variance_scan(variance: float, n_range: range,
                  epsilon: Optional[float] = NMIN_EPSILON) -> List[Tuple[int, float]]:
    """Estimated position variance of the mapped readout for each register size"""
    rows = []
    for n_qubits in n_range:
        dist = readout_distribution_gaussian(variance, n_qubits, epsilon)
        _, estimate = estimate_moments(reflect_and_map(dist))
        rows.append((n_qubits, estimate))
        logger.debug("N=%d: estimated variance %.6g", n_qubits, estimate)
    return rows


def continuum_deviation(mapped: MappedDistribution, variance: float,
                        mean_x: float = 0.0) -> float:
    """Max gap between the readout density P(l)(K+1)/(2 pi) and the Gaussian P(x)"""
    _check_variance(variance)
    density = mapped.probs * len(mapped.probs) / (2.0 * math.pi)
    reference = np.exp(-(mapped.x - mean_x) ** 2 / (2.0 * variance)) / math.sqrt(
        2.0 * math.pi * variance)
    return float(np.max(np.abs(density - reference)))
