"""Vibrational mode wavefunctions on a momentum grid

Conventions: x = a + a^dagger (vacuum position variance 1) and p is the
conjugate variable with [x, p] = i, so exp(i r x)|p> = |p + r>.  A minimum
uncertainty state of position variance Delta has momentum variance
1/(4 Delta).  The position representation is psi(x) = (2 pi)^(-1/2)
integral dp exp(i p x) phi(p), evaluated on the conjugate grid
dx = 2 pi / (n dp) with a discrete Fourier transform.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple, Union

import numpy as np

from core.errors import DomainCoverageError, InvalidInputError

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10
SUPPORT_DENSITY = 1e-14  # |phi|^2 dp below this counts as empty grid
EDGE_MASS_LIMIT = 1e-8
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

ArrayLike = Union[float, Sequence[float], np.ndarray]


@dataclass
class GridPolicy:
    """Sizing rules for momentum grids"""
    sigma_span: float = 8.0  # standard deviations kept on each side
    points_per_sigma: float = 8.0  # dp <= sigma_p / points_per_sigma
    min_points: int = 16
    max_points: int = 2 ** 14
    power_of_two: bool = True

    def __post_init__(self):
        if self.sigma_span <= 0 or self.points_per_sigma <= 0:
            raise InvalidInputError("Grid policy spans must be positive")
        if self.min_points < 16:
            raise InvalidInputError("Grids need at least 16 points")
        if self.max_points < self.min_points:
            raise InvalidInputError("max_points must be >= min_points")

    def to_dict(self) -> dict:
        """Convert policy to dictionary"""
        return {
            'sigma_span': self.sigma_span,
            'points_per_sigma': self.points_per_sigma,
            'min_points': self.min_points,
            'max_points': self.max_points,
            'power_of_two': self.power_of_two
        }


@dataclass(frozen=True)
class Grid:
    """Uniform momentum grid p_j = p_min + j dp"""
    p_min: float
    dp: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 16:
            raise InvalidInputError(f"grid needs at least 16 points, got {self.n_points}")
        if not self.dp > 0:
            raise InvalidInputError(f"grid spacing must be positive, got {self.dp}")

    @property
    def p(self) -> np.ndarray:
        return self.p_min + self.dp * np.arange(self.n_points)

    @property
    def p_max(self) -> float:
        return self.p_min + (self.n_points - 1) * self.dp

    @property
    def dx(self) -> float:
        return 2.0 * math.pi / (self.n_points * self.dp)

    @property
    def x(self) -> np.ndarray:
        """Conjugate position grid, centred on x = 0"""
        return (np.arange(self.n_points) - self.n_points // 2) * self.dx

    def to_dict(self) -> dict:
        return {'p_min': self.p_min, 'dp': self.dp, 'n_points': self.n_points}


@dataclass(frozen=True)
class GaussianSpec:
    """Minimum-uncertainty Gaussian: position variance and phase-space means"""
    variance: float
    mean_x: float = 0.0
    mean_p: float = 0.0

    def __post_init__(self):
        if not self.variance > 0 or not math.isfinite(self.variance):
            raise InvalidInputError(f"variance must be positive, got {self.variance}")

    @property
    def sigma_x(self) -> float:
        return math.sqrt(self.variance)

    @property
    def sigma_p(self) -> float:
        return 0.5 / math.sqrt(self.variance)


@dataclass(frozen=True, eq=False)
class ModeState:
    """Normalized momentum wavefunction phi(p_j) on a grid"""
    grid: Grid
    psi_p: np.ndarray

    def __post_init__(self):
        psi = np.array(self.psi_p, dtype=complex)
        if psi.shape != (self.grid.n_points,):
            raise InvalidInputError(
                f"expected {self.grid.n_points} amplitudes, got shape {psi.shape}"
            )
        norm = float(np.sum(np.abs(psi) ** 2) * self.grid.dp)
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise InvalidInputError(f"mode state is not normalized (norm {norm!r})")
        psi.setflags(write=False)
        object.__setattr__(self, 'psi_p', psi)

    @classmethod
    def from_unnormalized(cls, grid: Grid, psi_p: np.ndarray) -> 'ModeState':
        """Normalize an arbitrary amplitude vector onto the grid"""
        psi = np.asarray(psi_p, dtype=complex)
        norm = math.sqrt(float(np.sum(np.abs(psi) ** 2) * grid.dp))
        if norm == 0.0:
            raise InvalidInputError("cannot normalize a zero wavefunction")
        return cls(grid, psi / norm)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi_p) ** 2) * self.grid.dp)

    def momentum_distribution(self) -> np.ndarray:
        return np.abs(self.psi_p) ** 2


# Grid construction

def _round_points(n: int, policy: GridPolicy) -> int:
    n = max(n, policy.min_points)
    if policy.power_of_two:
        n = 1 << (n - 1).bit_length()
    elif n % 2:
        n += 1
    return n


def auto_grid(spec: GaussianSpec, max_shift: float = 0.0,
              policy: GridPolicy = None, any_rotation: bool = False) -> Grid:
    """Momentum grid holding the state plus momentum shifts up to max_shift.

    With any_rotation the grid is sized for the widest quadrature over all
    phase-space rotations of the state.
    """
    policy = policy or GridPolicy()
    span = policy.sigma_span
    delta = spec.variance

    if any_rotation:
        sigma_x_wide = math.sqrt(max(delta, 1.0 / delta))
        sigma_p_wide = 0.5 * sigma_x_wide
        sigma_x_narrow = math.sqrt(min(delta, 1.0 / delta))
        sigma_p_narrow = 0.5 * sigma_x_narrow
        reach_x = math.hypot(spec.mean_x, 2.0 * spec.mean_p)
        reach_p = math.hypot(spec.mean_p, 0.5 * spec.mean_x)
        p_lo, p_hi = -reach_p - span * sigma_p_wide, reach_p + span * sigma_p_wide
    else:
        sigma_x_wide = sigma_x_narrow = spec.sigma_x
        sigma_p_wide = sigma_p_narrow = spec.sigma_p
        reach_x = abs(spec.mean_x)
        p_lo = spec.mean_p - span * spec.sigma_p
        p_hi = spec.mean_p + span * spec.sigma_p

    p_lo += min(0.0, max_shift)
    p_hi += max(0.0, max_shift)

    # dp resolves the narrowest momentum width and keeps the x window wide enough
    dp = min(sigma_p_narrow / policy.points_per_sigma,
             math.pi / (reach_x + span * sigma_x_wide))
    dx_max = sigma_x_narrow / policy.points_per_sigma
    needed = max(math.ceil((p_hi - p_lo) / dp) + 1,
                 math.ceil(2.0 * math.pi / (dp * dx_max)))
    n_points = _round_points(needed, policy)
    if n_points > policy.max_points:
        raise DomainCoverageError(
            f"grid for p in [{p_lo:.4g}, {p_hi:.4g}] needs {n_points} points "
            f"(cap {policy.max_points}); required p_max={p_hi:.6g}",
            required_p_min=p_lo, required_p_max=p_hi,
        )

    centre = 0.5 * (p_lo + p_hi)
    grid = Grid(p_min=centre - (n_points // 2) * dp, dp=dp, n_points=n_points)
    logger.debug("Grid for variance %g, shift %g: %d points, dp=%.4g, dx=%.4g",
                 delta, max_shift, n_points, dp, grid.dx)
    return grid


# Representation changes

def _kernel_phase(grid: Grid) -> np.ndarray:
    j = np.arange(grid.n_points)
    return np.exp(-2j * math.pi * j * (grid.n_points // 2) / grid.n_points)


def _to_position(grid: Grid, psi_p: np.ndarray) -> np.ndarray:
    x = grid.x
    scale = grid.dp * INV_SQRT_2PI * grid.n_points
    return scale * np.exp(1j * grid.p_min * x) * np.fft.ifft(psi_p * _kernel_phase(grid))


def _to_momentum(grid: Grid, psi_x: np.ndarray) -> np.ndarray:
    x = grid.x
    scale = grid.dx * INV_SQRT_2PI
    return scale * np.conj(_kernel_phase(grid)) * np.fft.fft(np.exp(-1j * grid.p_min * x) * psi_x)


def position_wavefunction(state: ModeState) -> Tuple[np.ndarray, np.ndarray]:
    """(x grid, psi(x)) of a mode state"""
    return state.grid.x, _to_position(state.grid, state.psi_p)


def position_distribution(state: ModeState) -> Tuple[np.ndarray, np.ndarray]:
    """(x grid, P(x)) with sum P(x_j) dx = 1"""
    x, psi_x = position_wavefunction(state)
    return x, np.abs(psi_x) ** 2


# States

def momentum_support(state: ModeState) -> Tuple[float, float]:
    """Momentum interval holding everything above the empty-grid density"""
    occupied = np.nonzero(np.abs(state.psi_p) ** 2 * state.grid.dp > SUPPORT_DENSITY)[0]
    if occupied.size == 0:
        return state.grid.p_min, state.grid.p_min
    p = state.grid.p
    return float(p[occupied[0]]), float(p[occupied[-1]])


def _check_position_window(grid: Grid, centre: float, half_width: float) -> None:
    x = grid.x
    if centre - half_width < x[0] or centre + half_width > x[-1]:
        raise DomainCoverageError(
            f"position window [{x[0]:.4g}, {x[-1]:.4g}] cannot hold "
            f"x in [{centre - half_width:.4g}, {centre + half_width:.4g}]; refine dp"
        )


def gaussian_state(spec: GaussianSpec, grid: Grid) -> ModeState:
    """Minimum-uncertainty Gaussian of position variance spec.variance"""
    sigma_p = spec.sigma_p
    lo = spec.mean_p - 8.0 * sigma_p
    hi = spec.mean_p + 8.0 * sigma_p
    if lo < grid.p_min or hi > grid.p_max:
        raise DomainCoverageError(
            f"grid [{grid.p_min:.4g}, {grid.p_max:.4g}] too narrow for momentum "
            f"support [{lo:.4g}, {hi:.4g}]; required p_max={hi:.6g}",
            required_p_min=lo, required_p_max=hi,
        )
    _check_position_window(grid, spec.mean_x, 8.0 * spec.sigma_x)

    offset = grid.p - spec.mean_p
    psi = np.exp(-offset ** 2 / (4.0 * sigma_p ** 2) - 1j * offset * spec.mean_x)
    return ModeState.from_unnormalized(grid, psi)


def superpose(states: Sequence[ModeState], weights: Sequence[complex]) -> ModeState:
    """Normalized linear combination of states sharing one grid"""
    if len(states) == 0 or len(states) != len(weights):
        raise InvalidInputError("need one weight per state and at least one state")
    grid = states[0].grid
    if any(s.grid != grid for s in states):
        raise InvalidInputError("states must share a grid")
    psi = sum(w * s.psi_p for w, s in zip(weights, states))
    return ModeState.from_unnormalized(grid, psi)


def moments(state: ModeState) -> dict:
    """Position and momentum means and variances"""
    x, prob_x = position_distribution(state)
    prob_p = state.momentum_distribution()
    p = state.grid.p
    mean_x = float(np.sum(x * prob_x) * state.grid.dx)
    mean_p = float(np.sum(p * prob_p) * state.grid.dp)
    return {
        'mean_x': mean_x,
        'var_x': float(np.sum((x - mean_x) ** 2 * prob_x) * state.grid.dx),
        'mean_p': mean_p,
        'var_p': float(np.sum((p - mean_p) ** 2 * prob_p) * state.grid.dp),
    }


# Characteristic function

def characteristic_function(state: ModeState, k: ArrayLike,
                            chunk: int = 256) -> Union[complex, np.ndarray]:
    """chi(k) = (2 pi)^(-1/2) integral exp(i k x) P(x) dx by quadrature on the x grid"""
    x, prob = position_distribution(state)
    weights = prob * state.grid.dx * INV_SQRT_2PI
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    out = np.empty(ks.size, dtype=complex)
    for start in range(0, ks.size, chunk):
        block = ks[start:start + chunk]
        out[start:start + chunk] = np.exp(1j * np.outer(block, x)) @ weights
    if np.ndim(k) == 0:
        return complex(out[0])
    return out.reshape(np.shape(k))


def characteristic_function_autocorrelation(state: ModeState, k: float) -> complex:
    """chi(k) = (2 pi)^(-1/2) integral phi*(p) phi(p - k) dp"""
    shifted = shift_momentum(state, k)
    overlap = np.vdot(state.psi_p, shifted.psi_p) * state.grid.dp
    return complex(overlap * INV_SQRT_2PI)


def gaussian_characteristic(variance: float, mean_x: float = 0.0) -> Callable:
    """Closed-form chi for a Gaussian position distribution"""
    if not variance >= 0:
        raise InvalidInputError(f"variance must be non-negative, got {variance}")

    def chi(k):
        k = np.asarray(k, dtype=float)
        return np.exp(1j * k * mean_x - 0.5 * variance * k ** 2) * INV_SQRT_2PI

    return chi


# Unitary maps

def shift_momentum(state: ModeState, s: float) -> ModeState:
    """phi'(p) = phi(p - s)"""
    if s == 0:
        return state
    grid = state.grid
    lo, hi = momentum_support(state)
    if lo + s < grid.p_min or hi + s > grid.p_max:
        raise DomainCoverageError(
            f"shift by {s:.6g} moves support [{lo:.4g}, {hi:.4g}] off grid "
            f"[{grid.p_min:.4g}, {grid.p_max:.4g}]; required p_max={hi + s:.6g}",
            required_p_min=min(grid.p_min, lo + s), required_p_max=max(grid.p_max, hi + s),
        )

    steps = s / grid.dp
    whole = int(round(steps))
    if abs(steps - whole) < 1e-9:
        if whole == 0:
            # below grid resolution
            return state
        psi = np.zeros_like(state.psi_p)
        if whole > 0:
            psi[whole:] = state.psi_p[:-whole]
        else:
            psi[:whole] = state.psi_p[-whole:]
    else:
        psi_x = _to_position(grid, state.psi_p) * np.exp(1j * s * grid.x)
        psi = _to_momentum(grid, psi_x)
    return ModeState(grid, psi)


def _edge_mass(grid: Grid, psi_p: np.ndarray, psi_x: np.ndarray) -> float:
    band = max(2, grid.n_points // 100)
    prob_p = np.abs(psi_p) ** 2 * grid.dp
    prob_x = np.abs(psi_x) ** 2 * grid.dx
    return float(max(prob_p[:band].sum() + prob_p[-band:].sum(),
                     prob_x[:band].sum() + prob_x[-band:].sum()))


def rotate_quadrature(state: ModeState, theta: float) -> ModeState:
    """Phase-space rotation a -> a exp(-i theta).

    Measuring x after the rotation measures x cos(theta) + 2 p sin(theta) on
    the original state.  Each step of at most pi/4 is the exact three-shear
    factorization exp(-i A x^2) exp(-i B p^2) exp(-i A x^2) with
    A = tan(step/2)/4 and B = sin(step), up to a global phase.
    """
    if theta == 0:
        return state
    grid = state.grid
    n_steps = max(1, math.ceil(abs(theta) / (math.pi / 4)))
    step = theta / n_steps
    x_chirp = np.exp(-1j * math.tan(step / 2) / 4 * grid.x ** 2)
    p_chirp = np.exp(-1j * math.sin(step) * grid.p ** 2)

    psi_p = state.psi_p
    for _ in range(n_steps):
        psi_x = _to_position(grid, psi_p) * x_chirp
        psi_p = _to_momentum(grid, psi_x) * p_chirp
        psi_x = _to_position(grid, psi_p) * x_chirp
        psi_p = _to_momentum(grid, psi_x)
        leaked = _edge_mass(grid, psi_p, psi_x)
        if leaked > EDGE_MASS_LIMIT:
            raise DomainCoverageError(
                f"rotation by {theta:.4g} pushes mass {leaked:.3g} to the grid edge; "
                f"use a grid sized for any rotation"
            )
    logger.debug("Rotated mode by %.6g in %d steps", theta, n_steps)
    return ModeState.from_unnormalized(grid, psi_p)
