"""Protocol settings management"""

import json
import logging
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Dict, Any, Optional

from core.cvmode import GridPolicy
from core.errors import InvalidInputError

logger = logging.getLogger(__name__)


@dataclass
class ProtocolConfig:
    """Settings of one measurement run"""
    n_qubits: int = 9
    r: float = 1.0  # coupling strength
    epsilon: float = 0.01  # truncation tolerance
    theta: float = 0.0  # quadrature angle, radians
    eta: Optional[float] = None  # Lamb-Dicke parameter
    seed: int = 0

    # Advanced Settings
    lamb_dicke_margin: float = 0.1
    max_oracle_qubits: int = 8
    grid: GridPolicy = field(default_factory=GridPolicy)

    def __post_init__(self):
        if isinstance(self.grid, dict):
            self.grid = GridPolicy(**self.grid)
        if not isinstance(self.n_qubits, int) or isinstance(self.n_qubits, bool) \
                or self.n_qubits < 1:
            raise InvalidInputError(f"n_qubits must be a positive integer, got {self.n_qubits!r}")
        # r = 0 is the uncoupled control run
        if not math.isfinite(self.r) or self.r < 0:
            raise InvalidInputError(f"coupling r must be >= 0, got {self.r}")
        if not 0.0 < self.epsilon < 1.0:
            raise InvalidInputError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not math.isfinite(self.theta):
            raise InvalidInputError("theta must be finite")
        if self.eta is not None and self.eta <= 0:
            raise InvalidInputError(f"eta must be positive, got {self.eta}")
        if self.lamb_dicke_margin <= 0:
            raise InvalidInputError("lamb_dicke_margin must be positive")
        if self.max_oracle_qubits < 1:
            raise InvalidInputError("max_oracle_qubits must be positive")

    @property
    def register_size(self) -> int:
        """K + 1 = 2^N basis states"""
        return 2 ** self.n_qubits

    def to_dict(self) -> Dict[str, Any]:
        """Convert settings to dictionary"""
        return {
            'n_qubits': self.n_qubits,
            'r': self.r,
            'epsilon': self.epsilon,
            'theta': self.theta,
            'eta': self.eta,
            'seed': self.seed,
            'lamb_dicke_margin': self.lamb_dicke_margin,
            'max_oracle_qubits': self.max_oracle_qubits,
            'grid': self.grid.to_dict()
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ProtocolConfig':
        """Build settings from a dictionary, ignoring unknown keys"""
        known = {f.name for f in fields(cls)}
        return cls(**{key: value for key, value in data.items() if key in known})

    @classmethod
    def load(cls, settings_file: str) -> 'ProtocolConfig':
        """Load settings from a JSON file"""
        path = Path(settings_file)
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        logger.debug("Loaded protocol settings from %s", path)
        return cls.from_dict(data)

    def save(self, settings_file: str) -> None:
        """Save settings to a JSON file"""
        with open(settings_file, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2, ensure_ascii=False)
