"""Run records for the command-line surface"""

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional


class CommandName(Enum):
    """Subcommands that write a run manifest"""
    DISTRIBUTION = "distribution"
    VARIANCE_SCAN = "variance-scan"
    NMIN = "nmin"
    SAMPLE = "sample"
    ORACLE_CHECK = "oracle-check"


@dataclass
class RunManifest:
    """Everything needed to reproduce one command run"""
    command: CommandName
    config: Dict[str, Any] = field(default_factory=dict)
    arguments: Dict[str, Any] = field(default_factory=dict)
    tool_version: str = ""
    outputs: List[str] = field(default_factory=list)
    timestamp: Optional[str] = None

    def stamp(self) -> None:
        """Record the current UTC time"""
        self.timestamp = datetime.now(timezone.utc).isoformat(timespec='seconds')

    def to_dict(self) -> Dict[str, Any]:
        """Convert manifest to dictionary"""
        return {
            'command': self.command.value,
            'config': self.config,
            'arguments': self.arguments,
            'tool_version': self.tool_version,
            'outputs': list(self.outputs),
            'timestamp': self.timestamp
        }

    def reproducible_dict(self) -> Dict[str, Any]:
        """Manifest contents that must match between identical runs"""
        data = self.to_dict()
        data.pop('timestamp')
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunManifest':
        return cls(
            command=CommandName(data['command']),
            config=data.get('config', {}),
            arguments=data.get('arguments', {}),
            tool_version=data.get('tool_version', ""),
            outputs=list(data.get('outputs', [])),
            timestamp=data.get('timestamp')
        )
