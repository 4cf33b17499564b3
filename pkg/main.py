#!/usr/bin/env python3
"""
Ion-register quadrature measurement simulator
Main entry point
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from cli.commands import main


if __name__ == "__main__":
    sys.exit(main())
