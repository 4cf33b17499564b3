"""Configuration module for the register measurement simulator"""

from .settings import ProtocolConfig, GridPolicy

__version__ = "1.0.0"

__all__ = ['ProtocolConfig', 'GridPolicy', '__version__']
