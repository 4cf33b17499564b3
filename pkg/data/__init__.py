"""Data records for the register measurement simulator"""

from .models import CommandName, RunManifest

__all__ = ['CommandName', 'RunManifest']
