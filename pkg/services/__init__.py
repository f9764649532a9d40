"""Checkers, constructions and transforms over the model types."""
from services.config_manager import ConfigManager

__all__ = [
    'ConfigManager'
]
