"""Utility functions."""

from .config_loader import load_learning_constants, load_system_config, save_system_config, validate_system_config
from .display import Display
from .output_writer import OutputWriter, build_manifest

__all__ = [
    "Display",
    "OutputWriter",
    "build_manifest",
    "load_learning_constants",
    "load_system_config",
    "save_system_config",
    "validate_system_config",
]
