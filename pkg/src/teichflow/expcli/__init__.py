"""Command-line front end and experiment orchestration."""
from .config import ConfigError, config_hash, load, resolve
from .cli import main

__all__ = ["ConfigError", "config_hash", "load", "resolve", "main"]
