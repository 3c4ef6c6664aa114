"""Bound-state laboratory - counting bound states of fractional Schrödinger operators."""

__version__ = "0.1.0"

# Re-export shared modules for absolute imports
from boundstate_lab import constants, exceptions, types

__all__ = [
    "__version__",
    "constants",
    "exceptions",
    "types",
]
