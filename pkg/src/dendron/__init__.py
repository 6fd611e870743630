"""Set-level operadic combinatorics: trees, forests, operads, nerves."""

__version__ = "0.1.0"
