"""docmine: corpus construction and evaluation for explanatory docstrings."""

__version__ = "0.1.0"
