"""Exact classification of projectively equivalent tuples of roots of unity."""

__version__ = "0.1.0"
