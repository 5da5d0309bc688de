"""LGCP Duplicates - minimum contrast estimation for point patterns with snapped duplicates."""

__version__ = "0.1.0"
