"""Manifest contracts with refinement intersection types."""

__version__ = "0.1.0"
