"""Entropic certainty relations for mutually unbiased bases."""

__version__ = "0.1.0"
