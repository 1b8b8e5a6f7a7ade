"""Cartesian and recurrent Cartesian genetic programming classifiers."""

__version__ = "0.1.0"
