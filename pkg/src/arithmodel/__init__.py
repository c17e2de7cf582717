"""Arithmetic topological models of irrationally indifferent attractors."""

__version__ = "0.1.0"
