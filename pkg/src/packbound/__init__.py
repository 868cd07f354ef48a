"""Conjectural lower bounds on maximal sphere-packing density from g2-invariant processes."""

__version__ = "0.1.0"
