"""Ehrenfeucht-Fraisse games for counting MSO, and the grid class separating it from order-invariant MSO."""

__version__ = "0.1.0"
