"""Exact computations with curved DG-categories, their modules, and
Hochschild (co)homology of the first and second kind."""

__version__ = "0.1.0"
