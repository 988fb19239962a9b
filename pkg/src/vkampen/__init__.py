"""Exact van Kampen obstruction computations for finite complexes and towers of compacta."""

__version__ = "0.1.0"
