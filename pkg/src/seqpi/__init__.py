"""Workbench for the X calculus, the pi-calculus with pairing, and the encoding between them."""

__version__ = "0.1.0"
