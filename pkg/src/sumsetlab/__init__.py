"""Desk-scale experiments on sumsets, densities and Bohr sets."""

__version__ = "0.1.0"
