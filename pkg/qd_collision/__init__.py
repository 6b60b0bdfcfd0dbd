"""Collisional quantum Darwinism - statevector and closed-form mutual information."""

__version__ = "0.1.0"
