"""Fourier algebras of finite groups and their homomorphisms."""

__version__ = "0.1.0"
