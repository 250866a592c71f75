"""Collocation boundary element solver for the 3D Helmholtz equation with
Burton-Miller coupling and single/multi-level fast multipole acceleration."""

__version__ = "0.1.0"
