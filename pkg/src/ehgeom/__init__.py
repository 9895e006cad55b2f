"""Numerical geometry of Hopf-type hypersurfaces in Eguchi-Hanson space."""

__version__ = "0.1.0"
