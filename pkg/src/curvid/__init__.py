"""Curvature identities of degree 6, Pfaffian forms and harmonic-manifold diagnostics."""

__version__ = "0.1.0"
