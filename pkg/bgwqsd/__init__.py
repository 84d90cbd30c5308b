"""BGW-QSD: invariant measures and quasi-stationary distributions of subcritical
Bienaymé-Galton-Watson processes."""

__version__ = "0.1.1"
