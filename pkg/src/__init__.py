"""AIM CCGF - Hybrid coupled-cluster Green's functions for the Anderson impurity model."""

__version__ = "0.1.0"
