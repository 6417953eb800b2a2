"""Polyharmonic Dirichlet problems and potential-theory identities on the unit ball."""

__version__ = "0.1.0"
