"""Exact rational homology of Hurwitz spaces of dihedral covers, at desk scale."""

__version__ = "0.1.0"
