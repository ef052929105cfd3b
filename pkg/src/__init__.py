"""Weighted Schwarz symmetrization lab."""
