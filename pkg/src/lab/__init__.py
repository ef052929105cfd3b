"""Numerical core: weighted geometry, meshing, P1 solver, rearrangement and radial reduction."""
