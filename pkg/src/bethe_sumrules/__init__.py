"""Spectral laboratory for Schrodinger operators on the rooted binary tree."""
