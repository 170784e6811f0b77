"""Margulis invariants and the cone of proper affine deformations of Schottky groups."""
