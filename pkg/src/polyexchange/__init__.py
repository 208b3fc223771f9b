"""Affine polygon exchanges with exact arithmetic, and the directional
billiard complexity of the cube and of right prisms."""

__version__ = "0.1.0"
