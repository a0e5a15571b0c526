"""Exactly solvable two-mode model of a double-well Bose-Einstein condensate."""

__version__ = "0.1.0"
