"""Exact arithmetic for (p, 1-q)-adic rings and q-difference congruences."""

__version__ = "0.1.0"
