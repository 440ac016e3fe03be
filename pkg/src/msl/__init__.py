"""Tropical moduli spaces of rational stable maps to smooth tropical curves.

Everything is computed with exact integer/rational arithmetic.
"""

__version__ = "0.1.0"
