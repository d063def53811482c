"""Exact degrees of dormant PGL2-oper moduli via their 2d TQFT, with a finite-field cross-check."""

__version__ = "0.1.0"
