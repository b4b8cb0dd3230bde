"""Characteristic-free Artin-Schreier theory: exact constructions and checks."""

__version__ = "0.1.0"
