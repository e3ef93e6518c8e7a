"""Arbitrary-precision lab for the tri-tronquée solutions of y'' = 6y² - x^μ."""

__version__ = "0.1.0"
