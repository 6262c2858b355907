"""Exact and arbitrary-precision verification toolkit for the quadratic
relations among Bessel moments: Vanhove operators, Wrońskian matrices,
Bernoulli-number matrices, and high-precision Bessel-moment quadrature."""

__version__ = "0.1.0"
