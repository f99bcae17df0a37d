"""insep: exact computations for quotients by alpha_p and mu_p actions."""

__version__ = "0.3.0"
