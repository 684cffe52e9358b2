"""Cheeger-Gromoll metric and Hopf map verification library."""

__version__ = "1.0.0"
