"""Exact experiments on growth rates of F_m/R' for quotients F_m/R that map onto Z."""

__version__ = "0.1.0"
