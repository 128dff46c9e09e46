"""Exact wedge and cycle calculus with tame symbols, plus numerics for
single-valued polylogarithms and Chow polylogarithm integrals."""

__version__ = "0.1.0"
