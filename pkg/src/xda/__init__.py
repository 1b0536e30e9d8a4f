"""Exact Diophantine approximation toolkit.

Constructs and certifies rational approximations to points on
self-similar sets (Cantor sets, Koch curve, Sierpinski-type gaskets)
and on the unit circle, with every inequality decided in exact
integer arithmetic.
"""

__version__ = "0.1.0"
