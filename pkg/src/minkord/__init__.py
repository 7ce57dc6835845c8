"""Finite order/incidence structures for the axioms of Minkowski spacetime,
with an exact-rational 1+1 model as oracle
"""


__version__ = "2026.10.18"
