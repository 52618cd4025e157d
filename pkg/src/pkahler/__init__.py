"""Generalized p-Kähler structures on invariant complex models.

Exact exterior algebra on Λ(C^n)*, the cones SP ⊆ P ⊆ WP of real
(p,p)-forms, Chevalley-Eilenberg style complexes of compact quotients, and a
primal/dual detector for the p-Kähler classes and their exact variants.
"""
from .exterior import Form, Scalar, SimpleVector

__version__ = "0.1.0"
__all__ = ["Form", "Scalar", "SimpleVector", "__version__"]
