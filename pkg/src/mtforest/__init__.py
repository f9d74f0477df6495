"""Multitype plane forests: coding, cyclic lemma, exact progeny laws, enumeration, Lagrange-Good."""

from .branching import OffspringLaw, classify, marginal_progeny_law, progeny_law
from .coding import CodingSequence, decode, encode, smallest_solution
from .forest import Signature, TypedForest, reduce_forest, subforest

__all__ = [
    "CodingSequence", "OffspringLaw", "Signature", "TypedForest", "classify", "decode", "encode",
    "marginal_progeny_law", "progeny_law", "reduce_forest", "smallest_solution", "subforest",
]
