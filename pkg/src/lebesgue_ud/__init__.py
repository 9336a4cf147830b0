"""Lebesgue integrals on (0, 1) as limits of empirical means along uniformly distributed sequences."""

from .errors import UDError
from .sequences import FromFile, HybridPi, Prng, Rationality, SequencePoint, VanDerCorput, Weyl

__all__ = ["UDError", "FromFile", "HybridPi", "Prng", "Rationality", "SequencePoint", "VanDerCorput", "Weyl"]
__version__ = "0.1.0"
