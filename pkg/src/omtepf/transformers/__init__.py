"""Package omtepf.transformers."""

from omtepf.transformers.base import ProblemTransformer
from omtepf.transformers.integrality import BinaryFixer, IntegralityRelaxer
from omtepf.transformers.presolve import FixedColumnEliminator, SingletonRowReducer
from omtepf.transformers.quartic_epigraph import QuarticEpigraph

__all__ = [
    "BinaryFixer",
    "FixedColumnEliminator",
    "IntegralityRelaxer",
    "ProblemTransformer",
    "QuarticEpigraph",
    "SingletonRowReducer",
]
