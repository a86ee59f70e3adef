"""Many-valued tense logic over experiences: probability as degree of truth."""

from .evaluate import Context, evaluate, truth_profile
from .syntax import And, Atom, Not, Or, Proposition, atoms, parse, to_text
from .truth import (
    FALSE,
    TRUE,
    UNDETERMINED,
    TruthValue,
    exclusive_and,
    exclusive_or,
    frechet_and,
    frechet_or,
    partition_measure,
)

__all__ = [
    "And", "Atom", "Context", "FALSE", "Not", "Or", "Proposition", "TRUE", "TruthValue",
    "UNDETERMINED", "atoms", "evaluate", "exclusive_and", "exclusive_or", "frechet_and",
    "frechet_or", "parse", "partition_measure", "to_text", "truth_profile",
]
