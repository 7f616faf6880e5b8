"""Multiplicity-constrained matchings in unions of three perfect matchings."""

from .core import (
    Edge,
    Instance,
    Matching,
    VerifyReport,
    components,
    cyclic_instance,
    disjoint_union,
    validate_instance,
    verify_matching,
)
from .reduction import reduce_extend, reduce_perfect
from .solver import solve, solve_two_color
from .switching import switch

__all__ = [
    "Edge", "Instance", "Matching", "VerifyReport", "components", "cyclic_instance",
    "disjoint_union", "validate_instance", "verify_matching", "reduce_extend",
    "reduce_perfect", "solve", "solve_two_color", "switch",
]
