"""Exception hierarchy.

Verification failures are never raised; they come back as report objects.
Everything here signals either bad input or a broken internal invariant.
"""

from __future__ import annotations


class ColorMatchError(Exception):
    """Base class for every error raised by the package."""


class InvalidInstance(ColorMatchError):
    pass


class NotABijection(InvalidInstance):
    def __init__(self, color: int):
        super().__init__(f"matching M{color} is not a bijection")
        self.color = color


class MatchingsOverlap(InvalidInstance):
    def __init__(self, u: int, c: int, c2: int):
        super().__init__(f"M{c} and M{c2} share the edge at A-vertex {u}")
        self.u, self.c, self.c2 = u, c, c2


class NTooSmall(InvalidInstance):
    pass


class LengthMismatch(InvalidInstance):
    pass


class InvalidTargetSum(ColorMatchError):
    pass


class MatchingWrongSize(ColorMatchError):
    pass


class BadParity(ColorMatchError):
    pass


class OutOfRange(ColorMatchError):
    pass


class PreconditionViolated(ColorMatchError):
    def __init__(self, clause: str):
        super().__init__(f"precondition violated: {clause}")
        self.clause = clause


class BudgetTooSmall(PreconditionViolated):
    pass


class VertexSaturated(ColorMatchError):
    pass


class StartSaturated(VertexSaturated):
    pass


class Disconnected(ColorMatchError):
    pass


class NotConnected(Disconnected):
    pass


class A3Zero(ColorMatchError):
    pass


class KOutOfRange(ColorMatchError):
    pass


class TooLarge(ColorMatchError):
    pass


class GenerationBudgetExceeded(ColorMatchError):
    pass


class InternalError(ColorMatchError):
    """An internal invariant failed.  Always a bug; the CLI exits with 3."""


class IterationGuardExceeded(InternalError):
    """The switching pipeline ran past its step budget."""


def check(cond: bool, msg: str) -> None:
    if not cond:
        raise InternalError(msg)
