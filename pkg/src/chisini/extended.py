"""Extended real numbers for generalized-inverse values and image endpoints.

An :class:`ExtendedReal` is one of three explicit cases: finite, plus
infinity, minus infinity.  Infinite values are deliberately not encoded as
IEEE inf floats so that code consuming an inverse cannot accidentally do
arithmetic on an out-of-range branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class ExtendedReal:
    """A totally ordered value in [-inf, +inf].

    Ordering compares the sign tag first (-1 < 0 < +1), then the finite
    payload, which is kept at 0.0 for the infinite cases so that tuple
    ordering is total.
    """

    sign: int
    payload: float = 0.0

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if self.sign != 0 and self.payload != 0.0:
            raise ValueError("infinite values carry no payload")
        if self.sign == 0 and not math.isfinite(self.payload):
            raise ValueError("finite ExtendedReal requires a finite payload")

    @classmethod
    def finite(cls, x: float) -> "ExtendedReal":
        return cls(0, float(x))

    @property
    def is_finite(self) -> bool:
        return self.sign == 0

    @property
    def value(self) -> float:
        if self.sign != 0:
            raise ValueError("infinite ExtendedReal has no finite value")
        return self.payload

    def as_float(self) -> float:
        """Lossy conversion for display and serialization only."""
        if self.sign == 0:
            return self.payload
        return math.inf if self.sign > 0 else -math.inf

    def __repr__(self):
        if self.sign > 0:
            return "ExtendedReal(+inf)"
        if self.sign < 0:
            return "ExtendedReal(-inf)"
        return f"ExtendedReal({self.payload!r})"


POS_INF = ExtendedReal(1)
NEG_INF = ExtendedReal(-1)
