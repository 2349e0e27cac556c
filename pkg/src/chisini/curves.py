"""Scalar utility curves: the per-outcome building blocks of state-dependent
utilities.

Every curve maps reals to reals and is expected (when regular) to be
continuous, strictly increasing and normalized to 0 at 0.  Regularity is
*checked*, not enforced at construction: the repair pipeline deliberately
builds curves with jumps or flat segments and relies on the validators to
flag them.

Four closed families are provided plus convex mixtures:

- ``LinearCurve``:       u(x) = scale * x
- ``ExponentialCurve``:  u(x) = (1 - exp(-gamma x)) / gamma, gamma != 0
- ``PowerCurve``:        u(x) = sign(x) |x|**p, p > 0
- ``PiecewiseLinearCurve``: strictly increasing knot table with declared
  extrapolation slopes; duplicated x-coordinates encode right-continuous
  jumps (value at the jump point is the right limit).
- ``MixtureCurve``: probability-weighted average of other curves, produced
  by projecting a state-dependent utility onto a partition.

Inversion is closed-form whenever the family allows it; otherwise
``right_continuous_inverse`` runs a monotone bisection computing
inf{y : u(y) > target}, which is globally convergent and agrees with the
true inverse on continuous strictly increasing curves.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

from .extended import NEG_INF, POS_INF, ExtendedReal

#: Absolute tolerance of the bisection inverse on the solution variable.
BISECT_TOL = 1e-13

_BISECT_MAX_ITER = 400


class Curve:
    """Common interface; concrete families override the hooks they can."""

    def value(self, x: float) -> float:
        raise NotImplementedError

    def lower_limit(self) -> ExtendedReal:
        """Limit of the curve at -inf (lower endpoint of the open image)."""
        raise NotImplementedError

    def upper_limit(self) -> ExtendedReal:
        """Limit of the curve at +inf (upper endpoint of the open image)."""
        raise NotImplementedError

    def inverse_exact(self, y: float):
        """Closed-form inverse for y strictly inside the image, or None."""
        return None

    def regularity_issues(self) -> list[tuple[float, str]]:
        """(coordinate, message) pairs for every regularity defect."""
        return []

    def jumps(self, lo: float, hi: float) -> list[tuple[float, float]]:
        """(location, size) of discontinuities inside [lo, hi]; exact for
        knot tables, empty for the continuous parametric families."""
        return []


@dataclass(frozen=True)
class LinearCurve(Curve):
    scale: float = 1.0

    def value(self, x: float) -> float:
        return self.scale * x

    def lower_limit(self) -> ExtendedReal:
        return NEG_INF

    def upper_limit(self) -> ExtendedReal:
        return POS_INF

    def inverse_exact(self, y: float) -> float:
        return y / self.scale

    def regularity_issues(self):
        if not (self.scale > 0.0):
            return [(0.0, f"linear scale must be positive, got {self.scale}")]
        return []


@dataclass(frozen=True)
class ExponentialCurve(Curve):
    """u(x) = (1 - exp(-gamma x)) / gamma; bounded above for gamma > 0."""

    gamma: float

    def value(self, x: float) -> float:
        # expm1 keeps precision near 0 where 1 - exp(-gx) cancels
        return -math.expm1(-self.gamma * x) / self.gamma

    def lower_limit(self) -> ExtendedReal:
        if self.gamma < 0.0:
            return ExtendedReal.finite(1.0 / self.gamma)
        return NEG_INF

    def upper_limit(self) -> ExtendedReal:
        if self.gamma > 0.0:
            return ExtendedReal.finite(1.0 / self.gamma)
        return POS_INF

    def inverse_exact(self, y: float) -> float:
        return -math.log1p(-self.gamma * y) / self.gamma

    def regularity_issues(self):
        if self.gamma == 0.0 or not math.isfinite(self.gamma):
            return [(0.0, "exponential-normalized curve requires gamma != 0")]
        return []


@dataclass(frozen=True)
class PowerCurve(Curve):
    """Odd power curve u(x) = sign(x) |x|**exponent."""

    exponent: float

    def value(self, x: float) -> float:
        return math.copysign(abs(x) ** self.exponent, x) if x != 0.0 else 0.0

    def lower_limit(self) -> ExtendedReal:
        return NEG_INF

    def upper_limit(self) -> ExtendedReal:
        return POS_INF

    def inverse_exact(self, y: float) -> float:
        return math.copysign(abs(y) ** (1.0 / self.exponent), y) if y != 0.0 else 0.0

    def regularity_issues(self):
        if not (self.exponent > 0.0):
            return [(0.0, f"power exponent must be positive, got {self.exponent}")]
        return []


@dataclass(frozen=True)
class PiecewiseLinearCurve(Curve):
    """Knot table with linear interpolation and linear extrapolation.

    ``xs`` must be nondecreasing.  A repeated x with increasing u values
    encodes an upward jump at that coordinate; evaluation is
    right-continuous there.  Extrapolation below the first and above the
    last knot uses ``slope_left`` / ``slope_right``.
    """

    xs: tuple[float, ...]
    us: tuple[float, ...]
    slope_left: float = 1.0
    slope_right: float = 1.0

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        us = tuple(float(u) for u in self.us)
        if len(xs) != len(us) or len(xs) == 0:
            raise ValueError("knot coordinates and values must align")
        if any(b < a for a, b in zip(xs, xs[1:])):
            raise ValueError("knot x-coordinates must be nondecreasing")
        if any(not math.isfinite(v) for v in xs + us):
            raise ValueError("knots must be finite")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "us", us)

    @classmethod
    def from_samples(cls, xs, us) -> "PiecewiseLinearCurve":
        """Interpolant through samples; extrapolates with the end slopes."""
        xs = tuple(float(x) for x in xs)
        us = tuple(float(u) for u in us)
        if len(xs) < 2:
            raise ValueError("need at least two samples")
        sl = (us[1] - us[0]) / (xs[1] - xs[0])
        sr = (us[-1] - us[-2]) / (xs[-1] - xs[-2])
        return cls(xs, us, sl, sr)

    def value(self, x: float) -> float:
        xs, us = self.xs, self.us
        if x < xs[0]:
            return us[0] + self.slope_left * (x - xs[0])
        if x >= xs[-1]:
            return us[-1] + self.slope_right * (x - xs[-1])
        # last knot with coordinate <= x; at a duplicated x this picks the
        # rightmost copy, giving right-continuity across jumps
        idx = bisect_right(xs, x) - 1
        x0, x1 = xs[idx], xs[idx + 1]
        u0, u1 = us[idx], us[idx + 1]
        if x1 == x0:
            return u1
        return u0 + (x - x0) * (u1 - u0) / (x1 - x0)

    def lower_limit(self) -> ExtendedReal:
        return NEG_INF if self.slope_left > 0.0 else ExtendedReal.finite(self.us[0])

    def upper_limit(self) -> ExtendedReal:
        return POS_INF if self.slope_right > 0.0 else ExtendedReal.finite(self.us[-1])

    def inverse_exact(self, y: float):
        if self.jumps(-math.inf, math.inf):
            return None  # jump tables have no two-sided inverse
        xs, us = self.xs, self.us
        if y < us[0]:
            return xs[0] + (y - us[0]) / self.slope_left
        if y >= us[-1]:
            return xs[-1] + (y - us[-1]) / self.slope_right
        idx = bisect_right(us, y) - 1
        u0, u1 = us[idx], us[idx + 1]
        x0, x1 = xs[idx], xs[idx + 1]
        if u1 == u0:
            return None  # flat segment: not strictly increasing
        return x0 + (y - u0) * (x1 - x0) / (u1 - u0)

    def regularity_issues(self):
        issues = []
        for i in range(len(self.xs) - 1):
            if self.us[i + 1] <= self.us[i]:
                issues.append(
                    (self.xs[i], "knot values must be strictly increasing")
                )
            elif self.xs[i + 1] == self.xs[i]:
                issues.append(
                    (self.xs[i], "duplicated knot coordinate encodes a jump")
                )
        if not (self.slope_left > 0.0):
            issues.append((self.xs[0], "left extrapolation slope must be > 0"))
        if not (self.slope_right > 0.0):
            issues.append((self.xs[-1], "right extrapolation slope must be > 0"))
        if self.value(0.0) != 0.0:
            issues.append((0.0, f"curve value at 0 is {self.value(0.0)!r}, not 0"))
        return issues

    def jumps(self, lo: float, hi: float) -> list[tuple[float, float]]:
        out = []
        for i in range(len(self.xs) - 1):
            if self.xs[i + 1] == self.xs[i] and self.us[i + 1] > self.us[i]:
                if lo <= self.xs[i] <= hi:
                    out.append((self.xs[i], self.us[i + 1] - self.us[i]))
        return out


@dataclass(frozen=True)
class MixtureCurve(Curve):
    """Probability-weighted average of curves (weights positive, sum 1)."""

    weights: tuple[float, ...]
    parts: tuple[Curve, ...]

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        if len(weights) != len(self.parts) or not self.parts:
            raise ValueError("weights and parts must align")
        if any(w <= 0.0 for w in weights):
            raise ValueError("mixture weights must be positive")
        if abs(sum(weights) - 1.0) > 1e-9:
            raise ValueError("mixture weights must sum to 1")
        object.__setattr__(self, "weights", weights)

    def value(self, x: float) -> float:
        return sum(w * c.value(x) for w, c in zip(self.weights, self.parts))

    def _limit(self, side: str) -> ExtendedReal:
        total = 0.0
        for w, c in zip(self.weights, self.parts):
            lim = c.lower_limit() if side == "lower" else c.upper_limit()
            if not lim.is_finite:
                return lim
            total += w * lim.value
        return ExtendedReal.finite(total)

    def lower_limit(self) -> ExtendedReal:
        return self._limit("lower")

    def upper_limit(self) -> ExtendedReal:
        return self._limit("upper")

    def regularity_issues(self):
        issues = []
        for c in self.parts:
            issues.extend(c.regularity_issues())
        v0 = self.value(0.0)
        if issues == [] and v0 != 0.0:
            issues.append((0.0, f"mixture value at 0 is {v0!r}, not 0"))
        return issues

    def jumps(self, lo: float, hi: float) -> list[tuple[float, float]]:
        found: dict[float, float] = {}
        for w, c in zip(self.weights, self.parts):
            for x, size in c.jumps(lo, hi):
                found[x] = found.get(x, 0.0) + w * size
        return sorted(found.items())


def right_continuous_inverse(
    curve: Curve, target: float, *, use_closed_form: bool = True
) -> float:
    """inf{y in R : curve(y) > target}, for targets strictly inside the image.

    With ``use_closed_form`` the family's exact inverse is used when one
    exists; otherwise (and always for mixtures) a monotone bisection runs to
    absolute tolerance ``BISECT_TOL`` on y.  Callers are responsible for the
    out-of-image branches, which belong to the extended-real inverse.
    """
    if use_closed_form:
        exact = curve.inverse_exact(target)
        if exact is not None:
            return exact

    # bracket: lo with value <= target, hi with value > target
    lo, hi = -1.0, 1.0
    for _ in range(200):
        if curve.value(lo) <= target:
            break
        lo *= 2.0
    else:
        raise ArithmeticError("could not bracket the inverse from below")
    for _ in range(200):
        if curve.value(hi) > target:
            break
        hi *= 2.0
    else:
        raise ArithmeticError("could not bracket the inverse from above")

    # terminate on the solution interval AND the equation residual: curves
    # with unbounded inverse slope (e.g. odd roots at 0) need the interval
    # pushed far below BISECT_TOL before the value residual is small, and
    # step functions never satisfy the residual at all (the loop then runs
    # to float resolution, which is the correct inf).
    value_tol = 1e-12 * (1.0 + abs(target))
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval at float resolution
            break
        v = curve.value(mid)
        if v > target:
            hi = mid
        else:
            lo = mid
        if hi - lo <= BISECT_TOL and abs(v - target) <= value_tol:
            break
    return 0.5 * (lo + hi)


def merge_piecewise_linear(
    weights: tuple[float, ...], parts: tuple[Curve, ...]
) -> Curve:
    """Exact weighted average of linear/piecewise-linear curves.

    Averaging piecewise-linear functions over the union of their breakpoints
    is again piecewise-linear, so no approximation is involved.
    """
    if all(isinstance(c, LinearCurve) for c in parts):
        return LinearCurve(sum(w * c.scale for w, c in zip(weights, parts)))
    knot_xs = sorted(
        {x for c in parts if isinstance(c, PiecewiseLinearCurve) for x in c.xs}
    )
    us = tuple(
        sum(w * c.value(x) for w, c in zip(weights, parts)) for x in knot_xs
    )

    def edge_slope(c: Curve, side: str) -> float:
        if isinstance(c, LinearCurve):
            return c.scale
        return c.slope_left if side == "left" else c.slope_right

    sl = sum(w * edge_slope(c, "left") for w, c in zip(weights, parts))
    sr = sum(w * edge_slope(c, "right") for w, c in zip(weights, parts))
    return PiecewiseLinearCurve(tuple(knot_xs), us, sl, sr)
