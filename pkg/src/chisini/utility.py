"""State-dependent utilities, their representing functional, projection onto
a partition algebra, and the generalized inverse of the projected utility.

A :class:`StateUtility` attaches one scalar curve to each outcome.  When
every curve is regular (continuous, strictly increasing, 0 at 0) the
probability-weighted aggregate

    T(f) = sum_w p(w) * u(w, f(w))

is a strictly monotone, pointwise continuous evaluator of acts, and for any
partition algebra the atom-averaged curves form the projected utility whose
generalized inverse turns conditional expectations of utilities back into
payoff units.  On atoms of probability zero the projected curve is fixed to
the identity; every downstream equality is stated up to null events, so the
choice of version is inert.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .curves import (
    Curve,
    LinearCurve,
    MixtureCurve,
    PiecewiseLinearCurve,
    merge_piecewise_linear,
    right_continuous_inverse,
)
from .errors import RegularityViolation, SpaceMismatchError
from .extended import NEG_INF, POS_INF, ExtendedReal
from .spaces import Act, FiniteSpace, PartitionAlgebra


@dataclass(frozen=True)
class StateUtility:
    """One utility curve per outcome of a finite space."""

    space: FiniteSpace
    curves: tuple[Curve, ...]

    def __post_init__(self):
        if len(self.curves) != self.space.size:
            raise ValueError("one curve per outcome required")

    @classmethod
    def state_independent(cls, space: FiniteSpace, curve: Curve) -> "StateUtility":
        return cls(space, tuple(curve for _ in range(space.size)))

    def value(self, outcome, x: float) -> float:
        return self.curves[self.space.index_of(outcome)].value(x)

    def replace_curve(self, outcome, curve: Curve) -> "StateUtility":
        idx = self.space.index_of(outcome)
        curves = list(self.curves)
        curves[idx] = curve
        return StateUtility(self.space, tuple(curves))


@dataclass(frozen=True)
class RegularityIssue:
    outcome: str
    coordinate: float
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[RegularityIssue, ...]

    def to_dict(self):
        return {
            "ok": self.ok,
            "issues": [
                {
                    "outcome": i.outcome,
                    "coordinate": i.coordinate,
                    "message": i.message,
                }
                for i in self.issues
            ],
        }


def validate_regular(utility: StateUtility) -> ValidationReport:
    """Check every curve for normalization at 0, strict monotonicity and
    (for knot tables) absence of jumps; parametric families are validated
    through their parameter constraints."""
    issues = []
    for idx, curve in enumerate(utility.curves):
        label = utility.space.outcomes[idx]
        for coordinate, message in curve.regularity_issues():
            issues.append(RegularityIssue(label, coordinate, message))
    return ValidationReport(ok=not issues, issues=tuple(issues))


def ensure_regular(utility: StateUtility) -> None:
    """Raise :class:`RegularityViolation` on the first defect found."""
    report = validate_regular(utility)
    if not report.ok:
        first = report.issues[0]
        raise RegularityViolation(first.outcome, first.coordinate, first.message)


@dataclass(frozen=True)
class AdditiveRepresentation:
    """The additively decomposable evaluator V_A(f) = sum_{w in A} p(w) u(w, f(w)).

    The full-space value T(f) = V_Omega(f) numerically represents the
    preference induced by the utility; restriction to events is exactly
    evaluation of the masked act because curves vanish at 0.
    """

    utility: StateUtility

    @property
    def space(self) -> FiniteSpace:
        return self.utility.space

    def utility_act(self, f: Act) -> Act:
        """The random outcome w -> u(w, f(w)) as an act."""
        self._check_space(f)
        values = tuple(
            c.value(v) for c, v in zip(self.utility.curves, f.values)
        )
        return Act(self.space, values)

    def evaluate(self, f: Act) -> float:
        self._check_space(f)
        return float(
            sum(
                p * c.value(v)
                for p, c, v in zip(self.space.weights, self.utility.curves, f.values)
            )
        )

    def evaluate_on_event(self, members: Iterable[int], f: Act) -> float:
        """V_A(f); equals evaluate(f * 1_A) since every curve is 0 at 0."""
        self._check_space(f)
        return float(
            sum(
                self.space.weights[i]
                * self.utility.curves[i].value(f.values[i])
                for i in members
            )
        )

    def _check_space(self, f: Act) -> None:
        if f.space != self.space:
            raise SpaceMismatchError("act and representation spaces differ")


@dataclass(frozen=True)
class ProjectedUtility:
    """Atomwise average of a state-dependent utility over a partition.

    The curve attached to an atom is the probability-weighted average of
    its members' curves, i.e. a version of the conditional expectation of
    u(., x) given the algebra, evaluated at each x.  Null atoms carry the
    identity curve.
    """

    base: AdditiveRepresentation
    algebra: PartitionAlgebra
    atom_curves: tuple[Curve, ...]

    @property
    def space(self) -> FiniteSpace:
        return self.base.space

    def curve_at(self, outcome) -> Curve:
        idx = self.space.index_of(outcome)
        return self.atom_curves[self.algebra.atom_index_of(idx)]

    def value(self, outcome, x: float) -> float:
        return self.curve_at(outcome).value(x)

    def as_state_utility(self) -> StateUtility:
        curves = tuple(
            self.atom_curves[self.algebra.atom_index_of(i)]
            for i in range(self.space.size)
        )
        return StateUtility(self.space, curves)


def _combine_curves(weights: tuple[float, ...], parts: tuple[Curve, ...]) -> Curve:
    if all(c == parts[0] for c in parts[1:]):
        return parts[0]
    if all(isinstance(c, (LinearCurve, PiecewiseLinearCurve)) for c in parts) and all(
        not c.jumps(-float("inf"), float("inf"))
        for c in parts
        if isinstance(c, PiecewiseLinearCurve)
    ):
        return merge_piecewise_linear(weights, parts)
    return MixtureCurve(weights, parts)


def project_utility(
    rep: AdditiveRepresentation, algebra: PartitionAlgebra
) -> ProjectedUtility:
    """Average the utility curves over each atom of the algebra.

    Knot tables merge exactly on the union of their breakpoints; identical
    curves collapse to themselves; anything else becomes an explicit
    mixture evaluated by summation and inverted by bisection.
    """
    if algebra.space != rep.space:
        raise SpaceMismatchError("algebra and representation spaces differ")
    weights = rep.space.weights
    atom_curves = []
    for atom in algebra.atoms:
        mass = sum(weights[i] for i in atom)
        if mass == 0.0:
            atom_curves.append(LinearCurve(1.0))
            continue
        members = sorted(i for i in atom if weights[i] > 0.0)
        w = tuple(weights[i] / mass for i in members)
        parts = tuple(rep.utility.curves[i] for i in members)
        atom_curves.append(_combine_curves(w, parts))
    return ProjectedUtility(rep, algebra, tuple(atom_curves))


def image_interval(pu: ProjectedUtility, outcome) -> tuple[ExtendedReal, ExtendedReal]:
    """Open interval of values the projected curve attains at the outcome."""
    curve = pu.curve_at(outcome)
    return curve.lower_limit(), curve.upper_limit()


def generalized_inverse(
    pu: ProjectedUtility, outcome, x: float, *, method: str = "auto"
) -> ExtendedReal:
    """Right-continuous inverse of the projected curve, extended-real valued.

    Three cases: +inf at or above the upper image endpoint, -inf at or
    below the lower endpoint, and the unique preimage strictly inside the
    open image.  ``method`` selects "auto" (closed form when the family has
    one, bisection otherwise) or "bisect" (always bisection); the two paths
    are independent solvers of the same equation.
    """
    if method not in ("auto", "bisect"):
        raise ValueError(f"unknown inversion method {method!r}")
    curve = pu.curve_at(outcome)
    lower, upper = curve.lower_limit(), curve.upper_limit()
    point = ExtendedReal.finite(x)
    if point >= upper:
        return POS_INF
    if point <= lower:
        return NEG_INF
    y = right_continuous_inverse(curve, x, use_closed_form=(method == "auto"))
    return ExtendedReal.finite(y)
