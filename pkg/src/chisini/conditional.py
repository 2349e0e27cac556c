"""Conditional Chisini means: the nonlinear analogue of conditional
expectation.

Given a regular state-dependent utility with representing evaluator T and a
partition algebra G, the conditional Chisini mean of an act f is the
G-measurable act g solving

    T(f * 1_A) = T(g * 1_A)   for every event A in G.

It is computed constructively: take the conditional expectation of the
random utility w -> u(w, f(w)), project the utility curves onto the atoms,
and apply the generalized inverse atom by atom.  On positive-probability
atoms the inverse is guaranteed finite because the conditional expectation
lies strictly inside the projected curve's image whenever f is bounded; on
null atoms the solution value is fixed at 0.

The solution object carries the full residual table over all atom-unions,
so that the defining system of equations is auditable rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .audit import PreferenceFunctional, spot_check_additivity
from .errors import (
    EventNotInAlgebra,
    NotMeasurable,
    PreconditionFailure,
)
from .spaces import (
    DEFAULT_UNION_CAP,
    Act,
    EventSet,
    PartitionAlgebra,
    conditional_expectation,
    equal_up_to_null,
)
from .utility import (
    AdditiveRepresentation,
    ensure_regular,
    generalized_inverse,
    project_utility,
)

#: Residual tolerances scale with (1 + sup-norm of f): utilities can
#: amplify absolute error, and this keeps pass/fail meaningful across scales.
RESIDUAL_SCALE = 1e-9


@dataclass(frozen=True)
class ChisiniSolution:
    """A G-measurable solution act plus its residuals over all atom-unions."""

    act: Act
    algebra: PartitionAlgebra
    residuals: tuple[tuple[tuple[int, ...], float], ...]
    tolerance: float

    @property
    def max_residual(self) -> float:
        return max((r for _, r in self.residuals), default=0.0)

    @property
    def ok(self) -> bool:
        return self.max_residual <= self.tolerance

    def atom_values(self) -> tuple[float, ...]:
        return tuple(self.act.values[min(atom)] for atom in self.algebra.atoms)


def chisini_mean(
    rep: AdditiveRepresentation,
    f: Act,
    algebra: PartitionAlgebra,
    *,
    solver: str = "auto",
    tol_scale: float = RESIDUAL_SCALE,
    cap: int = DEFAULT_UNION_CAP,
) -> ChisiniSolution:
    """Compute the conditional Chisini mean of ``f`` given ``algebra``.

    ``solver`` picks the inversion path: "auto" uses closed-form inverses
    where the curve family has one, "bisect" always runs the monotone
    bisection.  The two are independent solvers of the same equations and
    must agree up to null events.

    Raises RegularityViolation if the utility is not regular.
    """
    ensure_regular(rep.utility)
    h = conditional_expectation(rep.utility_act(f), algebra)
    projected = project_utility(rep, algebra)
    weights = rep.space.weights
    values = [0.0] * rep.space.size
    for k, atom in enumerate(algebra.atoms):
        if sum(weights[i] for i in atom) == 0.0:
            continue  # version choice: 0 on null atoms
        anchor = min(atom)
        inv = generalized_inverse(projected, anchor, h.values[anchor], method=solver)
        if not inv.is_finite:
            raise ArithmeticError(
                "conditional expectation left the projected image on atom "
                f"{sorted(atom)}; inputs are numerically inconsistent"
            )
        for i in atom:
            values[i] = inv.value
    g = Act(rep.space, tuple(values))
    residuals = _residual_table(rep, f, g, algebra, cap)
    return ChisiniSolution(
        act=g,
        algebra=algebra,
        residuals=residuals,
        tolerance=tol_scale * (1.0 + f.sup_norm),
    )


def _residual_table(rep, f, g, algebra, cap):
    rows = []
    for members in algebra.events(cap):
        vf = rep.evaluate_on_event(members, f)
        vg = rep.evaluate_on_event(members, g)
        rows.append((tuple(sorted(members)), abs(vf - vg)))
    return tuple(rows)


@dataclass(frozen=True)
class ConditionabilityResult:
    passed: bool
    worst_residual: float
    worst_event: tuple[int, ...]


def verify_conditionable(
    t: PreferenceFunctional,
    f: Act,
    g: Act,
    algebra: PartitionAlgebra,
    tol: float,
    *,
    cap: int = DEFAULT_UNION_CAP,
) -> ConditionabilityResult:
    """Check T(f*1_A) = T(g*1_A) for the events of the algebra.

    A black-box functional is checked on all 2**k atom-unions; a functional
    declared additive is spot-checked and then verified on atoms only,
    since additivity collapses the quantifier.
    """
    if not g.is_measurable(algebra):
        raise NotMeasurable("candidate act varies inside an atom")
    if t.additive:
        spot_check_additivity(t)
        events = [tuple(sorted(atom)) for atom in algebra.atoms]
    else:
        events = [tuple(sorted(e)) for e in algebra.events(cap)]
    worst = 0.0
    worst_event: tuple[int, ...] = ()
    for members in events:
        ev = EventSet(f.space, frozenset(members))
        resid = abs(t(f.masked(ev)) - t(g.masked(ev)))
        if resid > worst:
            worst, worst_event = resid, members
    return ConditionabilityResult(worst <= tol, worst, worst_event)


def taking_out(
    rep: AdditiveRepresentation,
    f: Act,
    event: EventSet,
    algebra: PartitionAlgebra,
    *,
    tol: float = 1e-9,
    solver: str = "auto",
) -> bool:
    """Masking identity: the Chisini mean of f*1_A equals the Chisini mean
    of f multiplied by 1_A, up to null events, for any event A of the
    algebra."""
    if not algebra.contains_event(event):
        raise EventNotInAlgebra("event is not a union of atoms")
    masked_mean = chisini_mean(rep, f.masked(event), algebra, solver=solver).act
    plain_mean = chisini_mean(rep, f, algebra, solver=solver).act.masked(event)
    return equal_up_to_null(masked_mean, plain_mean, tol)


def uniqueness_check(
    rep: AdditiveRepresentation,
    f: Act,
    algebra: PartitionAlgebra,
    g1: Act,
    g2: Act,
    *,
    tol: float | None = None,
) -> bool:
    """True iff two Chisini solutions differ only on zero-weight outcomes.

    Both candidates must actually solve the conditioning equations; a
    failed precondition raises  PreconditionFailure, distinct from a
    False verdict.
    """
    if tol is None:
        tol = RESIDUAL_SCALE * (1.0 + f.sup_norm)
    ensure_regular(rep.utility)
    t = PreferenceFunctional(
        space=rep.space, evaluator=rep.evaluate, additive=True, name="chisini"
    )
    for label, g in (("first", g1), ("second", g2)):
        result = verify_conditionable(t, f, g, algebra, tol)
        if not result.passed:
            raise PreconditionFailure(
                f"{label} candidate is not a Chisini solution: residual "
                f"{result.worst_residual:g} on event {result.worst_event}"
            )
    return equal_up_to_null(g1, g2, tol)
