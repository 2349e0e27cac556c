"""Black-box preference-functional audits.

A :class:`PreferenceFunctional` wraps an arbitrary evaluator of acts.  The
audits establish, by exhaustive finite search over grid-valued acts:

- strict monotonicity: raising a constant payoff on a non-null event must
  strictly improve the act, whatever happens elsewhere;
- the sure-thing principle: if act f beats act g given a common payoff h
  off some event, the comparison must not flip for any other common payoff;
- conditionability on the four-event algebra generated by a single event:
  there must exist a two-level act matching the functional on the event,
  on its complement, and (the nontrivial part) on the whole space.

The equivalence harness runs the last two and asserts that their verdicts
agree: for strictly monotone, pointwise continuous preferences the
sure-thing principle holds exactly when conditional certainty equivalents
exist, and the harness checks that equivalence at finite scale.

Pointwise continuity itself has no finite certificate from grid samples;
it is deliberately not audited here (a sequence-based numerical proxy lives
with the expectation-family audits).

Enumeration is deterministic: events ascend by outcome bitmask, acts by
lexicographic order of their value tuples, and the first witness reported
is the lexicographic minimum over (f, g, h, h_alt, event).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable

import numpy as np

from .errors import (
    AdditivityCheckFailed,
    BisectionBracketFailure,
    ComplexityCapExceeded,
)
from .reports import AuditReport, CheckResult
from .spaces import Act, EventSet, FiniteSpace
from .utility import AdditiveRepresentation

#: Margin separating a genuine strict violation from round-off.
WITNESS_MARGIN = 1e-9

#: Hard caps for exhaustive act enumeration.
MAX_OUTCOMES = 6
MAX_GRID = 5


@dataclass(frozen=True)
class PreferenceFunctional:
    """A numeric evaluator of acts, with the search grid used to span them.

    ``additive`` declares that masked evaluations split across disjoint
    events; it is spot-checked before any audit relies on it.
    """

    space: FiniteSpace
    evaluator: Callable[[Act], float]
    additive: bool = False
    grid: tuple[float, ...] = (-1.0, 0.0, 1.0)
    name: str = ""

    def __post_init__(self):
        grid = tuple(sorted(float(g) for g in self.grid))
        if len(set(grid)) != len(grid):
            raise ValueError("grid values must be distinct")
        object.__setattr__(self, "grid", grid)

    def __call__(self, f: Act) -> float:
        return float(self.evaluator(f))


@dataclass(frozen=True)
class Witness:
    """A sure-thing violation: the comparison of f vs g on the event flips
    between the two off-event completions."""

    f: tuple[float, ...]
    g: tuple[float, ...]
    h: tuple[float, ...]
    h_alt: tuple[float, ...]
    event: tuple[int, ...]
    values: tuple[float, float, float, float]
    margin: float

    def to_dict(self) -> dict:
        return {
            "f": list(self.f),
            "g": list(self.g),
            "h": list(self.h),
            "h_alt": list(self.h_alt),
            "event": list(self.event),
            "values": list(self.values),
            "margin": self.margin,
        }


def _enforce_caps(t: PreferenceFunctional) -> None:
    if t.space.size > MAX_OUTCOMES:
        raise ComplexityCapExceeded(
            f"{t.space.size} outcomes exceed the cap of {MAX_OUTCOMES}"
        )
    if len(t.grid) > MAX_GRID:
        raise ComplexityCapExceeded(
            f"grid of {len(t.grid)} values exceeds the cap of {MAX_GRID}"
        )


def spot_check_additivity(t: PreferenceFunctional, tol: float = 1e-9) -> None:
    """Probe the declared additivity on a handful of fixed splits."""
    n = t.space.size
    if n < 2:
        return
    probes = [
        tuple(t.grid[(i + k) % len(t.grid)] for i in range(n))
        for k in range(min(3, len(t.grid)))
    ]
    # constant probes catch evaluators that treat masked zeros as payoffs
    probes += [tuple(g for _ in range(n)) for g in t.grid]
    half = frozenset(range(n // 2))
    rest = frozenset(range(n)) - half
    for values in probes:
        f = Act(t.space, values)
        full = t(f.masked(EventSet(t.space, half | rest)))
        split = t(f.masked(EventSet(t.space, half))) + t(
            f.masked(EventSet(t.space, rest))
        )
        if abs(full - split) > tol * (1.0 + f.sup_norm):
            raise AdditivityCheckFailed(
                f"functional {t.name!r} declared additive but "
                f"V(A or B) differs from V(A)+V(B) by {abs(full - split):g}"
            )


class _GridEnumeration:
    """Precomputed tables over all grid-valued acts of a functional.

    Act index = mixed-radix number of grid digits, first outcome most
    significant, so ascending index order is lexicographic order of the
    value tuples.
    """

    def __init__(self, t: PreferenceFunctional):
        _enforce_caps(t)
        self.t = t
        self.n = t.space.size
        self.g = len(t.grid)
        self.acts = list(product(t.grid, repeat=self.n))
        self.count = len(self.acts)
        self.values = np.array(
            [t(Act(t.space, a)) for a in self.acts], dtype=float
        )
        # digit matrix and radix for index arithmetic
        self.radix = np.array(
            [self.g ** (self.n - 1 - i) for i in range(self.n)], dtype=np.int64
        )
        lookup = {v: d for d, v in enumerate(t.grid)}
        self.digits = np.array(
            [[lookup[v] for v in a] for a in self.acts], dtype=np.int64
        )

    def event_members(self, mask: int) -> frozenset[int]:
        return frozenset(i for i in range(self.n) if mask >> i & 1)

    def on_part(self, mask: int) -> np.ndarray:
        """Index contribution of each act's digits on the event."""
        sel = np.array(
            [self.radix[i] if mask >> i & 1 else 0 for i in range(self.n)],
            dtype=np.int64,
        )
        return self.digits @ sel

    def off_part(self, mask: int) -> np.ndarray:
        return self.on_part(~mask & ((1 << self.n) - 1))


def check_strict_monotonicity(t: PreferenceFunctional) -> AuditReport:
    """Exhaustive strict-monotonicity audit over grid data.

    For every non-null event, every ordered grid pair x > y and every
    grid-valued background act, the evaluator must strictly prefer the act
    paying x on the event.  The first failure in enumeration order is
    reported as the witness.
    """
    if len(t.grid) < 2:
        raise ValueError("strict monotonicity needs at least two grid values")
    enum = _GridEnumeration(t)
    weights = t.space.weights
    witness = None
    checked = 0
    for mask in range(1, 1 << enum.n):
        members = enum.event_members(mask)
        if sum(weights[i] for i in members) == 0.0:
            continue
        on_radix = int(sum(enum.radix[i] for i in members))
        off = enum.off_part(mask)
        for xi in range(enum.g - 1, -1, -1):
            for yi in range(xi):
                # x = grid[xi] > y = grid[yi]
                dx = enum.values[xi * on_radix + off]
                dy = enum.values[yi * on_radix + off]
                bad = np.nonzero(dx <= dy)[0]
                checked += enum.count
                if bad.size and witness is None:
                    j = int(bad[0])
                    witness = {
                        "event": sorted(members),
                        "x": t.grid[xi],
                        "y": t.grid[yi],
                        "background": list(enum.acts[j]),
                        "value_x": float(dx[j]),
                        "value_y": float(dy[j]),
                    }
        if witness is not None:
            break
    return AuditReport(
        subject=t.name or "functional",
        checks=(
            CheckResult(
                name="strict-monotonicity",
                passed=witness is None,
                witness=witness,
                details={"comparisons": checked},
            ),
        ),
    )


def check_sure_thing(t: PreferenceFunctional) -> AuditReport:
    """Exhaustive sure-thing audit in two phases.

    Phase 1 searches all (f, g, h, h_alt, event) tuples over grid-valued
    acts for a comparison that holds with completion h but fails, by more
    than the witness margin, with completion h_alt.

    Phase 2 runs only when the grid search is clean: for each event and
    grid act it solves the two masked certainty-equivalent equations by
    bisection and checks the full-space pasting they induce.  A mismatch
    there is converted into a genuine flip whose acts involve the solved
    constants; this is exactly the constructive route by which a failure
    of conditioning produces a sure-thing violation, and it catches
    functionals whose violations sit between grid points.  Bracket
    endpoints from the bisection pin the premise direction, so every
    emitted witness re-evaluates to a true violation.
    """
    enum = _GridEnumeration(t)
    n_events = 1 << enum.n
    # per-event index tables: pasted act = on-part of f + off-part of h
    on_parts = []
    off_parts = []
    for mask in range(n_events):
        sel = np.array(
            [enum.radix[i] if mask >> i & 1 else 0 for i in range(enum.n)],
            dtype=np.int64,
        )
        on_parts.append(enum.digits @ sel)
        off_parts.append(enum.digits @ (enum.radix - sel))
    witness = None
    for fi in range(enum.count):
        if witness is not None:
            break
        for gi in range(enum.count):
            if fi == gi:
                continue
            # diff[mask, h] = T(f on event, h off) - T(g on event, h off)
            diff = np.empty((n_events, enum.count), dtype=float)
            for mask in range(n_events):
                off = off_parts[mask]
                diff[mask] = (
                    enum.values[int(on_parts[mask][fi]) + off]
                    - enum.values[int(on_parts[mask][gi]) + off]
                )
            premise = diff >= 0.0
            violation = diff < -WITNESS_MARGIN
            if not violation.any():
                continue
            found = _first_flip(premise, violation)
            if found is None:
                continue
            hi, hj, mask = found
            members = sorted(enum.event_members(mask))

            def pasted(i: int, j: int) -> float:
                return float(
                    enum.values[int(on_parts[mask][i] + off_parts[mask][j])]
                )

            witness = Witness(
                f=enum.acts[fi],
                g=enum.acts[gi],
                h=enum.acts[hi],
                h_alt=enum.acts[hj],
                event=tuple(members),
                values=(
                    pasted(fi, hi),
                    pasted(gi, hi),
                    pasted(fi, hj),
                    pasted(gi, hj),
                ),
                margin=float(-diff[mask, hj]),
            )
            break
    phase = "grid"
    if witness is None:
        witness = _certainty_equivalent_witness(t, enum)
        phase = "certainty-equivalent" if witness is not None else "none"
    return AuditReport(
        subject=t.name or "functional",
        checks=(
            CheckResult(
                name="sure-thing",
                passed=witness is None,
                witness=witness.to_dict() if witness else None,
                details={
                    "acts": enum.count,
                    "events": n_events,
                    "witness_phase": phase,
                },
            ),
        ),
    )


def _certainty_equivalent_witness(
    t: PreferenceFunctional, enum: _GridEnumeration
) -> Witness | None:
    """Derive a sure-thing flip from a failed conditioning equation.

    For an event A and act f let x, y solve t(x 1_A) = t(f 1_A) and
    t(y 1_{A^c}) = t(f 1_{A^c}).  If t(f) differs from t(x 1_A + y 1_{A^c})
    the chain f -> (x on A, f off A) -> (x on A, y off A) must break at one
    of its two links, and that link is a sure-thing violation whose premise
    (an indifference) is re-established with the appropriate bisection
    bracket endpoint.
    """
    n = t.space.size
    for mask in range(1, (1 << n) - 1):
        members = frozenset(i for i in range(n) if mask >> i & 1)
        event = EventSet(t.space, members)
        complement = event.complement()
        for a in enum.acts:
            f = Act(t.space, a)
            bound = f.sup_norm + 1.0
            try:
                x, x_lo, x_hi = _solve_constant_on_event(
                    t, t(f.masked(event)), event, (-bound, bound)
                )
                y, y_lo, y_hi = _solve_constant_on_event(
                    t, t(f.masked(complement)), complement, (-bound, bound)
                )
            except BisectionBracketFailure:
                continue  # monotonicity defect; its own audit reports it
            g = Act(
                t.space,
                tuple(x if i in members else y for i in range(n)),
            )
            tol = WITNESS_MARGIN * (1.0 + f.sup_norm)
            if abs(t(f) - t(g)) <= tol:
                continue
            mid = Act(
                t.space,
                tuple(x if i in members else f.values[i] for i in range(n)),
            )
            d1 = t(f) - t(mid)
            if abs(d1) > tol / 2.0:
                witness = _one_sided_flip(
                    t, f, event, (x_lo, x_hi), completion=f, gap=d1
                )
            else:
                witness = _one_sided_flip(
                    t,
                    f,
                    complement,
                    (y_lo, y_hi),
                    completion=Act.constant(t.space, x),
                    gap=t(mid) - t(g),
                )
            if witness is not None:
                return witness
    return None


def _one_sided_flip(
    t: PreferenceFunctional,
    f: Act,
    event: EventSet,
    endpoints: tuple[float, float],
    completion: Act,
    gap: float,
) -> Witness | None:
    """Build a witness comparing f against a constant on the event.

    ``gap`` is t(f with completion) - t(constant with completion).  The
    premise uses the zero completion, where the masked values are equal by
    construction; picking the bracket endpoint below (resp. above) the
    solution guarantees the premise inequality in the required direction.
    """
    lo, hi = endpoints
    zero = Act.constant(t.space, 0.0)
    if gap > 0:
        # f strictly beats the constant with this completion: the premise
        # must put the constant weakly above f, so overshoot with hi.
        const = Act.constant(t.space, hi)
        first, second = const, f
    else:
        const = Act.constant(t.space, lo)
        first, second = f, const

    def with_completion(act: Act, h: Act) -> Act:
        values = tuple(
            act.values[i] if i in event.members else h.values[i]
            for i in range(t.space.size)
        )
        return Act(t.space, values)

    v1 = t(with_completion(first, zero))
    v2 = t(with_completion(second, zero))
    v3 = t(with_completion(first, completion))
    v4 = t(with_completion(second, completion))
    if v1 < v2 or v3 >= v4 - WITNESS_MARGIN:
        return None  # numerical slack ate the construction; no witness
    return Witness(
        f=first.values,
        g=second.values,
        h=zero.values,
        h_alt=completion.values,
        event=tuple(sorted(event.members)),
        values=(v1, v2, v3, v4),
        margin=float(v4 - v3),
    )


def _first_flip(premise: np.ndarray, violation: np.ndarray):
    """Lexicographically first (h, h_alt, event) with premise and violation
    holding on the same event."""
    n_events, count = premise.shape
    for hi in range(count):
        pm = premise[:, hi]
        if not pm.any():
            continue
        joint = pm[:, None] & violation
        cols = np.nonzero(joint.any(axis=0))[0]
        if cols.size == 0:
            continue
        hj = int(cols[0])
        mask = int(np.nonzero(joint[:, hj])[0][0])
        return hi, hj, mask
    return None


def _solve_constant_on_event(
    t: PreferenceFunctional,
    target: float,
    event: EventSet,
    bracket: tuple[float, float],
    tol: float = 1e-13,
) -> tuple[float, float, float]:
    """Solve t(x * 1_event) = target for the constant x by bisection.

    Requires the map x -> t(x * 1_event) to be nondecreasing with the
    target inside the bracket values; a failed bracket signals a strict-
    monotonicity violation upstream.  A flat map (null event) admits any
    solution and returns 0.

    Returns (x, lo, hi) where the final bracket satisfies the invariant
    masked_value(lo) <= target < masked_value(hi) whenever the map is not
    flat; the endpoints give one-sided solutions with a guaranteed
    comparison direction.
    """
    lo, hi = bracket

    def masked_value(x: float) -> float:
        return t(Act.constant(t.space, x).masked(event))

    v_lo, v_hi = masked_value(lo), masked_value(hi)
    if v_lo == v_hi:
        return 0.0, 0.0, 0.0
    slack = 1e-12 * (1.0 + abs(target))
    if not (v_lo <= target + slack and target - slack <= v_hi):
        raise BisectionBracketFailure(
            f"target {target:g} outside masked-value range [{v_lo:g}, {v_hi:g}]"
        )
    # the equations live in evaluator space, so termination tracks the
    # value residual as well as the interval: functionals with unbounded
    # inverse slope otherwise leave residuals of order sqrt(interval)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        v = masked_value(mid)
        if v > target:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol and abs(v - target) <= slack:
            break
    return 0.5 * (lo + hi), lo, hi


def check_conditionable_on_event(
    t: PreferenceFunctional, event: EventSet, tol_scale: float = WITNESS_MARGIN
) -> AuditReport:
    """Search for a two-level act matching the functional on the algebra
    generated by one event.

    For each grid-valued act f the constants x (on the event) and y (off
    it) are found by monotone bisection; the verdict then hinges on the
    full-space equation t(f) = t(x on event, y off), which additivity would
    make automatic but a general functional can fail.
    """
    enum = _GridEnumeration(t)
    complement = event.complement()
    witness = None
    worst = 0.0
    for a in enum.acts:
        f = Act(t.space, a)
        bound = f.sup_norm + 1.0
        x, _, _ = _solve_constant_on_event(
            t, t(f.masked(event)), event, (-bound, bound)
        )
        y, _, _ = _solve_constant_on_event(
            t, t(f.masked(complement)), complement, (-bound, bound)
        )
        g = Act(
            t.space,
            tuple(
                x if i in event.members else y for i in range(t.space.size)
            ),
        )
        tol = tol_scale * (1.0 + f.sup_norm)
        residuals = {
            "event": abs(t(f.masked(event)) - t(g.masked(event))),
            "complement": abs(
                t(f.masked(complement)) - t(g.masked(complement))
            ),
            "full": abs(t(f) - t(g)),
        }
        resid = max(residuals.values())
        worst = max(worst, resid)
        if resid > tol and witness is None:
            witness = {
                "act": list(a),
                "event": sorted(event.members),
                "x": x,
                "y": y,
                "residuals": residuals,
                "tolerance": tol,
            }
    return AuditReport(
        subject=t.name or "functional",
        checks=(
            CheckResult(
                name="conditionable",
                passed=witness is None,
                witness=witness,
                details={
                    "event": sorted(event.members),
                    "worst_residual": worst,
                },
            ),
        ),
    )


def check_conditionable_all_events(
    t: PreferenceFunctional, tol_scale: float = WITNESS_MARGIN
) -> AuditReport:
    """Conditionability on the algebra of every single event of the space."""
    n = t.space.size
    witness = None
    worst = 0.0
    for mask in range(1 << n):
        members = frozenset(i for i in range(n) if mask >> i & 1)
        report = check_conditionable_on_event(
            t, EventSet(t.space, members), tol_scale
        )
        check = report.check("conditionable")
        worst = max(worst, check.details["worst_residual"])
        if not check.passed and witness is None:
            witness = check.witness
    return AuditReport(
        subject=t.name or "functional",
        checks=(
            CheckResult(
                name="conditionable",
                passed=witness is None,
                witness=witness,
                details={"worst_residual": worst},
            ),
        ),
    )


def equivalence_harness(t: PreferenceFunctional) -> AuditReport:
    """Run the sure-thing and conditionability audits and compare verdicts.

    The two verdicts must agree for every functional; disagreement is a
    harness-level failure (it would falsify the implementation, not the
    equivalence itself).
    """
    if t.additive:
        spot_check_additivity(t)
    st = check_sure_thing(t).check("sure-thing")
    cond = check_conditionable_all_events(t).check("conditionable")
    agree = st.passed == cond.passed
    return AuditReport(
        subject=t.name or "functional",
        checks=(
            st,
            cond,
            CheckResult(
                name="verdict-agreement",
                passed=agree,
                details={
                    "sure_thing": st.passed,
                    "conditionable": cond.passed,
                },
            ),
        ),
    )


def expected_utility_functional(
    rep: AdditiveRepresentation,
    grid: tuple[float, ...] = (-1.0, 0.0, 1.0),
    name: str = "expected-utility",
) -> PreferenceFunctional:
    return PreferenceFunctional(
        space=rep.space,
        evaluator=rep.evaluate,
        additive=True,
        grid=grid,
        name=name,
    )


def choquet_functional(
    space: FiniteSpace,
    capacity_exponent: float,
    grid: tuple[float, ...] = (-1.0, 0.0, 1.0),
    name: str = "",
) -> PreferenceFunctional:
    """Choquet integral against the distorted capacity P(A)**exponent.

    Exponent 1 recovers plain expectation; any other exponent makes the
    functional rank-dependent and, in general, breaks the sure-thing
    principle because the complementary payoff affects the ranking.
    """
    weights = space.weight_array()

    def evaluate(f: Act) -> float:
        values = f.value_array()
        order = np.argsort(-values, kind="stable")
        sorted_vals = values[order]
        cum = np.cumsum(weights[order])
        nu = cum ** capacity_exponent
        total = sorted_vals[-1] * nu[-1]
        total += float(np.sum((sorted_vals[:-1] - sorted_vals[1:]) * nu[:-1]))
        return float(total)

    return PreferenceFunctional(
        space=space,
        evaluator=evaluate,
        additive=False,
        grid=grid,
        name=name or f"choquet-p{capacity_exponent:g}",
    )


def grid_table_functional(
    space: FiniteSpace,
    grid: tuple[float, ...],
    table: list[float],
    name: str = "grid-table",
) -> PreferenceFunctional:
    """A functional defined by its values on all grid acts (lexicographic
    order) and nearest-grid rounding for off-grid coordinates."""
    grid = tuple(sorted(float(g) for g in grid))
    n = space.size
    if len(table) != len(grid) ** n:
        raise ValueError(
            f"table needs {len(grid) ** n} entries, got {len(table)}"
        )
    garr = np.asarray(grid)

    def evaluate(f: Act) -> float:
        idx = 0
        for v in f.values:
            d = int(np.argmin(np.abs(garr - v)))
            idx = idx * len(grid) + d
        return float(table[idx])

    return PreferenceFunctional(
        space=space, evaluator=evaluate, additive=False, grid=grid, name=name
    )
