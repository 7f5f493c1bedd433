"""Model computation and fact entailment.

Pipeline: crispify, chase, translate the ground rules into an exact LP
(one variable per chase atom, one >=K row per ground rule, database
atoms fixed), solve. For plain programs the optimum is the unique
minimal model; with existential rules a weighted variant plus a
lexicographic tie-break yields a deterministic preferred model. A
Kleene-style fixpoint of the consequence operator doubles as an
independent oracle for cross-checks.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from .chase import ChaseResult, matches, oblivious_chase
from .core import (
    ONE,
    ZERO,
    Atom,
    FuzzyDatabase,
    GroundRule,
    Instance,
    LabelledNull,
    RationalLike,
    TruthAssignment,
    active_atoms,
    as_degree,
    body_truth,
    crisp_database,
    crispify,
    k_satisfies,
    luk_implies,
)
from .lp import LinearProgram, Solution, Status, lexicographic_solve, solve


class Unsatisfiable(Exception):
    """The instance has no K-fuzzy model."""


class NoObliviousBaseModel(Exception):
    """No K-fuzzy model whose positive atoms lie inside the chase limit exists.

    Says nothing about models without an oblivious base; the instance may
    still have those.
    """


class TruncatedChase(Exception):
    """The chase hit its step limit; any model computed from it would be unsound."""


class IterationLimit(Exception):
    """The fixpoint oracle failed to stabilize within its round budget."""


class ModelKind(enum.Enum):
    MINIMAL = "minimal"
    PREFERRED = "preferred"


@dataclass(frozen=True)
class GroundModel:
    assignment: TruthAssignment
    kind: ModelKind
    K: Fraction
    certain_atoms: frozenset[Atom] = frozenset()
    gamma_size: int = 0
    variable_count: int = 0


@dataclass(frozen=True)
class QueryResult:
    atom: Atom
    threshold: Fraction
    entailed: bool
    degree: Fraction
    model_relative: bool = False


def ground_atoms(chase: ChaseResult, tau: FuzzyDatabase) -> list[Atom]:
    """The LP's atom universe: atoms of the ground rules plus tau's support."""
    atoms = set(tau.entries)
    for g in chase.gamma:
        atoms.update(g.body)
        atoms.add(g.head)
    return sorted(atoms, key=Atom.sort_key)


def _existential_nulls(rule, head: Atom) -> set[LabelledNull]:
    """Nulls standing at the head positions that were existentially quantified."""
    out = set()
    for pattern_term, ground_term in zip(rule.head.args, head.args):
        if getattr(pattern_term, "name", None) in rule.existential_vars:
            assert isinstance(ground_term, LabelledNull)
            out.add(ground_term)
    return out


def build_optk(
    instance: Instance,
    chase: ChaseResult,
    certain: frozenset[Atom] = frozenset(),
) -> LinearProgram:
    """The base LP: minimize the total truth subject to every ground rule.

    Each ground rule G_1,...,G_l -> H contributes
    sum(1 - x_i) + x_head >= K, i.e. x_head - sum(x_i) >= K - l.
    `certain` atoms (already known to be fully true) are fixed to 1.
    """
    if chase.truncated:
        raise TruncatedChase(f"chase stopped after {chase.steps} steps")
    tau = instance.database
    lp = LinearProgram()
    for a in ground_atoms(chase, tau):
        lp.add_variable(str(a), ZERO, ONE)
        lp.objective[str(a)] = ONE
    for a, d in tau.entries.items():
        lp.fix(str(a), d)
    for a in sorted(certain, key=Atom.sort_key):
        known = tau.degree(a)
        if known is not None:
            if known != ONE:
                raise Unsatisfiable(
                    f"{a} is classically entailed from the certain facts but the "
                    f"database pins it at {known}"
                )
            continue
        lp.fix(str(a), ONE)
    K = instance.K
    for g in chase.gamma:
        coeffs: dict[str, Fraction] = {}
        name = str(g.head)
        coeffs[name] = coeffs.get(name, ZERO) + ONE
        for b in g.body:
            coeffs[str(b)] = coeffs.get(str(b), ZERO) - ONE
        lp.add_constraint(coeffs, K - len(g.body))
    return lp


def build_eoptk(
    instance: Instance, chase: ChaseResult
) -> tuple[LinearProgram, dict[str, Fraction]]:
    """The existential LP plus its tie-breaking secondary objective.

    Rules grounded from existential rules sum, in place of the single head
    variable, all atoms of the universe matching the head pattern (nulls
    replaceable by anything, consistently). Objective weights are 1 on
    null-free atoms and 0 on null-carrying ones; the secondary form sums
    exactly the null-carrying atoms.
    """
    if chase.truncated:
        raise TruncatedChase(f"chase stopped after {chase.steps} steps")
    tau = instance.database
    universe = ground_atoms(chase, tau)
    active = active_atoms(instance, universe)
    lp = LinearProgram()
    secondary: dict[str, Fraction] = {}
    for a in universe:
        lp.add_variable(str(a), ZERO, ONE)
        if a in active:
            lp.objective[str(a)] = ONE
        else:
            secondary[str(a)] = ONE
    for a, d in tau.entries.items():
        lp.fix(str(a), d)
    K = instance.K
    by_predicate: dict[str, list[Atom]] = {}
    for a in universe:
        by_predicate.setdefault(a.predicate, []).append(a)
    for g in chase.gamma:
        rule = instance.program.rule_by_id(g.origin_rule_id)
        coeffs: dict[str, Fraction] = {}
        if rule.is_existential:
            nulls = _existential_nulls(rule, g.head)
            for candidate in by_predicate.get(g.head.predicate, ()):
                if matches(candidate, g.head, nulls):
                    name = str(candidate)
                    coeffs[name] = coeffs.get(name, ZERO) + ONE
        else:
            name = str(g.head)
            coeffs[name] = coeffs.get(name, ZERO) + ONE
        for b in g.body:
            coeffs[str(b)] = coeffs.get(str(b), ZERO) - ONE
        lp.add_constraint(coeffs, K - len(g.body))
    return lp, secondary


def _chase_instance(instance: Instance, step_limit: Optional[int]) -> ChaseResult:
    crisp = crispify(instance.program)
    return oblivious_chase(crisp, crisp_database(instance.database), step_limit)


def _assignment_from(solution: Solution, universe: Sequence[Atom]) -> TruthAssignment:
    support = {}
    for a in universe:
        value = solution.assignment[str(a)]
        if value != ZERO:
            support[a] = value
    return TruthAssignment(support)


def certain_closure(instance: Instance) -> frozenset[Atom]:
    """Classical closure of the fully-true facts under the crisp program.

    Only meaningful as a pruning aid at K = 1: those atoms are fully true
    in every 1-fuzzy model, so their LP variables can be fixed.
    """
    d1 = {a for a, d in instance.database.entries.items() if d == ONE}
    result = oblivious_chase(crispify(instance.program), d1, None)
    return frozenset(result.olim)


def _solve_minimal(
    instance: Instance, chase: ChaseResult, use_fast_path: bool
) -> GroundModel:
    certain = (
        certain_closure(instance)
        if use_fast_path and instance.K == ONE
        else frozenset()
    )
    lp = build_optk(instance, chase, certain=certain)
    solution = solve(lp)
    assert solution.status is not Status.UNBOUNDED, "box-bounded LP cannot be unbounded"
    if not solution.optimal:
        raise Unsatisfiable(f"no {instance.K}-fuzzy model exists")
    universe = ground_atoms(chase, instance.database)
    return GroundModel(
        assignment=_assignment_from(solution, universe),
        kind=ModelKind.MINIMAL,
        K=instance.K,
        certain_atoms=certain,
        gamma_size=len(chase.gamma),
        variable_count=len(universe),
    )


def minimal_model(
    instance: Instance,
    *,
    use_fast_path: bool = True,
    step_limit: Optional[int] = None,
) -> GroundModel:
    """The unique minimal K-fuzzy model, or raise Unsatisfiable.

    Only defined for programs without existential rules; their chase
    always terminates, so `step_limit` is normally left unset.
    """
    if instance.program.has_existential_rules:
        raise ValueError("minimal_model requires an existential-free program")
    chase = _chase_instance(instance, step_limit)
    if chase.truncated:
        raise TruncatedChase("step limit hit on a plain Datalog chase")
    return _solve_minimal(instance, chase, use_fast_path)


def _solve_preferred(instance: Instance, chase: ChaseResult) -> GroundModel:
    lp, secondary = build_eoptk(instance, chase)
    solution = lexicographic_solve(lp, secondary)
    assert solution.status is not Status.UNBOUNDED, "box-bounded LP cannot be unbounded"
    if not solution.optimal:
        raise NoObliviousBaseModel(
            f"no {instance.K}-fuzzy model with an oblivious base exists"
        )
    universe = ground_atoms(chase, instance.database)
    return GroundModel(
        assignment=_assignment_from(solution, universe),
        kind=ModelKind.PREFERRED,
        K=instance.K,
        gamma_size=len(chase.gamma),
        variable_count=len(universe),
    )


def preferred_model(
    instance: Instance, *, step_limit: Optional[int] = None
) -> GroundModel:
    """A deterministic preferred K-fuzzy model, or raise NoObliviousBaseModel.

    Preferred models need not be unique; among the weighted optima the
    representative with the least total truth on null-carrying atoms is
    returned. Raises TruncatedChase when the chase limit cuts the run
    short (the result would be unsound).
    """
    chase = _chase_instance(instance, step_limit)
    if chase.truncated:
        raise TruncatedChase(
            f"chase exceeded {step_limit} steps; supply a higher limit or check acyclicity"
        )
    return _solve_preferred(instance, chase)


def k_truth(
    instance: Instance,
    atom: Atom,
    threshold: RationalLike,
    *,
    use_fast_path: bool = True,
    step_limit: Optional[int] = None,
) -> QueryResult:
    """Is the atom true to at least `threshold` in every K-fuzzy model?

    Decided on the minimal model. For programs with existential rules the
    answer is relative to the deterministic preferred model and flagged
    as such.
    """
    c = as_degree(threshold)
    if not atom.is_ground():
        raise ValueError(f"query atom must be ground: {atom}")
    if instance.program.has_existential_rules:
        model = preferred_model(instance, step_limit=step_limit)
        relative = True
    else:
        model = minimal_model(
            instance, use_fast_path=use_fast_path, step_limit=step_limit
        )
        relative = False
    degree = model.assignment(atom)
    return QueryResult(atom, c, degree >= c, degree, relative)


# ---------------------------------------------------------------------------
# Independent fixpoint oracle


def fixpoint_minimal_model(
    instance: Instance,
    *,
    step_limit: Optional[int] = None,
    max_rounds: Optional[int] = None,
) -> TruthAssignment:
    """Least fixed point of the consequence operator; cross-check only.

    T(nu)(G) = max(seed(G), max over ground rules with head G of
    max(0, nu(body) - 1 + K)), seeded with tau. Raises Unsatisfiable when
    the fixpoint overshoots tau somewhere, IterationLimit if it fails to
    stabilize within the round budget.
    """
    chase = _chase_instance(instance, step_limit)
    if chase.truncated:
        raise TruncatedChase("fixpoint oracle needs the full ground rule set")
    tau = instance.database
    K = instance.K
    nu: dict[Atom, Fraction] = dict(tau.entries)
    universe = ground_atoms(chase, tau)
    budget = max_rounds if max_rounds is not None else len(universe) * len(chase.gamma) + 1
    for _ in range(budget + 1):
        changed = False
        for g in chase.gamma:
            total = sum((nu.get(b, ZERO) for b in g.body), ZERO)
            body = max(ZERO, total - (len(g.body) - 1))
            candidate = body - ONE + K
            if candidate > nu.get(g.head, ZERO):
                nu[g.head] = candidate
                changed = True
        if not changed:
            break
    else:
        raise IterationLimit(f"no fixed point within {budget} rounds")
    for a, d in tau.entries.items():
        if nu[a] > d:
            raise Unsatisfiable(
                f"derivations force {a} to {nu[a]} but the database pins it at {d}"
            )
    return TruthAssignment({a: v for a, v in nu.items() if v > ZERO})


# ---------------------------------------------------------------------------
# Model verification


@dataclass(frozen=True)
class VerificationReport:
    rule_violations: tuple[tuple[GroundRule, Fraction], ...]
    tau_mismatches: tuple[tuple[Atom, Fraction, Fraction], ...]
    outside_base: tuple[Atom, ...]

    @property
    def rules_satisfied(self) -> bool:
        return not self.rule_violations

    @property
    def ok(self) -> bool:
        return not (self.rule_violations or self.tau_mismatches or self.outside_base)


def verify_model(
    instance: Instance, chase: ChaseResult, model: TruthAssignment
) -> VerificationReport:
    """Check a truth assignment against the ground rules, tau, and the chase base.

    Existential ground rules are checked under strong existential
    semantics: the head contribution is the (truncated) sum over all
    support atoms matching the head pattern.
    """
    K = instance.K
    rule_violations = []
    for g in chase.gamma:
        rule = instance.program.rule_by_id(g.origin_rule_id)
        if rule.is_existential:
            nulls = _existential_nulls(rule, g.head)
            head_truth = ZERO
            for candidate in set(model.support) | {g.head}:
                if matches(candidate, g.head, nulls):
                    head_truth += model(candidate)
            head_truth = min(ONE, head_truth)
            value = luk_implies(body_truth(model, g.body), head_truth)
            if value < K:
                rule_violations.append((g, value))
        elif not k_satisfies(model, g, K):
            value = luk_implies(body_truth(model, g.body), model(g.head))
            rule_violations.append((g, value))
    tau_mismatches = []
    for a, d in instance.database.entries.items():
        if model(a) != d:
            tau_mismatches.append((a, d, model(a)))
    outside = tuple(
        sorted((a for a in model.support if a not in chase.olim), key=Atom.sort_key)
    )
    return VerificationReport(tuple(rule_violations), tuple(tau_mismatches), outside)


# ---------------------------------------------------------------------------
# Convenience wrapper with caching


class Engine:
    """One instance, one chase, cached models; safe for repeated queries."""

    def __init__(
        self,
        instance: Instance,
        *,
        step_limit: Optional[int] = None,
        use_fast_path: bool = True,
    ) -> None:
        self.instance = instance
        self.step_limit = step_limit
        self.use_fast_path = use_fast_path

    @property
    def is_existential(self) -> bool:
        return self.instance.program.has_existential_rules

    @cached_property
    def chase(self) -> ChaseResult:
        return _chase_instance(self.instance, self.step_limit)

    @cached_property
    def model(self) -> GroundModel:
        if self.chase.truncated:
            raise TruncatedChase(f"chase exceeded {self.step_limit} steps")
        if self.is_existential:
            return _solve_preferred(self.instance, self.chase)
        return _solve_minimal(self.instance, self.chase, self.use_fast_path)

    def query(self, atom: Atom, threshold: RationalLike) -> QueryResult:
        c = as_degree(threshold)
        if not atom.is_ground():
            raise ValueError(f"query atom must be ground: {atom}")
        degree = self.model.assignment(atom)
        return QueryResult(atom, c, degree >= c, degree, self.is_existential)
