"""Core domain types and Lukasiewicz semantics.

Truth degrees are exact rationals (`fractions.Fraction`) in [0, 1]; the
whole engine avoids floating point, so every comparison such as
``degree >= threshold`` is an exact decision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

ZERO = Fraction(0)
ONE = Fraction(1)

RationalLike = Union[Fraction, int, str]


class DomainError(ValueError):
    """A truth degree lies outside its permitted range, or a fuzzy fact is ill-formed."""


class ArityError(ValueError):
    """A predicate symbol is used with inconsistent arities."""


def as_degree(value: RationalLike, *, positive: bool = False) -> Fraction:
    """Coerce to an exact truth degree in [0, 1] ((0, 1] when positive=True)."""
    try:
        degree = Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not a rational degree: {value!r}") from exc
    if degree < ZERO or degree > ONE:
        raise DomainError(f"degree {degree} outside [0, 1]")
    if positive and degree == ZERO:
        raise DomainError("degree must be strictly positive")
    return degree


# ---------------------------------------------------------------------------
# Terms and atoms


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class LabelledNull:
    """Fresh constant invented by the chase to witness an existential head variable.

    Ids are unique within one chase run and can never collide with constants
    (distinct type, distinct rendering).
    """

    id: int

    def __str__(self) -> str:
        return f"_:n{self.id}"


Term = Union[Variable, Constant, LabelledNull]


def term_sort_key(term: Term) -> tuple:
    """Total order over terms: constants, then variables, then nulls."""
    if isinstance(term, Constant):
        return (0, term.name, 0)
    if isinstance(term, Variable):
        return (1, term.name, 0)
    return (2, "", term.id)


@dataclass(frozen=True)
class Atom:
    """A relational atom. Ground atoms (no variables) are hashable map keys."""

    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def is_ground(self) -> bool:
        return not any(isinstance(t, Variable) for t in self.args)

    def has_nulls(self) -> bool:
        return any(isinstance(t, LabelledNull) for t in self.args)

    def variables(self) -> set[str]:
        return {t.name for t in self.args if isinstance(t, Variable)}

    def constants(self) -> set[str]:
        return {t.name for t in self.args if isinstance(t, Constant)}

    def sort_key(self) -> tuple:
        return (self.predicate, len(self.args), tuple(term_sort_key(t) for t in self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({', '.join(str(t) for t in self.args)})"


# Alias used in signatures where groundness is a contract, not a separate type.
GroundAtom = Atom


def atom(predicate: str, *args: Union[Term, str]) -> Atom:
    """Convenience constructor mirroring the surface syntax.

    String arguments starting with an uppercase letter become variables,
    anything else a constant; Term instances pass through unchanged.
    """
    converted: list[Term] = []
    for a in args:
        if isinstance(a, (Variable, Constant, LabelledNull)):
            converted.append(a)
        elif a[:1].isupper():
            converted.append(Variable(a))
        else:
            converted.append(Constant(a))
    return Atom(predicate, tuple(converted))


def substitute(a: Atom, mapping: Mapping[str, Term]) -> Atom:
    """Replace variables of `a` by their images; unmapped variables stay."""
    return Atom(
        a.predicate,
        tuple(mapping.get(t.name, t) if isinstance(t, Variable) else t for t in a.args),
    )


# ---------------------------------------------------------------------------
# Rules, programs, databases


@dataclass(frozen=True)
class Rule:
    """A rule body_1 (x) ... (x) body_n -> head.

    Head variables that do not occur in the body are existentially
    quantified (the Datalog+- convention); plain rules have none.
    """

    id: int
    body: tuple[Atom, ...]
    head: Atom
    existential_vars: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.body:
            raise ValueError("rule body must be non-empty")
        for a in (*self.body, self.head):
            if a.has_nulls():
                raise ValueError("labelled nulls cannot occur in a rule")
        body_vars = set().union(*(a.variables() for a in self.body))
        expected = self.head.variables() - body_vars
        if set(self.existential_vars) != expected:
            raise ValueError(
                f"rule {self.id}: existential_vars {set(self.existential_vars)} "
                f"!= head-only variables {expected}"
            )

    @property
    def is_existential(self) -> bool:
        return bool(self.existential_vars)

    def body_variables(self) -> set[str]:
        return set().union(*(a.variables() for a in self.body))

    def __str__(self) -> str:
        return f"{self.head} :- {', '.join(str(a) for a in self.body)}"


def make_rule(rule_id: int, body: Sequence[Atom], head: Atom) -> Rule:
    """Build a rule, inferring existential variables from head-only variables."""
    body = tuple(body)
    body_vars = set().union(*(a.variables() for a in body)) if body else set()
    return Rule(rule_id, body, head, frozenset(head.variables() - body_vars))


def infer_signature(atoms: Iterable[Atom], signature: Optional[dict[str, int]] = None) -> dict[str, int]:
    """Accumulate a predicate -> arity map, rejecting inconsistent arities."""
    sig = dict(signature) if signature else {}
    for a in atoms:
        known = sig.get(a.predicate)
        if known is None:
            sig[a.predicate] = a.arity
        elif known != a.arity:
            raise ArityError(f"predicate {a.predicate!r} used with arities {known} and {a.arity}")
    return sig


@dataclass(frozen=True)
class Program:
    rules: tuple[Rule, ...]
    signature: dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_rules(cls, rules: Sequence[Rule], extra_atoms: Iterable[Atom] = ()) -> "Program":
        rules = tuple(rules)
        ids = [r.id for r in rules]
        if len(set(ids)) != len(ids):
            raise ValueError("rule ids must be unique")
        sig = infer_signature(
            [a for r in rules for a in (*r.body, r.head)] + list(extra_atoms)
        )
        return cls(rules, sig)

    def rule_by_id(self, rule_id: int) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    @property
    def has_existential_rules(self) -> bool:
        return any(r.is_existential for r in self.rules)

    def constants(self) -> set[str]:
        out: set[str] = set()
        for r in self.rules:
            for a in (*r.body, r.head):
                out |= a.constants()
        return out


@dataclass(frozen=True)
class FuzzyDatabase:
    """The partial truth assignment tau: finitely many ground atoms with degrees in (0, 1]."""

    entries: dict[Atom, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for a, d in self.entries.items():
            if not a.is_ground():
                raise DomainError(f"database atom {a} is not ground")
            if a.has_nulls():
                raise DomainError(f"database atom {a} contains a labelled null")
            as_degree(d, positive=True)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Atom, RationalLike]]) -> "FuzzyDatabase":
        entries: dict[Atom, Fraction] = {}
        for a, raw in pairs:
            d = as_degree(raw, positive=True)
            if a in entries and entries[a] != d:
                raise DomainError(f"conflicting degrees {entries[a]} and {d} for fact {a}")
            entries[a] = d
        return cls(entries)

    def degree(self, a: Atom) -> Optional[Fraction]:
        return self.entries.get(a)

    def support(self) -> set[Atom]:
        return set(self.entries)

    def constants(self) -> set[str]:
        out: set[str] = set()
        for a in self.entries:
            out |= a.constants()
        return out

    def __contains__(self, a: Atom) -> bool:
        return a in self.entries

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class TruthAssignment:
    """A total valuation with finite support: atoms off-support have degree 0."""

    support: dict[Atom, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for a, d in self.support.items():
            as_degree(d, positive=True)

    @classmethod
    def from_map(cls, mapping: Mapping[Atom, RationalLike]) -> "TruthAssignment":
        return cls({a: as_degree(d) for a, d in mapping.items() if Fraction(d) != ZERO})

    def __call__(self, a: Atom) -> Fraction:
        return self.support.get(a, ZERO)

    def atoms(self) -> set[Atom]:
        return set(self.support)

    def __len__(self) -> int:
        return len(self.support)


@dataclass(frozen=True)
class GroundRule:
    """A grounding of a rule; body order (and multiplicity) is preserved."""

    origin_rule_id: int
    body: tuple[Atom, ...]
    head: Atom

    def __str__(self) -> str:
        return f"{self.head} :- {', '.join(str(a) for a in self.body)}"


@dataclass(frozen=True)
class Instance:
    """A program paired with a fuzzy database and the satisfaction level K."""

    program: Program
    database: FuzzyDatabase
    K: Fraction = ONE

    def __post_init__(self) -> None:
        as_degree(self.K, positive=True)
        infer_signature(self.database.entries, self.program.signature)


# ---------------------------------------------------------------------------
# Lukasiewicz connectives


def luk_and(a: Fraction, b: Fraction) -> Fraction:
    return max(ZERO, a + b - ONE)


def luk_or(a: Fraction, b: Fraction) -> Fraction:
    return min(ONE, a + b)


def luk_not(a: Fraction) -> Fraction:
    return ONE - a


def luk_implies(a: Fraction, b: Fraction) -> Fraction:
    return min(ONE, ONE - a + b)


def body_truth(nu: TruthAssignment, body: Sequence[Atom]) -> Fraction:
    """Conjunction of the body atoms: max(0, sum(nu(G_i)) - (l - 1))."""
    if not body:
        raise ValueError("body must be non-empty")
    total = sum((nu(a) for a in body), ZERO)
    return max(ZERO, total - (len(body) - 1))


def rule_gap(nu: TruthAssignment, gamma: GroundRule, K: Fraction) -> Fraction:
    """nu(head) - (nu(body) - 1 + K); >= 0 iff K-satisfied, == 0 iff tight."""
    return nu(gamma.head) - (body_truth(nu, gamma.body) - ONE + K)


def k_satisfies(nu: TruthAssignment, gamma: GroundRule, K: Fraction) -> bool:
    """True iff the implication value min(1, 1 - nu(body) + nu(head)) reaches K."""
    return rule_gap(nu, gamma, K) >= ZERO


# ---------------------------------------------------------------------------
# Classical projections and rewritings


def crispify(program: Program) -> Program:
    """Project to the classical reading of the same rules.

    The syntax carries no connective objects, so the structure is reused
    as-is; downstream consumers evaluate it two-valued.
    """
    return program


def crisp_database(tau: FuzzyDatabase) -> set[Atom]:
    """All facts on which tau is defined (degrees are positive by invariant)."""
    return set(tau.entries)


def active_domain(program: Program, tau: FuzzyDatabase) -> set[str]:
    return program.constants() | tau.constants()


def active_atoms(instance: Instance, universe: Iterable[Atom]) -> set[Atom]:
    """The null-free atoms of `universe` over the instance's active domain."""
    adom = active_domain(instance.program, instance.database)
    out = set()
    for a in universe:
        if all(isinstance(t, Constant) and t.name in adom for t in a.args):
            out.add(a)
    return out


def _fresh_predicate(base: str, taken: set[str]) -> str:
    candidate = base + "'"
    while candidate in taken:
        candidate += "'"
    return candidate


def relax_rewrite(instance: Instance) -> tuple[Instance, dict[str, str]]:
    """Rewrite so that models only need nu(G) >= tau(G) on defined atoms.

    For every predicate R occurring in tau, a bridge rule R(x) -> R'(x) is
    added and all other occurrences of R in the program are replaced by R'.
    Returns the rewritten instance and the renaming {original: primed}.
    """
    tau_preds = sorted({a.predicate for a in instance.database.entries})
    if not tau_preds:
        return instance, {}
    taken = set(instance.program.signature) | set(tau_preds)
    renaming: dict[str, str] = {}
    for p in tau_preds:
        primed = _fresh_predicate(p, taken)
        taken.add(primed)
        renaming[p] = primed

    def prime(a: Atom) -> Atom:
        return Atom(renaming.get(a.predicate, a.predicate), a.args)

    sig = dict(instance.program.signature)
    sig.update({a.predicate: a.arity for a in instance.database.entries})
    rules: list[Rule] = []
    for p in tau_preds:
        args = tuple(Variable(f"X{i + 1}") for i in range(sig[p]))
        rules.append(make_rule(len(rules), [Atom(p, args)], Atom(renaming[p], args)))
    for r in instance.program.rules:
        rules.append(make_rule(len(rules), [prime(a) for a in r.body], prime(r.head)))
    program = Program.from_rules(rules, extra_atoms=list(instance.database.entries))
    return Instance(program, instance.database, instance.K), renaming
