"""Exact-rational linear programming.

A self-contained two-phase simplex over `fractions.Fraction` with Bland's
anti-cycling rule. Floating point is deliberately avoided: the reasoning
layer turns optima into yes/no decisions and needs exact arithmetic.

Models are small structured objects: box-bounded variables, optional
exact fixings (substituted out before pivoting), and >=-constraints.
Rows are kept as sparse {column: coefficient} dicts.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

ZERO = Fraction(0)
ONE = Fraction(1)


class MalformedModel(ValueError):
    """Inconsistent model data (unknown variables, fixing outside bounds, ...)."""


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    """sum(coeffs[v] * v) >= rhs"""

    coeffs: dict[str, Fraction]
    rhs: Fraction


@dataclass
class LinearProgram:
    variables: list[str] = field(default_factory=list)
    bounds: dict[str, tuple[Fraction, Optional[Fraction]]] = field(default_factory=dict)
    fixings: dict[str, Fraction] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)
    objective: dict[str, Fraction] = field(default_factory=dict)

    def add_variable(
        self,
        name: str,
        lo: Fraction = ZERO,
        hi: Optional[Fraction] = ONE,
    ) -> str:
        if name in self.bounds:
            raise MalformedModel(f"variable {name!r} declared twice")
        self.variables.append(name)
        self.bounds[name] = (Fraction(lo), None if hi is None else Fraction(hi))
        return name

    def fix(self, name: str, value: Fraction) -> None:
        self.fixings[name] = Fraction(value)

    def add_constraint(self, coeffs: Mapping[str, Fraction], rhs: Fraction) -> None:
        self.constraints.append(
            Constraint({v: Fraction(c) for v, c in coeffs.items() if c != 0}, Fraction(rhs))
        )

    def validate(self) -> None:
        declared = set(self.bounds)
        if len(self.variables) != len(declared):
            raise MalformedModel("variable list and bounds disagree")
        for lo, hi in self.bounds.values():
            if hi is not None and lo > hi:
                raise MalformedModel("lower bound above upper bound")
        for name, value in self.fixings.items():
            if name not in declared:
                raise MalformedModel(f"fixing of undeclared variable {name!r}")
            lo, hi = self.bounds[name]
            if value < lo or (hi is not None and value > hi):
                raise MalformedModel(f"fixed value {value} of {name!r} outside bounds")
        for c in self.constraints:
            for v in c.coeffs:
                if v not in declared:
                    raise MalformedModel(f"constraint references undeclared variable {v!r}")
        for v in self.objective:
            if v not in declared:
                raise MalformedModel(f"objective references undeclared variable {v!r}")


@dataclass(frozen=True)
class Solution:
    status: Status
    assignment: dict[str, Fraction]
    objective_value: Optional[Fraction]

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class _Tableau:
    """Sparse simplex tableau in equational form (all columns >= 0)."""

    def __init__(self) -> None:
        self.rows: list[dict[int, Fraction]] = []
        self.rhs: list[Fraction] = []
        self.basis: list[int] = []
        self.active: list[bool] = []
        self.col_rows: dict[int, set[int]] = {}
        self.ncols = 0

    def new_column(self) -> int:
        col = self.ncols
        self.ncols += 1
        self.col_rows[col] = set()
        return col

    def add_row(self, coeffs: dict[int, Fraction], rhs: Fraction, basic: int) -> int:
        rid = len(self.rows)
        self.rows.append(dict(coeffs))
        self.rhs.append(rhs)
        self.basis.append(basic)
        self.active.append(True)
        for col in coeffs:
            self.col_rows[col].add(rid)
        return rid

    def set_entry(self, rid: int, col: int, value: Fraction) -> None:
        row = self.rows[rid]
        if value == 0:
            if col in row:
                del row[col]
                self.col_rows[col].discard(rid)
        else:
            if col not in row:
                self.col_rows[col].add(rid)
            row[col] = value

    def pivot(self, rid: int, col: int, z_row: dict[int, Fraction]) -> Fraction:
        """Make `col` basic in row `rid`; returns the z-row value delta."""
        row = self.rows[rid]
        pivot = row[col]
        if pivot != 1:
            for c in list(row):
                row[c] /= pivot
            self.rhs[rid] /= pivot
        z_delta = ZERO
        factor = z_row.get(col, ZERO)
        if factor != 0:
            for c, v in row.items():
                nv = z_row.get(c, ZERO) - factor * v
                if nv == 0:
                    z_row.pop(c, None)
                else:
                    z_row[c] = nv
            # objective moves by (reduced cost) * (entering value)
            z_delta = factor * self.rhs[rid]
        for other in list(self.col_rows[col]):
            if other == rid or not self.active[other]:
                continue
            f = self.rows[other].get(col)
            if f is None or f == 0:
                continue
            for c, v in row.items():
                self.set_entry(other, c, self.rows[other].get(c, ZERO) - f * v)
            self.rhs[other] -= f * self.rhs[rid]
        self.basis[rid] = col
        return z_delta

    def drop_row(self, rid: int) -> None:
        for col in self.rows[rid]:
            self.col_rows[col].discard(rid)
        self.rows[rid] = {}
        self.active[rid] = False

    def drop_column(self, col: int) -> None:
        for rid in list(self.col_rows.get(col, ())):
            self.rows[rid].pop(col, None)
        self.col_rows.pop(col, None)

    def reduced_costs(self, cost: dict[int, Fraction]) -> tuple[dict[int, Fraction], Fraction]:
        """z-row = cost - cost_B * B^-1 A, and the current objective value."""
        z = dict(cost)
        value = ZERO
        for rid, basic in enumerate(self.basis):
            if not self.active[rid]:
                continue
            c_b = cost.get(basic, ZERO)
            if c_b == 0:
                continue
            value += c_b * self.rhs[rid]
            for col, v in self.rows[rid].items():
                nv = z.get(col, ZERO) - c_b * v
                if nv == 0:
                    z.pop(col, None)
                else:
                    z[col] = nv
        return z, value


def _simplex_loop(tab: _Tableau, z_row: dict[int, Fraction]) -> tuple[str, Fraction]:
    """Bland-rule pivoting until optimal or unbounded; returns value delta."""
    total_delta = ZERO
    while True:
        entering = None
        for col in sorted(z_row):
            if z_row[col] < 0:
                entering = col
                break
        if entering is None:
            return "optimal", total_delta
        leaving = None
        best_ratio: Optional[Fraction] = None
        for rid in sorted(tab.col_rows.get(entering, ())):
            if not tab.active[rid]:
                continue
            a = tab.rows[rid].get(entering, ZERO)
            if a <= 0:
                continue
            ratio = tab.rhs[rid] / a
            if best_ratio is None or ratio < best_ratio or (
                ratio == best_ratio and tab.basis[rid] < tab.basis[leaving]  # type: ignore[index]
            ):
                best_ratio = ratio
                leaving = rid
        if leaving is None:
            return "unbounded", total_delta
        total_delta += tab.pivot(leaving, entering, z_row)
    raise AssertionError("unreachable")


def _substitute_fixings(lp: LinearProgram):
    """Fold fixed variables (and degenerate lo==hi bounds) into constants."""
    fixed = dict(lp.fixings)
    for name, (lo, hi) in lp.bounds.items():
        if hi is not None and lo == hi and name not in fixed:
            fixed[name] = lo
    free = [v for v in lp.variables if v not in fixed]
    rows = []
    for c in lp.constraints:
        rhs = c.rhs
        coeffs: dict[str, Fraction] = {}
        for v, a in c.coeffs.items():
            if v in fixed:
                rhs -= a * fixed[v]
            else:
                coeffs[v] = coeffs.get(v, ZERO) + a
        rows.append((coeffs, rhs))
    return fixed, free, rows


def solve(lp: LinearProgram) -> Solution:
    """Exact optimum of `lp`, or INFEASIBLE / UNBOUNDED.

    Fixed variables are substituted out, the remaining ones shifted to
    start at zero; phase 1 introduces artificials only for rows violated
    at the all-zero point. The returned assignment is re-checked against
    every original constraint, bound, and fixing.
    """
    lp.validate()
    fixed, free, rows = _substitute_fixings(lp)

    # All-fixed rows decide feasibility immediately.
    pending = []
    for coeffs, rhs in rows:
        if coeffs:
            pending.append((coeffs, rhs))
        elif rhs > 0:
            return Solution(Status.INFEASIBLE, {}, None)

    shift = {v: lp.bounds[v][0] for v in free}
    tab = _Tableau()
    var_col = {v: tab.new_column() for v in free}

    def shifted(coeffs: Mapping[str, Fraction], rhs: Fraction) -> tuple[dict[int, Fraction], Fraction]:
        out = {var_col[v]: a for v, a in coeffs.items() if a != 0}
        return out, rhs - sum(a * shift[v] for v, a in coeffs.items())

    artificials: list[int] = []
    ge_rows: list[tuple[dict[int, Fraction], Fraction]] = []
    for coeffs, rhs in pending:
        cols, b = shifted(coeffs, rhs)
        ge_rows.append((cols, b))
    for v in free:
        lo, hi = lp.bounds[v]
        if hi is not None:
            # upper bound row: y_v <= hi - lo
            ge_rows.append(({var_col[v]: Fraction(-1)}, lo - hi))

    for cols, b in ge_rows:
        if b <= 0:
            # -sum >= -b with slack basic at -b >= 0
            slack = tab.new_column()
            row = {c: -a for c, a in cols.items()}
            row[slack] = ONE
            tab.add_row(row, -b, slack)
        else:
            surplus = tab.new_column()
            art = tab.new_column()
            row = dict(cols)
            row[surplus] = Fraction(-1)
            row[art] = ONE
            tab.add_row(row, b, art)
            artificials.append(art)

    if artificials:
        phase1_cost = {a: ONE for a in artificials}
        z_row, value = tab.reduced_costs(phase1_cost)
        outcome, delta = _simplex_loop(tab, z_row)
        assert outcome == "optimal", "phase 1 is bounded below by zero"
        if value + delta > 0:
            return Solution(Status.INFEASIBLE, {}, None)
        art_set = set(artificials)
        for rid in range(len(tab.rows)):
            if not tab.active[rid] or tab.basis[rid] not in art_set:
                continue
            # basic artificial at zero: pivot it out or drop a redundant row
            pivot_col = None
            for col in sorted(tab.rows[rid]):
                if col not in art_set and tab.rows[rid][col] != 0:
                    pivot_col = col
                    break
            if pivot_col is None:
                tab.drop_row(rid)
            else:
                tab.pivot(rid, pivot_col, {})
        for art in artificials:
            tab.drop_column(art)

    cost_cols = {var_col[v]: c for v, c in lp.objective.items() if v in var_col and c != 0}
    z_row, value = tab.reduced_costs(cost_cols)
    outcome, delta = _simplex_loop(tab, z_row)
    if outcome == "unbounded":
        return Solution(Status.UNBOUNDED, {}, None)

    values = {col: ZERO for col in var_col.values()}
    for rid, basic in enumerate(tab.basis):
        if tab.active[rid] and basic in values:
            values[basic] = tab.rhs[rid]
    assignment = dict(fixed)
    for v in free:
        assignment[v] = shift[v] + values[var_col[v]]
    objective_value = sum(
        (c * assignment[v] for v, c in lp.objective.items()), ZERO
    )
    _audit(lp, assignment)
    return Solution(Status.OPTIMAL, assignment, objective_value)


def _audit(lp: LinearProgram, assignment: dict[str, Fraction]) -> None:
    """Exact feasibility re-check of a claimed-optimal assignment."""
    for v, (lo, hi) in lp.bounds.items():
        x = assignment[v]
        if x < lo or (hi is not None and x > hi):
            raise AssertionError(f"solver bug: {v} = {x} violates bounds")
    for v, value in lp.fixings.items():
        if assignment[v] != value:
            raise AssertionError(f"solver bug: fixing of {v} not honoured")
    for c in lp.constraints:
        lhs = sum((a * assignment[v] for v, a in c.coeffs.items()), ZERO)
        if lhs < c.rhs:
            raise AssertionError(f"solver bug: constraint violated by {c.rhs - lhs}")


def lexicographic_solve(lp: LinearProgram, secondary: Mapping[str, Fraction]) -> Solution:
    """Optimize lp's objective, then minimize `secondary` among its optima.

    The returned solution carries the primary objective value; its
    assignment is the stage-two optimum.
    """
    first = solve(lp)
    secondary = {v: Fraction(c) for v, c in secondary.items() if c != 0}
    if not first.optimal or not secondary:
        return first
    stage2 = LinearProgram(
        variables=list(lp.variables),
        bounds=dict(lp.bounds),
        fixings=dict(lp.fixings),
        constraints=list(lp.constraints),
        objective=dict(secondary),
    )
    primary = {v: c for v, c in lp.objective.items() if c != 0}
    assert first.objective_value is not None
    stage2.add_constraint(primary, first.objective_value)
    stage2.add_constraint({v: -c for v, c in primary.items()}, -first.objective_value)
    second = solve(stage2)
    assert second.optimal, "stage two inherits a feasible point"
    return Solution(Status.OPTIMAL, second.assignment, first.objective_value)
