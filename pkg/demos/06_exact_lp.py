"""
The exact rational LP layer
===========================

Model computation bottoms out in a small linear-programming module:
exact fractions end to end, a two-phase simplex with Bland's rule, and
a lexicographic mode for deterministic tie-breaking. It is usable on
its own.
"""

from fractions import Fraction

from mvdatalog.lp import LinearProgram, lexicographic_solve, solve

F = Fraction

# minimize x + y subject to x + y >= 3/4 and y >= x, inside the unit box
lp = LinearProgram()
lp.add_variable("x", F(0), F(1))
lp.add_variable("y", F(0), F(1))
lp.add_constraint({"x": F(1), "y": F(1)}, F(3, 4))
lp.add_constraint({"y": F(1), "x": F(-1)}, F(0))
lp.objective = {"x": F(1), "y": F(1)}
solution = solve(lp)
print(f"status:    {solution.status.value}")
print(f"optimum:   {solution.objective_value}")
print(f"point:     x={solution.assignment['x']}, y={solution.assignment['y']}")
# Exactness matters: 3/8 + 3/8 is exactly 3/4, with no epsilon anywhere.

# Fixed variables (how database atoms enter the per-model LPs) are
# substituted away before pivoting, so infeasibility shows up exactly.
pinned = LinearProgram()
pinned.add_variable("x", F(0), F(1))
pinned.fix("x", F(1, 5))
pinned.add_constraint({"x": F(1)}, F(4, 5))
pinned.objective = {"x": F(1)}
print(f"\npinned below a constraint: {solve(pinned).status.value}")

# Lexicographic solving: several points minimize the primary objective;
# the secondary form picks one of them deterministically.
tie = LinearProgram()
tie.add_variable("a", F(0), F(1))
tie.add_variable("b", F(0), F(1))
tie.add_constraint({"a": F(1), "b": F(1)}, F(1))  # a + b >= 1
tie.objective = {}  # primary: indifferent
staged = lexicographic_solve(tie, {"a": F(1)})  # then: prefer small a
print(f"\ntie broken toward a=0: a={staged.assignment['a']}, b={staged.assignment['b']}")
