"""
Inconsistency and relaxed databases
===================================

Fuzzy databases pin atoms to exact degrees, so rules can contradict the
data: r(a) is fully true and forces s(a) up to 1, but the database
insists s(a) = 0.5. Three ways out: report the inconsistency, lower K,
or relax the database to lower bounds.
"""

from fractions import Fraction

from mvdatalog import Instance, Unsatisfiable, atom, minimal_model, parse, relax_rewrite

text = """
1 :: r(a).
0.5 :: s(a).
s(X) :- r(X).
"""
program, database = parse(text)

# 1. As stated, there is no 1-fuzzy model.
try:
    minimal_model(Instance(program, database, Fraction(1)))
except Unsatisfiable as exc:
    print(f"at K=1: {exc}")

# 2. At K=1/2 the rule only needs s(a) >= r(a) - 1 + K = 0.5, which the
#    database already provides: the database itself is the minimal model.
half = minimal_model(Instance(program, database, Fraction(1, 2)))
print("at K=1/2:", {str(a): str(d) for a, d in sorted(half.assignment.support.items(), key=lambda kv: str(kv[0]))})

# 3. Relaxation: rewrite so stored degrees are lower bounds. Each
#    database predicate R gets a primed shadow R' with a bridge rule
#    R(x) -> R'(x), and rules are moved onto the primed predicates.
relaxed, renaming = relax_rewrite(Instance(program, database, Fraction(1)))
print(f"renaming: {renaming}")
for rule in relaxed.program.rules:
    print(f"  {rule}")
model = minimal_model(relaxed)
carrier = atom(renaming["s"], "a")
print(f"relaxed truth of s(a): {model.assignment(carrier)}")
