"""
The chase, step limits, and the finiteness test
===============================================

Existential rules invent fresh constants, and an oblivious chase can
run forever. The engine decides finiteness up front with a weak
acyclicity test on the variable-expanded program, and otherwise demands
an explicit step budget.
"""

from mvdatalog import (
    is_weakly_acyclic_ve,
    oblivious_chase,
    parse,
    variable_expansion,
)

# p(Y) :- p(X) regenerates its own body predicate through a fresh null:
# each invention enables the next application.
program, database = parse("p(a).\np(Y) :- p(X).")

# The plain dependency graph of this rule has no edges at all (X does
# not reach the head), which is why the test first threads every body
# variable through a starred helper predicate.
for rule in variable_expansion(program).rules:
    print(f"expanded: {rule}")

ok, witness = is_weakly_acyclic_ve(program)
print(f"weakly acyclic: {ok}")
print(f"witness cycle:  {witness}")

# A bounded run shows the runaway behaviour: five applications, five
# nulls, still truncated.
result = oblivious_chase(program, {next(iter(database.entries))}, step_limit=5)
print(f"truncated: {result.truncated} after {result.steps} steps")
print(f"atoms: {sorted(str(a) for a in result.olim)}")

# A benign existential program passes the test and its chase closes.
benign, benign_db = parse("company(acme).\nkp(amy, acme).\nkp(Y, X) :- company(X).")
ok, _ = is_weakly_acyclic_ve(benign)
print(f"\nbenign program weakly acyclic: {ok}")
closed = oblivious_chase(benign, set(benign_db.entries))
print(f"chase closed naturally: {not closed.truncated}")
print(f"ground rules: {[str(g) for g in closed.gamma]}")
