"""
Existential rules and missing data
==================================

Every company must have a key person. We are certain Acme is a company
and 0.8 confident that Amy is its key person. The existential rule
invents a placeholder (a labelled null) for the possibly-different
actual key person -- but how true should that invented fact be?
"""

from fractions import Fraction

from mvdatalog import Engine, Instance, atom, parse, preferred_model

text = """
1 :: company(acme).
0.8 :: kp(amy, acme).
kp(Y, X) :- company(X).
"""
program, database = parse(text)
instance = Instance(program, database, Fraction(1))

# Under strong existential quantification the head of the rule is the
# *sum* of all atoms that could witness it. Amy's 0.8 already covers
# most of the obligation, so the invented kp(_:n1, acme) only needs the
# remaining 0.2 -- instead of a full 1.0 under sup-based semantics.
model = preferred_model(instance)
print("preferred model at K=1:")
for a in sorted(model.assignment.support, key=str):
    print(f"  {a} = {model.assignment(a)}")

# Preferred models minimize the truth of ordinary (null-free) atoms
# first; among those optima, the reported representative also minimizes
# the null atoms, which makes the output reproducible.
engine = Engine(instance)
result = engine.query(atom("kp", "amy", "acme"), Fraction(4, 5))
print(f"kp(amy, acme) >= 4/5: {result.entailed}")
print(f"queries against existential programs are model-relative: {result.model_relative}")
