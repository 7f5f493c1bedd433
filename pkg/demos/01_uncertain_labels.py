"""
Reasoning over uncertain observations
=====================================

An image classifier labels picture i1 as a whale with confidence 0.8,
and a geo-tagger says it was taken in a polar region with confidence
0.7. A rule says whales in polar regions are orcas. What confidence do
we get for the orca conclusion?
"""

from fractions import Fraction

from mvdatalog import Engine, Instance, atom, minimal_model, parse

text = """
0.8 :: label(i1, whale).
0.7 :: polar(i1).
orca(X) :- label(X, whale), polar(X).
"""
program, database = parse(text)

# Under the conjunction max(0, a + b - 1), stacking two uncertain
# observations becomes *less* certain: 0.8 (x) 0.7 = 0.5. The minimal
# model therefore believes orca(i1) to exactly degree 1/2 -- not 0.7
# (the min), and not 1.0 (classical logic after thresholding).
instance = Instance(program, database, Fraction(1))
model = minimal_model(instance)
print("minimal model at K=1:")
for a in sorted(model.assignment.support, key=str):
    print(f"  {a} = {model.assignment(a)}")

# Entailment is decided on the minimal model: a fact is entailed at
# threshold c iff every 1-fuzzy model believes it to degree >= c.
engine = Engine(instance)
for threshold in (Fraction(1, 2), Fraction(51, 100)):
    result = engine.query(atom("orca", "i1"), threshold)
    verdict = "entailed" if result.entailed else "NOT entailed"
    print(f"orca(i1) >= {threshold}: {verdict}")

# K tunes how strictly rules must hold. At K = 4/5 every ground rule may
# fall short of full truth by 1/5, so the derived degree drops: the head
# only needs body - 1 + K = 0.5 - 0.2 = 0.3.
relaxed_k = minimal_model(Instance(program, database, Fraction(4, 5)))
print(f"orca(i1) at K=4/5: {relaxed_k.assignment(atom('orca', 'i1'))}")
