"""The cancellation identities in exact rational arithmetic.

Divergent Laurent parts of the individual terms cancel in K and J only
because certain finite double sums vanish identically.  Evaluated on
Fractions they come out as exactly 0, and the two series forms of each
agree term for term.
"""
from fractions import Fraction

from coulgreen import QuantumIndex
from coulgreen.cli import verify_identities
from coulgreen.integrals import c_value, d_value, h_value, identity_h

idx = QuantumIndex(2, 4)
for x in (Fraction(1, 3), Fraction(-7, 2), Fraction(5)):
    a, b = identity_h(idx, 2, x)
    print(f"h at x={x}: {h_value(idx, 2, x)}   series forms {a} == {b}")

print("c(3,1; q=1, x=2/5) =", c_value(QuantumIndex(3, 1), 1, Fraction(2, 5)))
print("d(1,3; p=4, r=2, x=3/2, y=-1/4) =", d_value(QuantumIndex(1, 3), 4, 2, Fraction(3, 2), Fraction(-1, 4)))

rep = verify_identities(nmax=6, draws=2)
print(f"\nsweep n <= 6: {rep['cases']}  failures: {len(rep['failures'])}")
