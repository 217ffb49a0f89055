"""Tabulate G_nl(r, r') along a line and show where it stops being smooth.

The reduced Green's function is continuous on the diagonal r = r' but its
first derivative jumps by +2/r'^2 there.  This script
prints G for a fixed r' and estimates the jump numerically.
"""

import mpmath as mp

from coulgreen import QuantumIndex, green

mp.mp.dps = 30

idx = QuantumIndex(2, 1)
rp = mp.mpf(3)

print("G_(2,1)(r, 3) for Z = 1")
for k in range(1, 13):
    r = mp.mpf(k) / 2
    tv = green(idx, r, rp)
    print(f"  r = {float(r):5.2f}   G = {mp.nstr(tv.value, 15):>22}   [{tv.branch}]")

h = mp.mpf("1e-8")
left = (green(idx, rp, rp).value - green(idx, rp - h, rp).value) / h
right = (green(idx, rp + h, rp).value - green(idx, rp, rp).value) / h
print(f"\nslope jump at r = r' : {mp.nstr(right - left, 10)}  (expect {mp.nstr(2 / rp ** 2, 10)})")

# l >= n uses the finite-sum form
hi = QuantumIndex(1, 3)
print(f"\nG_(1,3)(1, 2) = {mp.nstr(green(hi, 1, 2).value, 20)}  [{green(hi, 1, 2).branch}]")
