"""K and J next to a brute-force quadrature, plus the lambda = 1/n branch.

K_nl(beta, beta'; q, q') = int int e^(-beta r - beta' r') G(r, r') r^q r'^q' dr dr'
J_nl(beta, x; q)        = int e^(-beta r') G(x, r') r'^q dr'
"""
from fractions import Fraction
import time

import mpmath as mp

from coulgreen import QuantumIndex, j_mom, k_gen
from coulgreen.oracle import oracle_j, oracle_k

mp.mp.dps = 34

print("K: closed form vs 2D quadrature")
for (n, l), b, bp, q, qp in [((1, 0), 1, 1, 0, 0), ((2, 1), Fraction(37, 100), Fraction(37, 100), 2, 1),
                             ((3, 5), 2, 1, 3, 3), ((6, 2), 1, 2, 1, 0)]:
    idx = QuantumIndex(n, l)
    t = time.perf_counter()
    a = k_gen(idx, b, bp, q, qp)
    ta = time.perf_counter() - t
    t = time.perf_counter()
    o = oracle_k(idx, b, bp, q, qp)
    to = time.perf_counter() - t
    rel = abs(float(a.value) - o.value) / abs(o.value)
    print(f"  n={n} l={l} q={q},{qp}: {mp.nstr(a.value, 16):>24}  rel dev {rel:.1e}"
          f"  ({ta * 1e3:.0f} ms vs {to * 1e3:.0f} ms)")

print("\nJ along r for n=3, l=1, q=1, lambda=1/3 (degenerate branch)")
idx = QuantumIndex(3, 1)
for x in (Fraction(1, 10), 1, 5, 20):
    r = j_mom(idx, Fraction(1, 3), x, 1)
    o = oracle_j(idx, Fraction(1, 3), x, 1)
    print(f"  x={float(x):5.1f}  J = {mp.nstr(r.value, 16):>24}  quad {o.value: .15e}  {r.branch_tags[-1]}")

print("\nContinuity through lambda = 1/3")
for e in (Fraction(-1, 10 ** 4), Fraction(-1, 10 ** 6), 0, Fraction(1, 10 ** 6), Fraction(1, 10 ** 4)):
    v = k_gen(idx, Fraction(1, 3) + e, 1, 2, 0).value
    print(f"  lambda - 1/3 = {float(e): .0e}   K = {mp.nstr(v, 14)}")

print("\nA row no quadrature handles comfortably: (n,l,q,q') = (16,15,10,10)")
t = time.perf_counter()
r = k_gen(QuantumIndex(16, 15), 1, 1, 10, 10)
print(f"  K = {mp.nstr(r.value, 20)}  err est {float(r.abs_err_est):.1e}  {time.perf_counter() - t:.2f} s")
