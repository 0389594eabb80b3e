"""Moments of products of rectangular Gaussian blocks three ways.

The pairing sum, the free multiplicative convolution of dilated
Marchenko-Pastur laws and a Monte Carlo estimate all target the same
polynomial in the block dimensions.
"""

from fractions import Fraction

from blockfree.analytic import free_mult_convolve, mp_dilated_moments
from blockfree.moments import format_polynomial, product_polynomial, product_polynomial_terms
from blockfree.params import format_fraction
from blockfree.rmt import EnsembleSpec, partial_trace_moment

p, K = 2, 4
d = [Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)]

for k in range(1, K + 1):
    print(f"P_{k} =", format_polynomial(product_polynomial_terms(p, k)))

conv = mp_dilated_moments(d[1], d[0], K)
for j in range(2, p + 1):
    conv = free_mult_convolve(conv, mp_dilated_moments(d[j], d[0], K))
exact = [product_polynomial(p, k, d) for k in range(K + 1)]
assert list(conv) == exact
print("at d =", [format_fraction(x) for x in d], ":", [format_fraction(x) for x in exact])

# B = T_12 T_23 built from one Ginibre matrix; tau_1((B B*)^2) -> P_2(d)
spec = EnsembleSpec("ginibre", [[[1] * 3] * 3], d, seed=3, samples=200)
row = partial_trace_moment("T[1,2] T[2,3] T[2,3]* T[1,2]* T[1,2] T[2,3] T[2,3]* T[1,2]*", 1, spec,
                           n=240)
print(f"Monte Carlo n=240: {row.empirical:.4f} +/- {row.stderr:.4f} (limit {float(row.exact):.4f})")
