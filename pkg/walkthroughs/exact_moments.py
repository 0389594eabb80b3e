"""Exact limit moments of symmetric blocks, checked against the Fock-space oracle.

Run with ``python3 walkthroughs/exact_moments.py``.
"""

from fractions import Fraction

from blockfree.analytic import density, jacobi_moments
from blockfree.fock import expectation
from blockfree.moments import PSI, moment
from blockfree.params import ModelParams, format_fraction

# two blocks of relative sizes 1/3 and 2/3, unit variances
d = [Fraction(1, 3), Fraction(2, 3)]
params = ModelParams.from_variances(d)
b12, b21 = params.b(1, 2), params.b(2, 1)

print("off-diagonal block T_12, even moments in each partial state")
for k in (2, 4, 6, 8):
    word = " ".join(["omega_hat[1,2]"] * k)
    row = [moment(word, q, params) for q in (1, 2, PSI)]
    assert row == [expectation(word, q, params) for q in (1, 2, PSI)]
    print(f"  k={k}:", "  ".join(format_fraction(x) for x in row))

# the law of T_12 in the state of block 2 has two-periodic Jacobi coefficients
m = jacobi_moments((b12, b21), 8)
assert all(moment(" ".join(["omega_hat[1,2]"] * k), 2, params) == m[k] for k in range(9))
law = density("theta", b12, b21)
print("two-periodic law: atoms", law.atoms, " m_4 by quadrature", round(law.moment(4), 12))
