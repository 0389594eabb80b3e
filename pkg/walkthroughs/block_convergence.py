"""Convergence of partial-trace moments of symmetric blocks as n grows.

Covers a balanced block, where both dimensions are positive, and an
unbalanced one, where the first block has size floor(sqrt(n)).
"""

from fractions import Fraction

from blockfree.rmt import EnsembleSpec, convergence_report

ones = [[[1, 1], [1, 1]]]
word = "T[1,2] T[1,2] T[1,2] T[1,2]"

balanced = EnsembleSpec("hermitian-gaussian", ones, [Fraction(1, 2), Fraction(1, 2)], seed=1,
                        samples=200, n_grid=(50, 100, 200))
unbalanced = EnsembleSpec("hermitian-gaussian", ones, [0, 1], seed=1, samples=200,
                          n_grid=(50, 100, 200))

for name, spec, kw in [("balanced", balanced, {}),
                       ("unbalanced", unbalanced, {"c": 20, "rate": "1/sqrt(n)"})]:
    report = convergence_report([word], [1, 2], spec, **kw)
    print(name)
    for r in report.rows:
        print(f"  q={r.q} n={r.n:4d} empirical={r.empirical:.4f} exact={float(r.exact):.4f} "
              f"tol={r.tolerance:.4f} {'ok' if r.passed else 'FAIL'}")
