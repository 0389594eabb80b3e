"""Acceptance suite: one summary line per criterion, printed after the run."""

import itertools
import random
import time
from fractions import Fraction as F

import pytest

from blockfree.analytic import (
    catalan,
    density,
    free_bessel_moments,
    free_mult_convolve,
    fuss_catalan,
    jacobi_cauchy,
    jacobi_moments,
    mp_dilated_moments,
    narayana,
    theta_cauchy,
    semicircle_moments,
    bernoulli_moments,
    mp_moments,
)
from blockfree.fock import expectation, independence_check
from blockfree.moments import (
    PSI,
    catalan_matrices,
    moment,
    moment_canonical,
    moment_collective,
    moment_eta,
    moment_gaussian,
    moment_symmetrized,
    multivariate_narayana,
    product_polynomial,
)
from blockfree.params import ModelParams
from blockfree.partitions import enumerate_nc_pair, enumerate_word_pairings
from blockfree.rmt import EnsembleSpec, convergence_report, eigenvalue_histogram

pytestmark = pytest.mark.acceptance


def rand_q(rng, lo=0, hi=6):
    return F(rng.randint(lo, hi), rng.randint(1, 5))


def power(token, k):
    return " ".join([token] * k)


def delta(a, b):
    return 1 if a == b else 0


class Checks:
    """Named boolean checks with a per-check time budget."""

    def __init__(self, budget=None):
        self.results, self.budget = [], budget

    def __call__(self, name, fn):
        t = time.perf_counter()
        ok = bool(fn())
        dt = time.perf_counter() - t
        if self.budget is not None and dt >= self.budget:
            ok = False
            name += f" (took {dt:.2f}s)"
        self.results.append((name, ok))
        return ok

    @property
    def failed(self):
        return [name for name, ok in self.results if not ok]

    def summary(self):
        n = len(self.results)
        if not self.failed:
            return f"{n}/{n} checks"
        return f"{n - len(self.failed)}/{n} checks; failed: " + ", ".join(self.failed)


# criterion 1 --------------------------------------------------------------------

def gamma_params(seed):
    rng = random.Random(seed)
    d = [rand_q(rng, 1) for _ in range(3)]
    r = [rand_q(rng, -3, 3) for _ in range(3)]
    return d, r, ModelParams.from_variances(d, cumulants=[r])


def gamma_third_as_stated(p, q, s, d, r):
    r1, r2, r3 = r
    dp, dq, ds = d[p - 1], d[q - 1], d[s - 1]
    return (r3 * dp * ds + delta(s, p) * r1 * r2 * dp + delta(p, s) * delta(p, q) * r1 * r2 * dq
            + delta(p, q) * r1 * r2 * ds + delta(p, q) * delta(p, s) * r1 ** 3)


def gamma_third_corrected(p, q, s, d, r):
    # the r_3 term needs gamma_{s,p} to close on color s, hence delta_{s,p}
    r1, r2, r3 = r
    return gamma_third_as_stated(p, q, s, d, r) - (1 - delta(s, p)) * r3 * d[p - 1] * d[s - 1]


def gamma_third_agreement(formula, seeds=range(3)):
    hits = total = 0
    for seed in seeds:
        d, r, P = gamma_params(seed)
        for p, q, s in itertools.product((1, 2, 3), repeat=3):
            got = moment(f"gamma[{s},{q}] gamma[{s},{p}] gamma[{p},{q}]", q, P)
            hits += got == formula(p, q, s, d, r)
            total += 1
    return hits, total


def test_criterion_1_examples(verdict):
    c = Checks(budget=1.0)
    rng = random.Random(1)
    d = [rand_q(rng, 1) for _ in range(3)]
    B = [[[rand_q(rng) for _ in range(3)] for _ in range(3)] for _ in range(2)]
    P = ModelParams(d, B)
    p, q, k, u, t = 1, 2, 3, 1, 2
    c("gaussian mixed", lambda: moment_gaussian(
        f"omega[{p},{q};{u}] {power(f'omega[{k},{p};{t}]', 4)} omega[{p},{q};{u}]", q, P)
        == P.b(k, p, t) ** 2 * P.b(p, q, u))
    c("gaussian mixed diagonal", lambda: moment_gaussian(
        f"omega[{p},{q};{u}] {power(f'omega[{p},{p};{t}]', 4)} omega[{p},{q};{u}]", q, P)
        == 2 * P.b(p, p, t) ** 2 * P.b(p, q, u))

    b12, b21 = P.b(1, 2), P.b(2, 1)
    c("omega^4 q=1", lambda: moment_gaussian(power("omega[1,2]", 4), 1, P) == 0)
    c("omega^4 q=2", lambda: moment_gaussian(power("omega[1,2]", 4), 2, P) == b12 ** 2)
    c("omega_hat^4 q=1", lambda: moment_symmetrized(power("omega_hat[1,2]", 4), 1, P)
      == b21 ** 2 + b12 * b21)
    c("omega_hat^4 q=2", lambda: moment_symmetrized(power("omega_hat[1,2]", 4), 2, P)
      == b12 ** 2 + b12 * b21)

    dp, dq = F(1, 3), F(2, 3)
    U = ModelParams.from_variances([dp, dq])
    c("omega_hat^6 q", lambda: moment_symmetrized(power("omega_hat[1,2]", 6), 2, U)
      == dp ** 3 + 3 * dp ** 2 * dq + dp * dq ** 2)
    c("omega_hat^6 Psi", lambda: moment_symmetrized(power("omega_hat[1,2]", 6), PSI, U)
      == 2 * dp * dq ** 3 + 6 * dp ** 2 * dq ** 2 + 2 * dp ** 3 * dq)

    gd, gr, G = gamma_params(0)
    r1, r2, _ = gr
    c("gamma first", lambda: all(moment(f"gamma[{a},{b}]", b, G) == delta(a, b) * r1
                                 for a, b in itertools.product((1, 2, 3), repeat=2)))
    c("gamma second", lambda: all(
        moment(f"gamma[{a},{b}] gamma[{a},{b}]", b, G) == r2 * gd[a - 1] + delta(a, b) * r1 ** 2
        for a, b in itertools.product((1, 2, 3), repeat=2)))
    hits, total = gamma_third_agreement(gamma_third_as_stated)
    c(f"gamma third as stated ({hits}/{total} index triples)", lambda: hits == total)

    e2, e1 = P.b(1, 2, 2), P.b(2, 1, 1)
    c("eta sixth", lambda: moment_eta(power("eta[1,2] eta[1,2]*", 3), 2, P)
      == e2 ** 3 + 3 * e2 ** 2 * e1 + e2 * e1 ** 2)

    d1, d2, d3 = F(2, 3), F(5, 7), F(3, 4)
    P1 = [d2, d2 * d1 + d2 ** 2, d2 * d1 ** 2 + 3 * d2 ** 2 * d1 + d2 ** 3,
          d2 * d1 ** 3 + 6 * d2 ** 2 * d1 ** 2 + 6 * d2 ** 3 * d1 + d2 ** 4]
    c("P_1..P_4 (p=1)", lambda: [product_polynomial(1, j, [d1, d2]) for j in (1, 2, 3, 4)] == P1)
    c("P_2 (p=2)", lambda: product_polynomial(2, 2, [d1, d2, d3])
      == d2 ** 2 * d3 ** 2 + d1 * d2 * d3 ** 2 + d1 * d2 ** 2 * d3)
    t1, t2 = F(2, 5), F(7, 3)
    c("N_2", lambda: multivariate_narayana(2, [t1, t2]) == t1 ** 2 * t2 ** 2 + t1 * t2 ** 2
      + t1 ** 2 * t2)

    verdict(1, not c.failed, c.summary())
    # the stated third gamma moment is tracked by its own strict xfail below
    assert [n for n in c.failed if not n.startswith("gamma third as stated")] == []


def test_criterion_1_gamma_third_corrected():
    hits, total = gamma_third_agreement(gamma_third_corrected, seeds=range(6))
    assert hits == total


@pytest.mark.xfail(strict=True, reason="the stated r_3 term omits delta_{s,p}; see decisions log")
def test_criterion_1_gamma_third_as_stated():
    hits, total = gamma_third_agreement(gamma_third_as_stated)
    assert hits == total


# criterion 2 --------------------------------------------------------------------

KINDS = ("omega", "omega_hat", "gamma", "gamma_hat", "eta")


def random_word(rng, kind, m):
    return " ".join(f"{kind}[{rng.randint(1, 2)},{rng.randint(1, 2)};{rng.randint(1, 2)}]"
                    + ("*" if kind == "eta" and rng.random() < 0.5 else "") for _ in range(m))


def test_criterion_2_oracle_equivalence(verdict):
    rng = random.Random(2024)
    start = time.perf_counter()
    sets = compared = 0
    bad = []
    for _ in range(200):
        d = [rand_q(rng) for _ in range(2)]
        B = [[[rand_q(rng) for _ in range(2)] for _ in range(2)] for _ in range(2)]
        cum = [[rand_q(rng, -3, 3) for _ in range(rng.randint(1, 6))] for _ in range(2)]
        P = ModelParams(d, B, cum)
        sets += 1
        for kind in KINDS:
            for m in range(7):
                w = random_word(rng, kind, m)
                for q in (1, 2, PSI):
                    compared += 1
                    if moment(w, q, P) != expectation(w, q, P):
                        bad.append((w, q))
    dt = time.perf_counter() - start
    ok = not bad and dt < 120
    verdict(2, ok, f"{sets} parameter sets, {compared} moments, {len(bad)} mismatches, {dt:.1f}s")
    assert not bad, bad[:5]
    assert dt < 120


# criterion 3 --------------------------------------------------------------------

def test_criterion_3_combinatorics(verdict):
    c = Checks()
    c("|NC2(2k)| = C_k, k<=8", lambda: all(len(enumerate_nc_pair(2 * k)) == catalan(k)
                                           for k in range(9)))

    def even_right_legs(k):
        counts = {}
        for pi in enumerate_nc_pair(2 * k):
            j = sum(1 for x in pi.right_legs() if x % 2 == 0)
            counts[j] = counts.get(j, 0) + 1
        return counts == {j: narayana(k, j) for j in range(1, k + 1)}

    c("even right legs Narayana, k<=7", lambda: all(even_right_legs(k) for k in range(1, 8)))
    c("|NC2(W_k)| = F(p,k), p<=3, k<=4", lambda: all(
        len(enumerate_word_pairings(p, k)) == fuss_catalan(p, k)
        for p in (1, 2, 3) for k in range(1, 5)))
    c("sum_j N(k,j) = C_k", lambda: all(sum(narayana(k, j) for j in range(1, k + 1)) == catalan(k)
                                        for k in range(1, 13)))
    verdict(3, not c.failed, c.summary())
    assert not c.failed


# criterion 4 --------------------------------------------------------------------

def test_criterion_4_recurrences(verdict):
    c = Checks()
    rng = random.Random(4)

    def catalan_vs_enumeration():
        for _ in range(3):
            d = [rand_q(rng) for _ in range(2)]
            B = [[[rand_q(rng) for _ in range(2)] for _ in range(2)] for _ in range(2)]
            P = ModelParams(d, B)
            C = catalan_matrices(P, 5)
            if any(C[n][q - 1] != moment_collective(2 * n, q, P) for n in range(6) for q in (1, 2)):
                return False
        return True

    c("catalan matrices = pairing enumeration, n<=5", catalan_vs_enumeration)

    def s_transform_products():
        count = 0
        for _ in range(24):
            d = [rand_q(rng, 1) for _ in range(4)]
            for p in (1, 2, 3):
                m = mp_dilated_moments(d[1], d[0], 6)
                for j in range(2, p + 1):
                    m = free_mult_convolve(m, mp_dilated_moments(d[j], d[0], 6))
                if list(m) != [product_polynomial(p, k, d[:p + 1]) for k in range(7)]:
                    return False
            count += 1
        return count >= 20

    c("S-transform products = P_k, p<=3, k<=6, 24 vectors", s_transform_products)
    c("free Bessel = P_k(1..1,t)", lambda: all(
        list(free_bessel_moments(p, t, 6)) == [product_polynomial(p, k, [1] * p + [t])
                                                for k in range(7)]
        for p in (1, 2, 3) for t in (F(1, 3), F(1, 2), 1, F(5, 2))))

    def gamma_reduces_to_omega_hat():
        for _ in range(6):
            P = ModelParams.from_variances([rand_q(rng, 1) for _ in range(2)], t=2,
                                           cumulants=[[0, 1], [0, 1]])
            for _ in range(20):
                m = rng.randint(0, 6)
                w = [(rng.randint(1, 2), rng.randint(1, 2), rng.randint(1, 2)) for _ in range(m)]
                for q in (1, 2, PSI):
                    if moment_canonical(w, q, P, symmetric=True) != moment_symmetrized(w, q, P):
                        return False
        return True

    c("gamma_hat with r_k = delta_k2 is omega_hat", gamma_reduces_to_omega_hat)
    verdict(4, not c.failed, c.summary())
    assert not c.failed


# criterion 5 --------------------------------------------------------------------

def test_criterion_5_independence(verdict):
    P = ModelParams.from_variances([1, 0], t=2, cumulants=[[0, 1, 1], [0, 2, 0, 1]])
    reports = [independence_check(kind, P, degree=6) for kind in ("boolean", "monotone")]
    ok = all(r.passed for r in reports)
    verdict(5, ok, ", ".join(f"{r.kind} {r.checked} identities" for r in reports))
    assert ok, [r.counterexample for r in reports]


# criterion 6 --------------------------------------------------------------------

GRID = (200, 400, 800)
MC = dict(seed=7, samples=2000, n_grid=GRID, trace="probe", probes=8)
ONES = [[[1, 1], [1, 1]]]


@pytest.mark.slow
def test_criterion_6_monte_carlo(verdict):
    start = time.perf_counter()
    parts = []

    s = EnsembleSpec("hermitian-gaussian", [[[1]]], [1], **MC)
    hgrm = convergence_report(["Y Y", "Y Y Y Y", "Y Y Y Y Y Y"], [None], s)
    hgrm_time = time.perf_counter() - start
    parts.append(("HGRM moments", hgrm.passed and hgrm_time < 300))

    s = EnsembleSpec("hermitian-gaussian", ONES, [F(1, 2), F(1, 2)], **MC)
    parts.append(("balanced T_12^4", convergence_report(["T[1,2] T[1,2] T[1,2] T[1,2]"], [1], s).passed))

    s = EnsembleSpec("ginibre", ONES, [F(1, 2), F(1, 2)], **MC)
    wishart = convergence_report(["T[1,2] T[1,2]* T[1,2] T[1,2]*"], [1], s)
    parts.append(("Wishart (BB*)^2", wishart.passed))
    # pooled eigenvalues of 300 draws keep the histogram within the time budget
    hist = eigenvalue_histogram("T[1,2] T[1,2]*", 1, s, 800, bins=50,
                                density=density("mp_dilated", F(1, 2), F(1, 2)), samples=300)
    parts.append((f"BB* histogram L1={hist.l1:.4f}", hist.l1 < 0.05))

    s = EnsembleSpec("hermitian-gaussian", ONES, [0, 1], **MC)
    unb = convergence_report(["T[1,2] T[1,2] T[1,2] T[1,2]"], [1], s, c=20, rate="1/sqrt(n)")
    parts.append(("unbalanced T_12^4", unb.passed))

    dt = time.perf_counter() - start
    failed = [name for name, ok in parts if not ok]
    detail = (f"{len(parts) - len(failed)}/{len(parts)} checks, HGRM {hgrm_time:.0f}s, "
              f"total {dt:.0f}s" + (f"; failed: {', '.join(failed)}" if failed else ""))
    verdict(6, not failed, detail)
    assert not failed, [r.as_dict() for rep in (hgrm, wishart, unb) for r in rep.failures()]


# criterion 7 --------------------------------------------------------------------

def test_criterion_7_analytic(verdict):
    import numpy as np

    c = Checks()
    a, b = F(2, 3), F(5, 4)
    c("Jacobi m_4 = a^2 + ab", lambda: jacobi_moments((a, b), 4)[4] == a ** 2 + a * b)

    def cauchy():
        rng = np.random.default_rng(7)
        for pa, pb in [(2, 3), (3, 2), (1, 1), (F(1, 2), F(5, 2))]:
            for _ in range(20):
                z = complex(rng.uniform(-4, 4), rng.choice([-1, 1]) * rng.uniform(0.2, 3))
                if abs(jacobi_cauchy(z, (pa, pb)) - theta_cauchy(z, pa, pb)) >= 1e-10:
                    return False
        return True

    c("continued fraction vs closed form, 20 points", cauchy)
    cases = [("semicircle", (1,), semicircle_moments(1, 8)),
             ("bernoulli", (F(1, 2),), bernoulli_moments(F(1, 2), 8)),
             ("marchenko_pastur", (F(1, 2),), mp_moments(F(1, 2), 8)),
             ("marchenko_pastur", (3,), mp_moments(3, 8)),
             ("mp_dilated", (F(1, 3), F(2, 3)), mp_dilated_moments(F(1, 3), F(2, 3), 8)),
             ("theta", (2, 3), jacobi_moments((2, 3), 8)),
             ("theta", (F(1, 4), 4), jacobi_moments((F(1, 4), 4), 8))]
    for name, args, moms in cases:
        dens = density(name, *args)
        c(f"{name}{args} quadrature", lambda: all(abs(dens.moment(k) - float(moms[k])) < 1e-6
                                                  for k in range(9)))
    verdict(7, not c.failed, c.summary())
    assert not c.failed
