import math
import random
from fractions import Fraction as F

import numpy as np
import pytest

from blockfree import InvalidArgument, UndefinedSTransform
from blockfree.analytic import (
    JacobiSeq,
    bernoulli_moments,
    catalan,
    density,
    density_eval,
    free_bessel_moments,
    free_mult_convolve,
    fuss_catalan,
    jacobi_cauchy,
    jacobi_moments,
    moments_from_s,
    mp_dilated_moments,
    mp_moments,
    narayana,
    narayana_poly,
    s_transform,
    semicircle_moments,
    series_reversion,
    theta_cauchy,
    u_transform,
)
from blockfree.moments import product_polynomial


def series_mul(a, b, n):
    out = [F(0)] * n
    for i, x in enumerate(a[:n]):
        for j, y in enumerate(b[: n - i]):
            out[i + j] += x * y
    return out


def rand_dims(rng, k):
    return [F(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(k)]


class TestSequences:
    def test_narayana_polynomial(self):
        t = F(3, 7)
        assert narayana_poly(4, t) == t + 6 * t ** 2 + 6 * t ** 3 + t ** 4

    @pytest.mark.parametrize("k", range(1, 9))
    def test_narayana_sums_to_catalan(self, k):
        assert sum(narayana(k, j) for j in range(1, k + 1)) == catalan(k)

    def test_fuss_catalan(self):
        assert fuss_catalan(2, 3) == 12
        assert [fuss_catalan(1, k) for k in range(6)] == [catalan(k) for k in range(6)]

    def test_ranges(self):
        with pytest.raises(InvalidArgument):
            narayana(3, 0)
        with pytest.raises(InvalidArgument):
            narayana(3, 4)

    def test_mp(self):
        assert mp_moments(1, 6) == tuple(catalan(k) for k in range(7))
        assert mp_moments(F(2, 5), 3)[1] == F(2, 5)
        for d1, d2 in [(F(1, 2), F(1, 2)), (F(3, 4), F(1, 3))]:
            assert list(mp_dilated_moments(d2, d1, 6)) == [product_polynomial(1, k, [d1, d2])
                                                          for k in range(7)]
        with pytest.raises(InvalidArgument):
            mp_dilated_moments(1, 0, 3)

    def test_semicircle_and_bernoulli(self):
        assert semicircle_moments(F(1, 2), 6) == (1, 0, F(1, 4), 0, F(2, 16), 0, F(5, 64))
        assert bernoulli_moments(3, 4) == (1, 0, 9, 0, 81)


class TestJacobi:
    def test_two_periodic_fourth(self):
        a, b = F(2, 3), F(5, 4)
        m = jacobi_moments((a, b), 8)
        assert m[2] == a and m[4] == a ** 2 + a * b
        assert all(x == 0 for x in m[1::2])

    def test_known_values(self):
        assert jacobi_moments((2, 3), 8)[4:9:2] == (10, 62, 430)

    def test_constant_is_semicircle(self):
        assert jacobi_moments(JacobiSeq((1,), periodic=True), 10) == tuple(
            semicircle_moments(1, 10))

    def test_finite_sequence(self):
        # a single coefficient gives the Bernoulli law
        assert jacobi_moments(JacobiSeq((F(4),), periodic=False), 6) == bernoulli_moments(2, 6)

    def test_negative_rejected(self):
        with pytest.raises(InvalidArgument):
            JacobiSeq((1, -1), periodic=True)

    def test_continued_fraction_matches_closed_form(self):
        rng = np.random.default_rng(3)
        for a, b in [(2, 3), (3, 2), (1, 1), (F(1, 2), F(5, 2))]:
            for _ in range(20):
                z = complex(rng.uniform(-4, 4), rng.choice([-1, 1]) * rng.uniform(0.2, 3))
                cf = jacobi_cauchy(z, (a, b))
                assert abs(cf - theta_cauchy(z, a, b)) < 1e-10

    def test_cauchy_asymptotics(self):
        z = 1e4j
        assert abs(theta_cauchy(z, 2, 3) * z - 1) < 1e-6


class TestDensities:
    CASES = [
        ("semicircle", (1,), semicircle_moments(1, 8)),
        ("semicircle", (F(3, 2),), semicircle_moments(F(3, 2), 8)),
        ("bernoulli", (F(1, 2),), bernoulli_moments(F(1, 2), 8)),
        ("marchenko_pastur", (F(1, 2),), mp_moments(F(1, 2), 8)),
        ("marchenko_pastur", (1,), mp_moments(1, 8)),
        ("marchenko_pastur", (3,), mp_moments(3, 8)),
        ("mp_dilated", (F(1, 2), F(1, 2)), mp_dilated_moments(F(1, 2), F(1, 2), 8)),
        ("mp_dilated", (F(1, 3), F(2, 3)), mp_dilated_moments(F(1, 3), F(2, 3), 8)),
        ("theta", (2, 3), jacobi_moments((2, 3), 8)),
        ("theta", (3, 2), jacobi_moments((3, 2), 8)),
        ("theta", (1, 1), jacobi_moments((1, 1), 8)),
        ("theta", (F(1, 4), 4), jacobi_moments((F(1, 4), 4), 8)),
        ("theta", (2, 0), jacobi_moments(JacobiSeq((2,), periodic=False), 8)),
    ]

    @pytest.mark.parametrize("name,args,moms", CASES)
    def test_moments_by_quadrature(self, name, args, moms):
        d = density(name, *args)
        assert abs(d.total_mass() - 1) < 1e-6
        for k in range(9):
            assert abs(d.moment(k) - float(moms[k])) < 1e-6

    def test_semicircle_peak(self):
        pdf, atoms = density_eval("semicircle", 0.0, 1)
        assert math.isclose(pdf, 1 / math.pi) and atoms == ()

    def test_theta_atom(self):
        d = density("theta", 1, 4)
        assert d.atoms == ((0.0, 0.75),)
        assert d.diagnostics
        assert density("theta", 4, 1).atoms == ()

    def test_mp_atom(self):
        assert density("marchenko_pastur", F(1, 4)).atoms == ((0.0, 0.75),)
        assert density("marchenko_pastur", 2).atoms == ()

    def test_interval_mass(self):
        d = density("semicircle", 1)
        assert abs(d.interval_mass(-2, 0) - 0.5) < 1e-9

    def test_unknown(self):
        with pytest.raises(InvalidArgument):
            density("cauchy", 1)


class TestTransforms:
    def test_series_reversion(self):
        # f = z + z^2 has inverse (sqrt(1 + 4z) - 1) / 2 = z - z^2 + 2z^3 - 5z^4 + ...
        assert series_reversion([0, 1, 1, 0, 0, 0], 5) == [0, 1, -1, 2, -5, 14]

    def test_s_transform_of_dilated_mp(self):
        # 1 / (3 + 2z)
        S = s_transform(mp_dilated_moments(3, 2, 6))
        assert S == [F((-2) ** k, 3 ** (k + 1)) for k in range(6)]

    def test_roundtrip(self):
        m = jacobi_moments((2, 3), 8)
        m = [x + (1 if k == 1 else 0) for k, x in enumerate(m)]  # shift mean away from 0
        assert list(moments_from_s(s_transform(m), 8)) == [F(x) for x in m]

    def test_undefined(self):
        with pytest.raises(UndefinedSTransform):
            s_transform(semicircle_moments(1, 4))
        with pytest.raises(InvalidArgument):
            s_transform([1, 1, 2], 5)

    def test_convolution_commutative_associative(self):
        a, b, c = mp_moments(F(1, 2), 6), mp_moments(3, 6), mp_dilated_moments(F(2, 3), F(1, 5), 6)
        assert free_mult_convolve(a, b) == free_mult_convolve(b, a)
        assert free_mult_convolve(free_mult_convolve(a, b), c) == free_mult_convolve(
            a, free_mult_convolve(b, c))

    def test_convolution_with_delta_one(self):
        m = mp_moments(F(2, 7), 6)
        assert free_mult_convolve(m, [1] * 7) == tuple(m)

    @pytest.mark.parametrize("seed", range(8))
    def test_products_of_dilated_mp(self, seed):
        rng = random.Random(seed)
        for p in (1, 2, 3):
            d = rand_dims(rng, p + 1)
            m = mp_dilated_moments(d[1], d[0], 6)
            for j in range(2, p + 1):
                m = free_mult_convolve(m, mp_dilated_moments(d[j], d[0], 6))
            assert list(m) == [product_polynomial(p, k, d) for k in range(7)]

    def test_u_transform_s_identity(self):
        s, N = F(3, 5), 7
        m = free_bessel_moments(2, F(1, 3), N)
        S, Su = s_transform(m, N), s_transform(u_transform(m, s), N)
        inv = [F(-1) ** k / s ** (k + 1) for k in range(N)]
        rhs = series_mul(series_mul([F(1), F(1)], inv, N), [S[k] / s ** k for k in range(N)], N)
        assert Su == rhs

    @pytest.mark.parametrize("seed", range(4))
    def test_inductive_chain(self, seed):
        # mu_1 = U_{d2/d1}(rho_{d1,d2} boxtimes mu_2), mu_j the law of the shorter product
        rng = random.Random(seed)
        d, N = rand_dims(rng, 4), 6

        def P(ds):
            return [product_polynomial(len(ds) - 1, k, ds) for k in range(N + 1)]

        for j in range(2):
            inner = free_mult_convolve(mp_dilated_moments(d[j], d[j + 1], N), P(d[j + 1:]), N)
            assert list(u_transform(inner, d[j + 1] / d[j])) == P(d[j:])

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_free_bessel(self, p):
        for t in (0, F(1, 3), 1, F(5, 2)):
            assert list(free_bessel_moments(p, t, 6)) == [
                product_polynomial(p, k, [1] * p + [t]) for k in range(7)]
        assert list(free_bessel_moments(2, 1, 5)) == [fuss_catalan(2, k) for k in range(6)]

    def test_u_transform_bad_scale(self):
        with pytest.raises(InvalidArgument):
            u_transform([1, 1], 0)
