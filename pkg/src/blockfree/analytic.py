"""
Closed-form sequences, densities, Cauchy transforms and S-transforms.

Moment sequences are tuples ``(m_0, m_1, ..., m_N)`` of ``Fraction`` with
``m_0 = 1``. Formal power series are lists of coefficients with an explicit
order; operations raise rather than return fewer coefficients than asked.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from ._errors import InvalidArgument, UndefinedSTransform
from .params import to_fraction

__all__ = [
    "DEFAULT_ORDER",
    "catalan",
    "narayana",
    "narayana_poly",
    "fuss_catalan",
    "semicircle_moments",
    "bernoulli_moments",
    "mp_moments",
    "mp_dilated_moments",
    "JacobiSeq",
    "jacobi_moments",
    "jacobi_cauchy",
    "theta_cauchy",
    "Density",
    "density",
    "density_eval",
    "u_transform",
    "series_reversion",
    "s_transform",
    "moments_from_s",
    "free_mult_convolve",
    "free_bessel_moments",
]

DEFAULT_ORDER = 12
_F0, _F1 = Fraction(0), Fraction(1)


# integer sequences -----------------------------------------------------------

def catalan(k: int) -> int:
    if k < 0:
        raise InvalidArgument("k must be nonnegative")
    return comb(2 * k, k) // (k + 1)


def narayana(k: int, j: int) -> int:
    """``N(k, j) = (1/j) C(k-1, j-1) C(k, j-1)`` for ``1 <= j <= k``."""
    if not 1 <= j <= k:
        raise InvalidArgument(f"need 1 <= j <= k, got k={k}, j={j}")
    return comb(k - 1, j - 1) * comb(k, j - 1) // j


def narayana_poly(k: int, t) -> Fraction:
    """``N_k(t) = sum_j N(k, j) t^j``; ``N_0 = 1``."""
    if k < 0:
        raise InvalidArgument("k must be nonnegative")
    if k == 0:
        return _F1
    t = to_fraction(t)
    return sum((narayana(k, j) * t ** j for j in range(1, k + 1)), _F0)


def fuss_catalan(p: int, k: int) -> int:
    """``F(p, k) = C(pk + k, k) / (pk + 1)``."""
    if p < 1 or k < 0:
        raise InvalidArgument("need p >= 1 and k >= 0")
    return comb(p * k + k, k) // (p * k + 1)


# moment sequences ----------------------------------------------------------

def semicircle_moments(alpha, N: int) -> tuple:
    """Moments of the semicircle law of radius ``2 alpha``."""
    a2 = to_fraction(alpha) ** 2
    return tuple(catalan(k // 2) * a2 ** (k // 2) if k % 2 == 0 else _F0 for k in range(N + 1))


def bernoulli_moments(alpha, N: int) -> tuple:
    """Moments of ``(delta_{-alpha} + delta_alpha) / 2``."""
    a = to_fraction(alpha)
    return tuple(a ** k if k % 2 == 0 else _F0 for k in range(N + 1))


def mp_moments(t, N: int) -> tuple:
    """Marchenko-Pastur law with shape ``t``: ``m_k = N_k(t)``."""
    t = to_fraction(t)
    if t < 0:
        raise InvalidArgument("t must be nonnegative")
    return tuple(narayana_poly(k, t) for k in range(N + 1))


def mp_dilated_moments(d2, d1, N: int) -> tuple:
    """``d1``-dilation of the Marchenko-Pastur law with shape ``d2/d1``."""
    d1, d2 = to_fraction(d1), to_fraction(d2)
    if d1 <= 0:
        raise InvalidArgument("d1 must be positive")
    t = d2 / d1
    return tuple(d1 ** k * narayana_poly(k, t) for k in range(N + 1))


@dataclass(frozen=True)
class JacobiSeq:
    """Jacobi coefficients ``beta_1, beta_2, ...`` with zero diagonal terms.

    ``periodic`` repeats ``coeffs`` forever; otherwise the sequence is
    zero after ``coeffs``.
    """

    coeffs: tuple
    periodic: bool = False

    def __post_init__(self):
        c = tuple(to_fraction(x) for x in self.coeffs)
        if any(x < 0 for x in c):
            raise InvalidArgument("Jacobi coefficients must be nonnegative")
        if self.periodic and not c:
            raise InvalidArgument("a periodic sequence needs at least one coefficient")
        object.__setattr__(self, "coeffs", c)

    def beta(self, h: int):
        # weight of a step between heights h and h-1, h >= 1
        if self.periodic:
            return self.coeffs[(h - 1) % len(self.coeffs)]
        return self.coeffs[h - 1] if h <= len(self.coeffs) else _F0


def _as_jacobi(seq) -> JacobiSeq:
    if isinstance(seq, JacobiSeq):
        return seq
    seq = tuple(seq)
    if len(seq) == 2:
        return JacobiSeq(seq, periodic=True)
    raise InvalidArgument("pass a JacobiSeq or a two-periodic pair (a, b)")


def jacobi_moments(seq, N: int) -> tuple:
    """Moments from Jacobi coefficients by Dyck-path recursion.

    A path weighs the product of ``beta_h`` over its down steps from height
    ``h``. A plain pair ``(a, b)`` means the two-periodic sequence
    ``(a, b, a, b, ...)``.

    Examples
    --------
    >>> jacobi_moments((2, 3), 4)[4]
    Fraction(10, 1)
    """
    seq = _as_jacobi(seq)
    out = [_F1]
    level = {0: _F1}  # height -> total weight of partial paths
    for n in range(1, N + 1):
        nxt = {}
        for h, w in level.items():
            if h + 1 <= N - n + 1:
                nxt[h + 1] = nxt.get(h + 1, _F0) + w
            if h > 0:
                b = seq.beta(h)
                if b:
                    nxt[h - 1] = nxt.get(h - 1, _F0) + w * b
        level = {h: w for h, w in nxt.items() if w}
        out.append(level.get(0, _F0))
    return tuple(out)


def jacobi_cauchy(z: complex, seq, tol: float = 1e-15, max_depth: int = 1 << 16) -> complex:
    """Cauchy transform as the continued fraction ``1/(z - b_1/(z - b_2/...))``.

    Evaluated bottom-up at doubling depths until two successive values agree.
    """
    seq = _as_jacobi(seq)
    z = complex(z)
    betas = [complex(float(seq.beta(h))) for h in range(1, max_depth + 1)]

    def G(depth):
        g = 1 / z
        for h in range(depth - 1, 0, -1):
            g = 1 / (z - betas[h - 1] * g)
        return g

    depth, prev = 32, G(32)
    while depth < max_depth:
        depth *= 2
        cur = G(depth)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    return prev


def theta_cauchy(z: complex, a, b) -> complex:
    """Closed-form Cauchy transform of the two-periodic law with ``(a, b)``.

    ``G(z) = (z^2 + b - a - sqrt((z^2 - b - a)^2 - 4ab)) / (2 z b)`` with the
    branch chosen so that ``Im G(z)`` and ``Im z`` have opposite signs.
    """
    a, b = float(a), float(b)
    z = complex(z)
    if z.imag == 0:
        raise InvalidArgument("z must lie off the real axis")
    if b == 0:
        # Bernoulli law at +-sqrt(a)
        return z / (z * z - a)
    s = cmath.sqrt((z * z - b - a) ** 2 - 4 * a * b)
    g1 = (z * z + b - a - s) / (2 * z * b)
    g2 = (z * z + b - a + s) / (2 * z * b)
    return g1 if g1.imag * z.imag < 0 else g2


# densities ---------------------------------------------------------------------

@dataclass
class _Piece:
    # density on [lo, hi] equal to smooth(x) (x-lo)^alpha (hi-x)^beta
    lo: float
    hi: float
    smooth: Callable
    alpha: float = 0.5
    beta: float = 0.5


@dataclass
class Density:
    """A probability measure: absolutely continuous pieces plus atoms.

    Attributes
    ----------
    name : str
    pieces : list
        Intervals with ``pdf = smooth(x) (x - lo)^alpha (hi - x)^beta``.
    atoms : tuple of (location, mass)
    """

    name: str
    pieces: list = field(default_factory=list)
    atoms: tuple = ()
    diagnostics: tuple = ()

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for pc in self.pieces:
            inside = (x > pc.lo) & (x < pc.hi)
            xi = x[inside]
            if xi.size:
                out[inside] = pc.smooth(xi) * (xi - pc.lo) ** pc.alpha * (pc.hi - xi) ** pc.beta
        return out if out.ndim else float(out)

    def support(self) -> list:
        return [(pc.lo, pc.hi) for pc in self.pieces] + [(x, x) for x, _ in self.atoms]

    def moment(self, k: int) -> float:
        """``int x^k`` against the measure by Gauss-Jacobi-weighted quadrature."""
        tot = sum(m * x ** k for x, m in self.atoms)
        for pc in self.pieces:
            # odd moments cancel to 0, so the absolute tolerance follows |x|^k
            scale = max(1.0, abs(pc.lo), abs(pc.hi)) ** k
            val, _ = integrate.quad(lambda x: x ** k * pc.smooth(x), pc.lo, pc.hi,
                                    weight="alg", wvar=(pc.alpha, pc.beta), limit=200,
                                    epsabs=1e-14 * scale, epsrel=1e-11)
            tot += val
        return tot

    def total_mass(self) -> float:
        return self.moment(0)

    def interval_mass(self, lo: float, hi: float, include_hi: bool = False) -> float:
        """Mass of ``[lo, hi)`` (or ``[lo, hi]``)."""
        tot = sum(m for x, m in self.atoms if lo <= x < hi or (include_hi and x == hi))
        for pc in self.pieces:
            a, b = max(lo, pc.lo), min(hi, pc.hi)
            if a < b:
                val, _ = integrate.quad(lambda x: pc.smooth(x) * (x - pc.lo) ** pc.alpha
                                        * (pc.hi - x) ** pc.beta, a, b, limit=200)
                tot += val
        return tot


def _semicircle(alpha: float) -> Density:
    R = 2 * alpha
    c = 1 / (2 * math.pi * alpha ** 2)
    return Density(f"semicircle({alpha})", [_Piece(-R, R, lambda x: c + 0 * x)])


def _mp(t: float, scale: float = 1.0, name: str = "") -> Density:
    a, b = (1 - math.sqrt(t)) ** 2, (1 + math.sqrt(t)) ** 2
    atoms = ((0.0, 1 - t),) if t < 1 else ()
    if t == 0:
        return Density(name, [], ((0.0, 1.0),))
    if a == 0:
        # sqrt(x (4 - x)) / (2 pi x) = (4 - x)^(1/2) x^(-1/2) / (2 pi)
        pc = _Piece(0.0, scale * b, lambda x: 1 / (2 * math.pi * scale) + 0 * x, -0.5, 0.5)
    else:
        pc = _Piece(scale * a, scale * b, lambda x: 1 / (2 * math.pi * x * scale))
    return Density(name, [pc], atoms)


def density(name: str, *args) -> Density:
    """Named closed-form laws.

    ``semicircle(alpha)``, ``bernoulli(alpha)``, ``theta(a, b)``,
    ``marchenko_pastur(t)`` and ``mp_dilated(d2, d1)``.

    The two-periodic law ``theta(a, b)`` has density
    ``sqrt(4ab - (x^2 - a - b)^2) / (2 pi b |x|)`` on
    ``|sqrt a - sqrt b| <= |x| <= sqrt a + sqrt b`` and, when ``a < b``, an atom
    at 0 of mass ``1 - a/b`` (the residue of its Cauchy transform at 0).
    """
    args = [float(to_fraction(x)) for x in args]
    if name == "semicircle":
        (alpha,) = args
        if alpha <= 0:
            raise InvalidArgument("alpha must be positive")
        return _semicircle(alpha)
    if name == "bernoulli":
        (alpha,) = args
        return Density(f"bernoulli({alpha})", [], ((-alpha, 0.5), (alpha, 0.5)))
    if name == "marchenko_pastur":
        (t,) = args
        if t < 0:
            raise InvalidArgument("t must be nonnegative")
        return _mp(t, 1.0, f"marchenko_pastur({t})")
    if name == "mp_dilated":
        d2, d1 = args
        if d1 <= 0:
            raise InvalidArgument("d1 must be positive")
        return _mp(d2 / d1, d1, f"mp_dilated({d2},{d1})")
    if name == "theta":
        a, b = args
        if a <= 0 or b < 0:
            raise InvalidArgument("theta needs a > 0 and b >= 0")
        if b == 0:
            return Density(f"theta({a},{b})", [], ((-math.sqrt(a), 0.5), (math.sqrt(a), 0.5)))
        if a == b:
            d = _semicircle(math.sqrt(a))
            d.name = f"theta({a},{b})"
            return d
        lo, hi = abs(math.sqrt(a) - math.sqrt(b)), math.sqrt(a) + math.sqrt(b)
        c = 1 / (2 * math.pi * b)
        # 4ab - (x^2 - a - b)^2 = (x - lo)(x + lo)(hi - x)(hi + x)
        right = _Piece(lo, hi, lambda x: c * np.sqrt((x + lo) * (hi + x)) / np.abs(x))
        left = _Piece(-hi, -lo, lambda x: c * np.sqrt((lo - x) * (hi - x)) / np.abs(x))
        atoms, diag = (), ()
        if a < b:
            atoms = ((0.0, 1 - a / b),)
            diag = (f"atom mass 1 - a/b = {1 - a / b:.6g}; the half-mass value 1/2 - a/(2b) "
                    f"= {0.5 - a / (2 * b):.6g} does not give a probability measure",)
        else:
            diag = ("a > b: no atom (1/2 - a/(2b) would be negative)",)
        return Density(f"theta({a},{b})", [left, right], atoms, diag)
    raise InvalidArgument(f"unknown density {name!r}")


def density_eval(name: str, x, *args):
    """Pointwise density of a named law and its atom list."""
    d = density(name, *args)
    return d.pdf(x), d.atoms


# transforms ----------------------------------------------------------------------

def u_transform(m: Sequence, s) -> tuple:
    """``m_k -> s m_k`` for ``k >= 1``; the Cauchy transform becomes ``s G + (1-s)/z``."""
    s = to_fraction(s)
    if s <= 0:
        raise InvalidArgument("s must be positive")
    m = [to_fraction(x) for x in m]
    return (_F1,) + tuple(s * x for x in m[1:])


def _mul(a, b, n):
    # product truncated to coefficients 0..n-1
    out = [_F0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def _compose(f, g, n):
    # f(g(z)) with g_0 = 0, coefficients 0..n-1 (Horner)
    out = [_F0] * n
    for c in reversed(f[:n]):
        out = _mul(out, g, n)
        out[0] += c
    return out


def series_reversion(f: Sequence, n: int) -> list:
    """Compositional inverse ``g`` of ``f`` (``f_0 = 0``, ``f_1 != 0``) to order ``n``.

    Returns coefficients ``g_0..g_n``. Each ``g_k`` is fixed by the vanishing
    of the ``z^k`` coefficient of ``f(g(z)) - z``.
    """
    f = [to_fraction(x) for x in f]
    if len(f) < n + 1:
        raise InvalidArgument(f"series known to order {len(f) - 1}, order {n} requested")
    if f[0] != 0 or f[1] == 0:
        raise UndefinedSTransform("reversion needs f_0 = 0 and f_1 != 0")
    g = [_F0] * (n + 1)
    g[1] = 1 / f[1]
    for k in range(2, n + 1):
        c = _compose(f, g, k + 1)[k]
        g[k] = -c / f[1]
    return g


def s_transform(m: Sequence, N: Optional[int] = None) -> list:
    """S-transform coefficients ``S_0..S_{N-1}`` from moments ``m_0..m_N``.

    ``psi(z) = sum_{k>=1} m_k z^k``, ``chi = psi^{-1}`` and
    ``S(z) = chi(z) (1 + z) / z``.

    Raises
    ------
    UndefinedSTransform
        If ``m_1 = 0``.
    """
    m = [to_fraction(x) for x in m]
    N = len(m) - 1 if N is None else N
    if N > len(m) - 1:
        raise InvalidArgument(f"{len(m) - 1} moments given, order {N} requested")
    if N < 1:
        raise InvalidArgument("order must be at least 1")
    if m[1] == 0:
        raise UndefinedSTransform("the S-transform needs a nonzero first moment")
    psi = [_F0] + m[1: N + 1]
    chi = series_reversion(psi, N)
    q = chi[1:]  # chi(z)/z, coefficients 0..N-1
    return [q[k] + (q[k - 1] if k else _F0) for k in range(N)]


def moments_from_s(S: Sequence, N: int) -> tuple:
    """Invert :func:`s_transform`: moments ``m_0..m_N`` from ``S_0..S_{N-1}``."""
    S = [to_fraction(x) for x in S]
    if len(S) < N:
        raise InvalidArgument(f"S known to order {len(S) - 1}, moments up to {N} requested")
    # chi(z) = z S(z) / (1 + z)
    inv1pz = [(-1) ** k * _F1 for k in range(N)]
    q = _mul(S, inv1pz, N)
    chi = [_F0] + q
    psi = series_reversion(chi, N)
    return (_F1,) + tuple(psi[1:])


def free_mult_convolve(m1: Sequence, m2: Sequence, N: Optional[int] = None) -> tuple:
    """Moments ``m_0..m_N`` of the free multiplicative convolution."""
    N = min(len(m1), len(m2)) - 1 if N is None else N
    S = _mul(s_transform(m1, N), s_transform(m2, N), N)
    return moments_from_s(S, N)


def free_bessel_moments(p: int, t, N: int = DEFAULT_ORDER) -> tuple:
    """Moments of the free Bessel law ``pi_{p,t} = pi^{boxtimes (p-1)} boxtimes pi^{boxplus t}``.

    ``pi`` is the Marchenko-Pastur law with shape 1 and ``pi^{boxplus t}``
    the one with shape ``t``; the product is taken by S-transforms.
    """
    if p < 1:
        raise InvalidArgument("p must be at least 1")
    t = to_fraction(t)
    if t < 0:
        raise InvalidArgument("t must be nonnegative")
    if t == 0:
        return (_F1,) + (_F0,) * N
    m = mp_moments(t, N)
    for _ in range(p - 1):
        m = free_mult_convolve(m, mp_moments(1, N), N)
    return tuple(m)
