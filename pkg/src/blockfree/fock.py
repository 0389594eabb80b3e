"""
Truncated matricially free Fock space of tracial type.

Basis words are pairs ``(q, factors)``: the vacuum ``Omega_q`` when
``factors`` is empty, otherwise the simple tensor
``e_{p_1,p_2}(u_1) (x) ... (x) e_{p_m,q}(u_m)`` with ``factors`` the tuple of
``(p_i, p_{i+1}, u_i)``. Vectors are dicts mapping basis words to
coefficients.

Two arithmetic modes are offered. In exact mode creation multiplies by the
covariance ``b`` and annihilation by 1, so vacuum coefficients are exact
rationals; this rescales basis vectors and therefore only vacuum expectations
(and other diagonal readouts) are meaningful. In float mode both carry
``sqrt(b)`` and the basis is orthonormal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ._errors import InvalidArgument, InvalidConfiguration, TruncationOverflow
from .params import ModelParams
from .words import Op, parse_word

__all__ = [
    "FockSpace",
    "vacuum",
    "inner",
    "vacuum_expectation",
    "expectation",
    "creation_degree",
    "IndependenceReport",
    "independence_check",
]


def vacuum(q: int, coeff=1) -> dict:
    return {(q, ()): coeff}


def inner(v: dict, w: dict):
    """Canonical inner product (real coefficients)."""
    if len(w) < len(v):
        v, w = w, v
    return sum((c * w[k] for k, c in v.items() if k in w), 0)


def _top(word) -> int:
    q, f = word
    return f[0][0] if f else q


def _add(out: dict, key, c):
    if not c:
        return
    x = out.get(key, 0) + c
    if x:
        out[key] = x
    else:
        out.pop(key, None)


def _as_letter(x) -> tuple:
    # a letter is a tuple of Ops whose sum is applied
    if isinstance(x, Op):
        return (x,)
    if isinstance(x, str):
        ops = parse_word(x)
        if len(ops) != 1:
            raise InvalidArgument(f"{x!r} is not a single operator")
        return ops
    x = tuple(x)
    if x and isinstance(x[0], str):
        return (Op(*x),)
    return tuple(y if isinstance(y, Op) else Op(*y) for y in x)


def creation_degree(op: Op, params: ModelParams) -> int:
    """Largest number of factors a symbol can prepend to a word."""
    if op.kind in ("create", "create_hat", "omega", "omega_hat", "eta"):
        return 0 if op.star and op.kind in ("create", "create_hat") else 1
    if op.kind in ("annihilate", "annihilate_hat"):
        return 1 if op.star else 0
    if op.kind in ("gamma", "gamma_hat"):
        return max(params.max_cumulant_order(op.u) - 1, 0)
    return 0


class FockSpace:
    """Operators acting on the truncated Fock space.

    Parameters
    ----------
    params : ModelParams
    depth : int
        Truncation depth ``L``; creations beyond it raise
        :class:`TruncationOverflow`.
    exact : bool
        Exact rational mode (default) or orthonormal float mode.
    covariance : {'B', 'dimension'}
        Covariance of ``e_{p,q}(u)``: ``b_{p,q}(u)`` from ``params.B``, or
        ``d_p`` as used by the canonical variables.
    """

    def __init__(self, params: ModelParams, depth: int, exact: bool = True, covariance: str = "B"):
        if covariance not in ("B", "dimension"):
            raise InvalidArgument(f"unknown covariance scheme {covariance!r}")
        self.params = params
        self.depth = depth
        self.exact = exact
        self.covariance = covariance

    # covariance and amplitudes ---------------------------------------------

    def cov(self, p: int, q: int, u: int):
        if self.covariance == "dimension":
            return self.params.d[p - 1]
        return self.params.b(p, q, u)

    def _amp_create(self, b):
        return b if self.exact else math.sqrt(b)

    def _amp_annihilate(self, b):
        if self.exact:
            return 1 if b else 0
        return math.sqrt(b)

    def _check(self, op: Op):
        r = self.params.r
        if op.kind == "identity":
            return
        if not (1 <= op.p <= r and 1 <= op.q <= r):
            raise InvalidArgument(f"indices of {op} out of range 1..{r}")
        if op.kind in ("unit_s", "unit_r", "unit", "unit_hat", "P"):
            return
        if not 1 <= op.u <= self.params.t:
            raise InvalidArgument(f"label of {op} out of range 1..{self.params.t}")

    # basis actions -----------------------------------------------------------

    def _create(self, p, q, u, word, c, out):
        if _top(word) != q:
            return
        b = self.cov(p, q, u)
        if not b:
            return
        vac, f = word
        if len(f) + 1 > self.depth:
            raise TruncationOverflow(f"creation beyond depth {self.depth}")
        _add(out, (vac, ((p, q, u),) + f), c * self._amp_create(b))

    def _annihilate(self, p, q, u, word, c, out):
        vac, f = word
        if not f or f[0] != (p, q, u):
            return
        _add(out, (vac, f[1:]), c * self._amp_annihilate(self.cov(p, q, u)))

    def _chain(self, p, q, u, k, word, c, out):
        # sum over q_1..q_{k-1} of wp_{p,q_1} ... wp_{q_{k-1},q} applied to word
        if _top(word) != q:
            return
        vac, f = word
        r = self.params.r
        for mids in itertools.product(range(1, r + 1), repeat=k - 1):
            idx = (p,) + mids + (q,)
            amp = c
            for a, b in zip(idx, idx[1:]):
                x = self.cov(a, b, u)
                if not x:
                    amp = 0
                    break
                amp = amp * self._amp_create(x)
            if not amp:
                continue
            if len(f) + k > self.depth:
                raise TruncationOverflow(f"creation beyond depth {self.depth}")
            new = tuple((a, b, u) for a, b in zip(idx, idx[1:]))
            _add(out, (vac, new + f), amp)

    def _unit_keep(self, kind, p, q, word) -> bool:
        vac, f = word
        if kind == "P":
            return _top(word) == q
        if kind == "unit_s":
            return bool(f) and f[0][:2] == (p, q)
        if kind == "unit_r":
            if not f:
                return vac == q
            return f[0][0] == q and (p != q or f[0][1] != q)
        if kind == "unit":
            return self._unit_keep("unit_r", p, q, word) or self._unit_keep("unit_s", p, q, word)
        if kind == "unit_hat":
            return self._unit_keep("unit", p, q, word) or self._unit_keep("unit", q, p, word)
        raise InvalidArgument(kind)

    def _gamma(self, p, q, u, word, c, out):
        sc = self.params.c(p, q, u)
        if not sc:
            return
        c = c * sc
        self._annihilate(p, q, u, word, c, out)
        par = self.params
        if p == q:
            r1 = par.cumulant(1, u)
            if r1 and _top(word) == q:
                _add(out, word, c * r1)
        for k in range(1, par.max_cumulant_order(u)):
            rk = par.cumulant(k + 1, u)
            if rk:
                self._chain(p, q, u, k, word, c * rk, out)

    def _apply_basis(self, op: Op, word, c, out):
        k, p, q, u = op.kind, op.p, op.q, op.u
        hat_pairs = ((p, q),) if p == q else ((p, q), (q, p))
        if k == "identity":
            _add(out, word, c)
        elif k == "create":
            (self._annihilate if op.star else self._create)(p, q, u, word, c, out)
        elif k == "annihilate":
            (self._create if op.star else self._annihilate)(p, q, u, word, c, out)
        elif k == "create_hat":
            for a, b in hat_pairs:
                (self._annihilate if op.star else self._create)(a, b, u, word, c, out)
        elif k == "annihilate_hat":
            for a, b in hat_pairs:
                (self._create if op.star else self._annihilate)(a, b, u, word, c, out)
        elif k == "omega":
            self._create(p, q, u, word, c, out)
            self._annihilate(p, q, u, word, c, out)
        elif k == "omega_hat":
            for a, b in hat_pairs:
                self._create(a, b, u, word, c, out)
                self._annihilate(a, b, u, word, c, out)
        elif k == "eta":
            cu, au = (2 * u, 2 * u - 1) if op.star else (2 * u - 1, 2 * u)
            for a, b in hat_pairs:
                self._create(a, b, cu, word, c, out)
                self._annihilate(a, b, au, word, c, out)
        elif k in ("gamma", "gamma_hat"):
            if op.star:
                raise InvalidArgument("adjoints of canonical variables are not supported")
            pairs = ((p, q),) if k == "gamma" else hat_pairs
            for a, b in pairs:
                self._gamma(a, b, u, word, c, out)
        elif k in ("unit_s", "unit_r", "unit", "unit_hat", "P"):
            if self._unit_keep(k, p, q, word):
                _add(out, word, c)
        else:
            raise InvalidArgument(f"unknown operator kind {k!r}")

    def apply(self, op, v: dict) -> dict:
        """Apply an operator symbol (or a sum of symbols) to a vector."""
        letter = _as_letter(op)
        for o in letter:
            self._check(o)
            if o.kind == "eta" and 2 * o.u > self.params.t:
                raise InvalidArgument("eta(u) needs covariance labels 2u-1 and 2u")
        out = {}
        for word, c in v.items():
            for o in letter:
                self._apply_basis(o, word, c, out)
        return out

    def apply_word(self, word: Sequence, v: dict, prune_to_vacuum: bool = False) -> dict:
        """Apply ``word[-1]`` first and ``word[0]`` last.

        With ``prune_to_vacuum`` words longer than the number of remaining
        letters are dropped; they cannot return to a vacuum vector, so every
        vacuum coefficient of the result is unaffected.
        """
        letters = [_as_letter(x) for x in word]
        for i in range(len(letters) - 1, -1, -1):
            v = self.apply(letters[i], v)
            if prune_to_vacuum:
                v = {k: c for k, c in v.items() if len(k[1]) <= i}
            if not v:
                break
        return v

    def basis_words(self, length: Optional[int] = None) -> list:
        """All basis words of length at most ``length`` (default: depth).

        Ordered by length, then lexicographically on the factor tuples.
        """
        L = self.depth if length is None else length
        r, t = self.params.r, self.params.t
        out = [(q, ()) for q in range(1, r + 1)]
        frontier = list(out)
        for _ in range(L):
            nxt = []
            for vac, f in frontier:
                top = f[0][0] if f else vac
                for p in range(1, r + 1):
                    for u in range(1, t + 1):
                        if self.cov(p, top, u):
                            nxt.append((vac, ((p, top, u),) + f))
            nxt.sort(key=lambda w: (w[1], w[0]))
            out.extend(nxt)
            frontier = nxt
        return out


def _default_depth(letters, params) -> int:
    return max(1, sum(max(creation_degree(o, params) for o in letter) for letter in letters))


def _covariance_for(letters) -> str:
    kinds = {o.kind for letter in letters for o in letter}
    if kinds & {"gamma", "gamma_hat"}:
        if kinds & {"create", "annihilate", "create_hat", "annihilate_hat", "omega", "omega_hat", "eta"}:
            raise InvalidArgument("canonical variables cannot be mixed with Gaussian-type symbols")
        return "dimension"
    return "B"


def vacuum_expectation(word, q: int, params: ModelParams, L: Optional[int] = None,
                       exact: bool = True):
    """``Psi_q(word) = <word Omega_q, Omega_q>``.

    Letters may be :class:`Op`, tuples of ``Op`` (their sum) or text.
    Canonical variables use the covariance ``d_p``; other symbols use
    ``params.B``. The default depth is the total creation degree of the
    word, which can never overflow.
    """
    if isinstance(word, str):
        word = parse_word(word)
    letters = [_as_letter(x) for x in word]
    if not 1 <= q <= params.r:
        raise InvalidArgument(f"state index {q} out of range 1..{params.r}")
    depth = _default_depth(letters, params) if L is None else L
    fs = FockSpace(params, depth, exact=exact, covariance=_covariance_for(letters))
    one = Fraction(1) if exact else 1.0
    v = fs.apply_word(letters, vacuum(q, one), prune_to_vacuum=True)
    return v.get((q, ()), Fraction(0) if exact else 0.0)


def expectation(word, q, params: ModelParams, exact: bool = True):
    """Vacuum expectation with the conventions of :func:`blockfree.moments.moment`.

    ``q`` may be ``"Psi"``; words containing ``eta`` use doubled parameters.
    """
    ops = parse_word(word)
    if any(o.kind == "eta" for o in ops):
        params = params.doubled()
    if q == "Psi":
        zero = Fraction(0) if exact else 0.0
        return sum((params.d[j - 1] * vacuum_expectation(ops, j, params, exact=exact)
                    for j in range(1, params.r + 1) if params.d[j - 1]), zero)
    return vacuum_expectation(ops, q, params, exact=exact)


@dataclass
class IndependenceReport:
    kind: str
    passed: bool
    checked: int
    counterexample: Optional[str] = None

    def __str__(self):
        verdict = "pass" if self.passed else f"FAIL at {self.counterexample}"
        return f"{self.kind} independence: {verdict} ({self.checked} identities checked)"


def _check_independence_params(params: ModelParams):
    if params.r != 2 or params.t != 2:
        raise InvalidConfiguration("the independence checks need r = 2 and t = 2")
    if tuple(params.d) != (1, 0):
        raise InvalidConfiguration("the independence checks need d = (1, 0)")
    if not params.cumulants:
        raise InvalidConfiguration("explicit finite cumulant sequences are required")
    if any(params.cumulant(1, u) != 0 for u in (1, 2)):
        raise InvalidConfiguration("the independence checks need r_1(u) = 0")


def _words(alphabet, n):
    return itertools.product(alphabet, repeat=n)


def independence_check(kind: str, params: ModelParams, degree: int = 6) -> IndependenceReport:
    """Moment-level check of boolean or monotone independence under ``Psi_2``.

    ``boolean``: the pair ``gamma_{1,2}(1), gamma_{1,2}(2)``; every alternating
    product of powers factorizes into the product of the moments of the powers.

    ``monotone``: ``a = gamma_{1,2}(1)`` and ``b = gamma_{1,1}(2) + gamma_{1,2}(2)``;
    ``Psi_2(w_1 a^i b^j a^l w_2) = Psi_2(b^j) Psi_2(w_1 a^i a^l w_2)`` for
    ``i, l, j >= 1`` and words ``w_1, w_2`` in ``a``, ``b`` and the unit
    ``1_{1,2}``. The outer factors must be positive powers of ``a``: with
    ``a^0 = 1_{1,2}`` the identity fails, e.g.
    ``Psi_2(1_{1,2} b 1_{1,2} b) = r_2(2) d_1`` while ``Psi_2(b) = 0``.

    Parameters
    ----------
    kind : {'boolean', 'monotone'}
    params : ModelParams
        ``r = t = 2``, ``d = (1, 0)``, ``r_1(u) = 0``.
    degree : int
        Bound on the number of letters (canonical variables and units) in
        each tested word.
    """
    _check_independence_params(params)
    q = 2

    def E(letters):
        return vacuum_expectation(letters, q, params)

    checked = 0
    if kind == "boolean":
        x, y = (Op("gamma", 1, 2, 1),), (Op("gamma", 1, 2, 2),)
        cache = {}

        def power(letter, n):
            key = (letter, n)
            if key not in cache:
                cache[key] = E([letter] * n)
            return cache[key]

        for total in range(1, degree + 1):
            for nblocks in range(1, total + 1):
                for comp in _compositions(total, nblocks):
                    for first in (x, y):
                        letters, rhs = [], Fraction(1)
                        cur = first
                        for n in comp:
                            letters.extend([cur] * n)
                            rhs *= power(cur, n)
                            cur = y if cur is x else x
                        lhs = E(letters)
                        checked += 1
                        if lhs != rhs:
                            return IndependenceReport(kind, False, checked, _fmt(letters))
        return IndependenceReport(kind, True, checked)
    if kind == "monotone":
        a = (Op("gamma", 1, 2, 1),)
        b = (Op("gamma", 1, 1, 2), Op("gamma", 1, 2, 2))
        one1 = (Op("unit", 1, 2),)
        bpow = {}
        for j in range(1, degree + 1):
            bpow[j] = E([b] * j)
        for total in range(3, degree + 1):
            for j in range(1, total - 1):
                rest = total - j
                for i in range(1, rest):
                    for l in range(1, rest - i + 1):
                        left = rest - i - l
                        for n1 in range(left + 1):
                            n2 = left - n1
                            for w1 in _words((a, b, one1), n1):
                                for w2 in _words((a, b, one1), n2):
                                    mid = list(w1) + [a] * i
                                    tail = [a] * l + list(w2)
                                    lhs = E(mid + [b] * j + tail)
                                    rhs = bpow[j] * E(mid + tail)
                                    checked += 1
                                    if lhs != rhs:
                                        return IndependenceReport(kind, False, checked,
                                                                  _fmt(mid + [b] * j + tail))
        return IndependenceReport(kind, True, checked)
    raise InvalidArgument(f"unknown independence kind {kind!r}")


def _compositions(n, k):
    if k == 1:
        yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _fmt(letters) -> str:
    return " ".join("+".join(str(o) for o in letter) for letter in letters)
