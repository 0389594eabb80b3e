"""
Exact limit mixed moments as sums of partition weights.

Every function works over ``fractions.Fraction``. A word is either a sequence
of index entries accepted by :func:`blockfree.partitions.as_entries` or a
sequence of :class:`blockfree.words.Op`. The state argument ``q`` is a block
index in ``[r]`` or the string ``"Psi"`` for the weighted state
``sum_q d_q Psi_q``.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from ._errors import InvalidArgument, InvalidConfiguration, ResourceLimitError
from .params import ModelParams, to_fraction
from .partitions import (
    MAX_PAIR_SIZE,
    IndexEntry,
    NCPartition,
    _adapted,
    _pairings,
    adapted_nc,
    as_entries,
    enumerate_nc,
    enumerate_nc_pair,
    enumerate_word_pairings,
    nci_filter,
    right_leg_stats,
)
from .words import MOMENT_KINDS, Op, parse_word

__all__ = [
    "PSI",
    "ModelParams",
    "weight_pair",
    "weight_nc",
    "moment_gaussian",
    "moment_symmetrized",
    "moment_unbalanced_nci",
    "moment_collective",
    "catalan_matrices",
    "moment_canonical",
    "moment_eta",
    "product_polynomial",
    "product_polynomial_terms",
    "format_polynomial",
    "multivariate_narayana",
    "moment",
]

PSI = "Psi"
_ZERO = Fraction(0)


def _entries(word) -> tuple:
    if isinstance(word, str):
        word = parse_word(word)
    out = []
    for x in word:
        if isinstance(x, Op):
            out.append(IndexEntry(x.p, x.q, x.u, x.star))
        else:
            out.extend(as_entries([x]))
    return tuple(out)


def _check_word(entries, params: ModelParams, labels: int):
    for e in entries:
        if not (1 <= e.p <= params.r and 1 <= e.q <= params.r):
            raise InvalidArgument(f"block index ({e.p},{e.q}) out of range 1..{params.r}")
        if not 1 <= e.u <= labels:
            raise InvalidArgument(f"label {e.u} out of range 1..{labels}")


def _over_state(fn, q, params: ModelParams) -> Fraction:
    if q == PSI:
        return sum((params.d[j - 1] * fn(j) for j in range(1, params.r + 1) if params.d[j - 1]), _ZERO)
    if not isinstance(q, int) or not 1 <= q <= params.r:
        raise InvalidArgument(f"state index {q!r} out of range 1..{params.r}")
    return fn(q)


def weight_pair(colored, params: ModelParams, labels=None) -> Fraction:
    """Product over blocks of ``b_{i,j}(u)``.

    ``i`` is the block color, ``j`` the color of its nearest outer block and
    ``u`` its label (or ``labels[k]`` when an override sequence is given).
    """
    w = Fraction(1)
    labs = colored.labels if labels is None else labels
    for col, outer, u in zip(colored.colors, colored.outer_colors, labs):
        w *= params.b(col[0], outer, u)
        if not w:
            return _ZERO
    return w


def weight_nc(colored, params: ModelParams) -> Fraction:
    """Weight of a colored general noncrossing partition.

    A block with ``k`` legs colored ``(p_1..p_{k-1})`` and labeled ``u``
    contributes ``d_{p_1}...d_{p_{k-1}} r_k(u)`` times the scalings
    ``c_{v}(u)`` of its legs; a singleton contributes ``r_1(u) c_{c,c}(u)``.
    """
    w = Fraction(1)
    pi = colored.partition
    for blk, col, u in zip(pi.blocks, colored.colors, colored.labels):
        w *= params.cumulant(len(blk), u)
        for p in col:
            w *= params.d[p - 1]
        if params.scalings is not None:
            for x in blk:
                p, q = colored.resolved[x - 1]
                w *= params.c(p, q, u)
        if not w:
            return _ZERO
    return w


def _pair_sum(entries, q, params, mode, nci=False, labels_fn=None) -> Fraction:
    m = len(entries)
    if m % 2:
        return _ZERO
    if m > MAX_PAIR_SIZE:
        raise ResourceLimitError(f"pair partition enumeration is limited to m <= {MAX_PAIR_SIZE}")

    def compatible(a, b):
        x, y = entries[a - 1], entries[b - 1]
        if x.u != y.u:
            return False
        if mode == "ordered":
            return (x.p, x.q) == (y.p, y.q)
        if x.pair != y.pair:
            return False
        return mode != "starred" or x.star != y.star

    total = _ZERO
    for blocks in _pairings(range(1, m + 1), compatible):
        pi = NCPartition(m, blocks)
        col = _adapted(pi, entries, mode, q)
        if col is None or (nci and not nci_filter(col)):
            continue
        labs = None if labels_fn is None else labels_fn(pi)
        total += weight_pair(col, params, labs)
    return total


def moment_gaussian(word, q, params: ModelParams) -> Fraction:
    """``Psi_q(omega_{p_1,q_1}(u_1) ... omega_{p_m,q_m}(u_m))``.

    Examples
    --------
    >>> P = ModelParams([1, 1], [[[1, 2], [3, 4]]])
    >>> moment_gaussian([(1, 2)] * 4, 2, P)
    Fraction(1, 1)
    """
    e = _entries(word)
    _check_word(e, params, params.t)
    return _over_state(lambda j: _pair_sum(e, j, params, "ordered"), q, params)


def moment_symmetrized(word, q, params: ModelParams) -> Fraction:
    """``Psi_q`` of a word in symmetrized Gaussian operators ``omega_hat``."""
    e = _entries(word)
    _check_word(e, params, params.t)
    return _over_state(lambda j: _pair_sum(e, j, params, "symmetric"), q, params)


def _check_unbalanced_hypothesis(params: ModelParams, q: int):
    r = params.r
    for u in range(1, params.t + 1):
        for x in range(1, r + 1):
            if params.b(q, x, u) != 0:
                raise InvalidConfiguration(
                    f"b_{{{q},{x}}}({u}) must vanish: the only unbalanced operators may be omega_{{p,{q}}}"
                )
        for i in range(1, r + 1):
            for j in range(i + 1, r + 1):
                if q in (i, j):
                    continue
                if (params.b(i, j, u) == 0) != (params.b(j, i, u) == 0):
                    raise InvalidConfiguration(
                        f"omega_hat_{{{i},{j}}}({u}) is unbalanced but does not involve {q}"
                    )


def moment_unbalanced_nci(word, params: ModelParams, q: int) -> Fraction:
    """Symmetrized moment summed over partitions with no block colored ``q``.

    The hypothesis is that every ``b_{q,x}(u)`` vanishes (so the operators
    touching ``q`` reduce to ``omega_{p,q}``) and no other symmetrized
    operator is unbalanced.

    Raises
    ------
    InvalidConfiguration
        If the hypothesis fails.
    """
    e = _entries(word)
    _check_word(e, params, params.t)
    if not isinstance(q, int) or not 1 <= q <= params.r:
        raise InvalidArgument(f"state index {q!r} out of range")
    _check_unbalanced_hypothesis(params, q)
    return _pair_sum(e, q, params, "symmetric", nci=True)


def _tree_sum(pi: NCPartition, Bc, r: int, q: int, nci: bool) -> Fraction:
    children = [[] for _ in pi.blocks]
    roots = []
    for i, (parent, _) in enumerate(pi._nesting):
        (roots if parent < 0 else children[parent]).append(i)
    colors = [c for c in range(1, r + 1) if not (nci and c == q)]

    def val(i, outer):
        tot = _ZERO
        for c in colors:
            w = Bc[c - 1][outer - 1]
            if w:
                for ch in children[i]:
                    w *= val(ch, c)
                    if not w:
                        break
                tot += w
        return tot

    out = Fraction(1)
    for i in roots:
        out *= val(i, q)
    return out


def moment_collective(m: int, q: int, params: ModelParams, nci: bool = False) -> Fraction:
    """Sum over colored pair partitions of ``[m]`` with collective weights.

    Each block colored ``i`` inside a block colored ``j`` contributes
    ``sum_u b_{i,j}(u)``; the imaginary block is colored ``q``. With ``nci``
    no block may be colored ``q``.
    """
    if m % 2:
        return _ZERO
    Bc = params.collective()
    return sum((_tree_sum(pi, Bc, params.r, q, nci) for pi in enumerate_nc_pair(m)), _ZERO)


def catalan_matrices(params: ModelParams, N: int) -> list:
    """Diagonals of the Catalan matrices ``C_0..C_N``.

    ``C_0 = I`` and ``C_n = sum_{i+j=n-1} D(C_i B C_j)`` where ``B`` is the
    collective covariance matrix and ``D`` maps a matrix to the diagonal
    matrix of its column sums. Returns a list of tuples of diagonal entries.
    """
    if N < 0:
        raise InvalidArgument("N must be nonnegative")
    B = params.collective()
    r = params.r
    C = [tuple(Fraction(1) for _ in range(r))]
    for n in range(1, N + 1):
        diag = [_ZERO] * r
        for i in range(n):
            ci, cj = C[i], C[n - 1 - i]
            for b in range(r):
                diag[b] += sum(ci[a] * B[a][b] for a in range(r)) * cj[b]
        C.append(tuple(diag))
    return C


def moment_canonical(word, q, params: ModelParams, symmetric: bool = False) -> Fraction:
    """``Psi_q`` of a word in canonical variables ``gamma`` (or ``gamma_hat``).

    Sums the weights of all adapted noncrossing partitions. Blocks with ``k``
    legs pick up the free cumulant ``r_k(u)``.
    """
    e = _entries(word)
    _check_word(e, params, params.t)
    mode = "symmetric" if symmetric else "ordered"
    m = len(e)

    def at(j):
        tot = _ZERO
        for pi in enumerate_nc(m):
            col = adapted_nc(pi, e, mode, j)
            if col is not None:
                tot += weight_nc(col, params)
        return tot

    return _over_state(at, q, params)


def moment_eta(word, q, params: ModelParams) -> Fraction:
    """``Psi_q`` of a word in circular-type operators ``eta`` and ``eta*``.

    ``params`` carries ``2t`` covariance matrices: label ``2u-1`` for
    creations coming from ``eta(u)`` and ``2u`` for those coming from
    ``eta(u)*`` (see :meth:`ModelParams.doubled`). A block is weighted by the
    label of its right leg.
    """
    e = _entries(word)
    if params.t % 2:
        raise InvalidArgument("circular-type moments need 2t covariance matrices")
    _check_word(e, params, params.t // 2)

    def labels(pi):
        return tuple(2 * e[b[1] - 1].u - (0 if e[b[1] - 1].star else 1) for b in pi.blocks)

    return _over_state(lambda j: _pair_sum(e, j, params, "starred", labels_fn=labels), q, params)


@lru_cache(maxsize=None)
def _product_exponents(p: int, k: int) -> tuple:
    cnt = Counter(right_leg_stats(pi, p, k) for pi in enumerate_word_pairings(p, k))
    return tuple(sorted(cnt.items()))


def product_polynomial(p: int, k: int, d: Sequence) -> Fraction:
    """Multivariate Fuss-Narayana polynomial ``P_k(d_1, ..., d_{p+1})``.

    Examples
    --------
    >>> product_polynomial(1, 2, [Fraction(1, 2), Fraction(1, 2)])
    Fraction(1, 2)
    """
    d = [to_fraction(x) for x in d]
    if len(d) != p + 1:
        raise InvalidArgument(f"need p+1={p + 1} dimensions, got {len(d)}")
    if k == 0:
        return Fraction(1)
    tot = _ZERO
    for exps, n in _product_exponents(p, k):
        term = Fraction(n)
        for x, a in zip(d, exps):
            if a:
                term *= x ** a
        tot += term
    return tot


def product_polynomial_terms(p: int, k: int) -> tuple:
    """Monomials of ``P_k`` as ``(exponents of d_1..d_{p+1}, coefficient)`` pairs."""
    if k == 0:
        return (((0,) * (p + 1), 1),)
    return _product_exponents(p, k)


def format_polynomial(terms, names=None) -> str:
    """Render monomials as text, e.g. ``d2*d1^3 + 6*d2^2*d1^2``."""
    out = []
    for exps, c in sorted(terms, key=lambda t: tuple(-e for e in t[0][::-1])):
        names_ = names or [f"d{i + 1}" for i in range(len(exps))]
        mono = "*".join(f"{v}^{e}" if e > 1 else v for v, e in zip(names_, exps) if e)
        if not mono:
            out.append(str(c))
        else:
            out.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(out) if out else "0"


def multivariate_narayana(k: int, t: Sequence) -> Fraction:
    """``N_k(t_1, ..., t_p) = P_k(1, t_1, ..., t_p)``."""
    return product_polynomial(len(t), k, [1] + list(t))


def moment(word, q, params: ModelParams) -> Fraction:
    """Dispatch on the (homogeneous) operator kind of ``word``.

    ``word`` is text or a sequence of :class:`Op` with kinds among
    ``omega``, ``omega_hat``, ``gamma``, ``gamma_hat`` and ``eta``. For
    ``eta`` the parameters are doubled internally.
    """
    ops = parse_word(word)
    kinds = {op.kind for op in ops}
    if not kinds:
        return _over_state(lambda j: Fraction(1), q, params)
    if not kinds <= set(MOMENT_KINDS):
        raise InvalidArgument(f"kinds {sorted(kinds - set(MOMENT_KINDS))} have no moment formula")
    if len(kinds) > 1:
        raise InvalidArgument(f"a query mixes operator kinds {sorted(kinds)}")
    if any(op.star for op in ops) and kinds != {"eta"}:
        raise InvalidArgument("only eta letters take a star")
    kind = kinds.pop()
    if kind == "omega":
        return moment_gaussian(ops, q, params)
    if kind == "omega_hat":
        return moment_symmetrized(ops, q, params)
    if kind == "gamma":
        return moment_canonical(ops, q, params)
    if kind == "gamma_hat":
        return moment_canonical(ops, q, params, symmetric=True)
    return moment_eta(ops, q, params.doubled())
