"""
Noncrossing partitions, block nesting and adaptedness to index tuples.

Positions are 1-based throughout, matching the ground set ``[m] = {1, ..., m}``.
Block indices ``p, q`` take values in ``[r]`` and matrix labels ``u`` in ``[t]``.
The imaginary block ``(0, m + 1)`` encloses every partition and carries the
state color.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, NamedTuple, Optional, Sequence

from ._errors import InvalidArgument, ResourceLimitError

__all__ = [
    "MAX_PAIR_SIZE",
    "MAX_NC_SIZE",
    "IndexEntry",
    "NCPartition",
    "ColoredNCPartition",
    "as_entries",
    "enumerate_nc_pair",
    "enumerate_nc",
    "nearest_outer",
    "block_depth",
    "adapted_pair",
    "adapted_nc",
    "nci_filter",
    "enumerate_word_pairings",
    "right_leg_stats",
]

MAX_PAIR_SIZE = 24
MAX_NC_SIZE = 16
# W_k-pairings are enumerated with pruning, so the cap is on the pair count kp.
MAX_WORD_PAIRS = 24

Block = tuple


class IndexEntry(NamedTuple):
    """One letter of an index tuple.

    In ordered mode ``(p, q)`` is the ordered pair ``v = (p, q)``; in the
    symmetric and starred modes only the set ``{p, q}`` matters.
    """

    p: int
    q: int
    u: int = 1
    star: bool = False

    @property
    def pair(self) -> frozenset:
        return frozenset((self.p, self.q))


def _as_entry(e) -> IndexEntry:
    if isinstance(e, IndexEntry):
        return e
    e = tuple(e)
    if len(e) == 2 and all(isinstance(x, int) for x in e):
        return IndexEntry(e[0], e[1])
    if len(e) >= 2 and isinstance(e[0], (tuple, list, frozenset, set)):
        pq = tuple(sorted(e[0])) if isinstance(e[0], (set, frozenset)) else tuple(e[0])
        if len(pq) == 1:
            pq = pq * 2
        return IndexEntry(pq[0], pq[1], *e[1:])
    if 3 <= len(e) <= 4:
        return IndexEntry(*e)
    raise InvalidArgument(f"cannot read index entry {e!r}")


def as_entries(entries: Iterable) -> tuple:
    """Coerce a sequence of index entries.

    Accepted forms per entry: ``IndexEntry``, ``(p, q)``, ``(p, q, u)``,
    ``(p, q, u, star)``, ``((p, q), u)`` or ``({p, q}, u, star)``.
    """
    return tuple(_as_entry(e) for e in entries)


@dataclass(frozen=True)
class NCPartition:
    """A noncrossing partition of ``[m]``.

    Parameters
    ----------
    m : int
        Size of the ground set.
    blocks : sequence of sequences of int
        Blocks; stored sorted (each block ascending, blocks by first leg).

    Raises
    ------
    InvalidArgument
        If the blocks do not partition ``[m]`` or two blocks cross.
    """

    m: int
    blocks: tuple = field(default=())

    def __post_init__(self):
        blocks = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        object.__setattr__(self, "blocks", blocks)
        seen = sorted(x for b in blocks for x in b)
        if seen != list(range(1, self.m + 1)) or any(len(b) == 0 for b in blocks):
            raise InvalidArgument(f"blocks {blocks} do not partition [{self.m}]")
        # noncrossing check via a stack scan
        owner = {x: i for i, b in enumerate(blocks) for x in b}
        stack = []
        for x in range(1, self.m + 1):
            i = owner[x]
            b = blocks[i]
            if stack and stack[-1] == i:
                if x == b[-1]:
                    stack.pop()
                continue
            if x != b[0]:
                raise InvalidArgument(f"blocks {blocks} are crossing")
            if len(b) > 1:
                stack.append(i)

    @property
    def is_pair(self) -> bool:
        return all(len(b) == 2 for b in self.blocks)

    @cached_property
    def _nesting(self) -> tuple:
        # (parent block index or -1, index j with parent[j] < min(B) < parent[j+1])
        owner = {x: i for i, b in enumerate(self.blocks) for x in b}
        out = [None] * len(self.blocks)
        stack = []  # open blocks as [index, number of legs seen]
        for x in range(1, self.m + 1):
            i = owner[x]
            b = self.blocks[i]
            if x == b[0]:
                if stack:
                    out[i] = (stack[-1][0], stack[-1][1] - 1)
                else:
                    out[i] = (-1, 0)
                if len(b) > 1:
                    stack.append([i, 1])
            else:
                stack[-1][1] += 1
                if x == b[-1]:
                    stack.pop()
        return tuple(out)

    @cached_property
    def depths(self) -> tuple:
        d = []
        for parent, _ in self._nesting:
            d.append(0 if parent < 0 else d[parent] + 1)
        return tuple(d)

    def index(self, blk) -> int:
        try:
            return self.blocks.index(tuple(sorted(blk)))
        except ValueError:
            raise InvalidArgument(f"{blk} is not a block of {self.blocks}") from None

    def right_legs(self) -> tuple:
        return tuple(sorted(b[-1] for b in self.blocks if len(b) > 1))

    def __len__(self):
        return len(self.blocks)


def _check_size(m: int, limit: int, what: str):
    if m < 0:
        raise InvalidArgument("m must be nonnegative")
    if m > limit:
        raise ResourceLimitError(f"{what} enumeration is limited to m <= {limit}, got {m}")


def _pairings(positions: Sequence[int], compatible=None) -> list:
    """All noncrossing pairings of ``positions`` whose pairs pass ``compatible``.

    Returns lists of pair tuples; memoized on the interval.
    """
    n = len(positions)
    memo = {}

    def rec(lo, hi):
        # pairings of positions[lo:hi]
        key = (lo, hi)
        if key in memo:
            return memo[key]
        if lo >= hi:
            res = [()]
        elif (hi - lo) % 2:
            res = []
        else:
            res = []
            a = positions[lo]
            for j in range(lo + 1, hi, 2):
                b = positions[j]
                if compatible is not None and not compatible(a, b):
                    continue
                inner = rec(lo + 1, j)
                if not inner:
                    continue
                outer = rec(j + 1, hi)
                for x in inner:
                    for y in outer:
                        res.append(((a, b),) + x + y)
        memo[key] = res
        return res

    return rec(0, n)


@lru_cache(maxsize=None)
def _nc_pair_cached(m: int) -> tuple:
    out = [NCPartition(m, bl) for bl in _pairings(range(1, m + 1))]
    out.sort(key=lambda p: p.blocks)
    return tuple(out)


def enumerate_nc_pair(m: int) -> tuple:
    """All noncrossing pair partitions of ``[m]`` in canonical order.

    Odd ``m`` gives an empty tuple.

    Examples
    --------
    >>> len(enumerate_nc_pair(8))
    14
    """
    _check_size(m, MAX_PAIR_SIZE, "pair partition")
    return _nc_pair_cached(m)


def _nc_blocks(lo: int, hi: int):
    # noncrossing partitions of the interval lo..hi as tuples of blocks
    if lo > hi:
        yield ()
        return
    yield from _nc_extend((lo,), hi)


def _nc_extend(block: tuple, hi: int):
    last = block[-1]
    for rest in _nc_blocks(last + 1, hi):
        yield (block,) + rest
    for j in range(last + 1, hi + 1):
        for gap in _nc_blocks(last + 1, j - 1):
            for tail in _nc_extend(block + (j,), hi):
                yield gap + tail


@lru_cache(maxsize=None)
def _nc_cached(m: int) -> tuple:
    out = [NCPartition(m, bl) for bl in _nc_blocks(1, m)]
    out.sort(key=lambda p: p.blocks)
    return tuple(out)


def enumerate_nc(m: int) -> tuple:
    """All noncrossing partitions of ``[m]`` in canonical order.

    Examples
    --------
    >>> len(enumerate_nc(4))
    14
    """
    _check_size(m, MAX_NC_SIZE, "noncrossing partition")
    return _nc_cached(m)


def nearest_outer(pi: NCPartition, blk) -> tuple:
    """Nearest outer block of ``blk``, or the imaginary block ``(0, m+1)``.

    Examples
    --------
    >>> s = NCPartition(6, [(1, 6), (2, 3), (4, 5)])
    >>> nearest_outer(s, (2, 3))
    (1, 6)
    >>> nearest_outer(s, (1, 6))
    (0, 7)
    """
    i = pi.index(blk)
    parent = pi._nesting[i][0]
    return (0, pi.m + 1) if parent < 0 else pi.blocks[parent]


def block_depth(pi: NCPartition, blk) -> int:
    """Number of blocks strictly enclosing ``blk``; covering blocks have depth 0."""
    return pi.depths[pi.index(blk)]


@dataclass(frozen=True)
class ColoredNCPartition:
    """A partition with its induced coloring and labeling.

    Attributes
    ----------
    partition : NCPartition
    colors : tuple of tuple of int
        Per block, the colors of its consecutive subblocks ``(i_j, i_{j+1})``
        in order. Pair blocks carry one color; singletons carry none.
    outer_colors : tuple of int
        Per block, the color of the subblock (or imaginary block) it sits in.
    labels : tuple of int
        Per block, the common matrix label.
    imaginary_color : int or None
    resolved : tuple of (int, int)
        Ordered pair ``v_k`` assigned to each position.
    """

    partition: NCPartition
    colors: tuple
    outer_colors: tuple
    labels: tuple
    imaginary_color: Optional[int]
    resolved: tuple

    def color(self, blk) -> int:
        """Color of a pair block (first subblock color for longer blocks)."""
        c = self.colors[self.partition.index(blk)]
        if not c:
            raise InvalidArgument("singleton blocks carry no subblock color")
        return c[0]


def _resolve(entry: IndexEntry, need_q: int, mode: str):
    # ordered pair with second index need_q, or None
    if mode == "ordered":
        return (entry.p, entry.q) if entry.q == need_q else None
    if entry.q == need_q:
        return (entry.p, entry.q)
    if entry.p == need_q:
        return (entry.q, entry.p)
    return None


def _candidate_colors(entries):
    return sorted({x for e in entries for x in (e.p, e.q)})


def adapted_pair(pi: NCPartition, entries, mode: str = "ordered", q: Optional[int] = None):
    """Decide adaptedness of a pair partition and return the induced coloring.

    Parameters
    ----------
    pi : NCPartition
        Must be a pair partition.
    entries : sequence
        Index tuple of length ``pi.m`` (see :func:`as_entries`).
    mode : {'ordered', 'symmetric', 'starred'}
        ``ordered`` requires equal ordered pairs and labels on each block.
        ``symmetric`` reads the pairs as unordered sets and resolves them
        top-down from the imaginary color. ``starred`` additionally requires
        one starred and one unstarred leg per block.
    q : int, optional
        Imaginary color. In ordered mode, when omitted, covering blocks are
        unconstrained and ``imaginary_color`` is their common second index
        (None if they disagree). In the other modes, when omitted, candidate
        colors are tried in increasing order and the first success returned.

    Returns
    -------
    ColoredNCPartition or None

    Examples
    --------
    >>> pi = NCPartition(4, [(1, 4), (2, 3)])
    >>> c = adapted_pair(pi, [(2, 1), (2, 2), (2, 2), (2, 1)], q=1)
    >>> c.colors, c.imaginary_color
    (((2,), (2,)), 1)
    """
    entries = as_entries(entries)
    if len(entries) != pi.m:
        raise InvalidArgument(f"tuple length {len(entries)} does not match m={pi.m}")
    if not pi.is_pair:
        raise InvalidArgument("adapted_pair needs a pair partition")
    if mode not in ("ordered", "symmetric", "starred"):
        raise InvalidArgument(f"unknown mode {mode!r}")
    if q is None and mode != "ordered":
        for c in _candidate_colors(entries):
            res = adapted_pair(pi, entries, mode, c)
            if res is not None:
                return res
        return None
    return _adapted(pi, entries, mode, q)


def _adapted(pi, entries, mode, q):
    blocks = pi.blocks
    nest = pi._nesting
    colors = [None] * len(blocks)
    outer = [None] * len(blocks)
    labels = [None] * len(blocks)
    resolved = [None] * pi.m
    free_cover = q is None
    cover_qs = set()
    # parents precede children in canonical (first-leg) order
    for i, b in enumerate(blocks):
        parent, j = nest[i]
        es = [entries[x - 1] for x in b]
        u = es[0].u
        if any(e.u != u for e in es):
            return None
        c = q if parent < 0 else colors[parent][j]
        k = len(b)
        if k == 1:
            # singleton: gamma_{c,c} acting through P_c
            e = es[0]
            if free_cover and parent < 0:
                if e.p != e.q:
                    return None
                c = e.q
                cover_qs.add(c)
            if {e.p, e.q} != {c}:
                return None
            colors[i] = ()
            outer[i] = c
            labels[i] = u
            resolved[b[0] - 1] = (c, c)
            continue
        if mode == "starred" and len({e.star for e in es}) != 2:
            return None
        if free_cover and parent < 0:
            c = es[0].q
            cover_qs.add(c)
        v = [None] * k
        v[0] = _resolve(es[0], c, mode)
        if v[0] is None:
            return None
        for leg in range(1, k - 1):
            v[leg] = _resolve(es[leg], v[leg - 1][0], mode)
            if v[leg] is None:
                return None
        last = _resolve(es[-1], c, mode)
        if last is None or last[0] != v[k - 2][0]:
            return None
        v[-1] = last
        colors[i] = tuple(x[0] for x in v[:-1])
        outer[i] = c
        labels[i] = u
        for x, vv in zip(b, v):
            resolved[x - 1] = vv
    if free_cover:
        q = cover_qs.pop() if len(cover_qs) == 1 else None
    return ColoredNCPartition(pi, tuple(colors), tuple(outer), tuple(labels), q, tuple(resolved))


def adapted_nc(pi: NCPartition, entries, mode: str = "ordered", q: Optional[int] = None):
    """Adaptedness of a general noncrossing partition.

    A block ``i_1 < ... < i_k`` sitting in a subblock of color ``c`` is adapted
    when its legs share one label and ``q_{i_1} = q_{i_k} = c``,
    ``p_{i_{k-1}} = p_{i_k}`` and ``q_{i_j} = p_{i_{j-1}}`` for ``1 < j < k``.
    It is colored by ``(p_{i_1}, ..., p_{i_{k-1}})``. A singleton requires
    ``p = q = c``.

    Parameters and return value as in :func:`adapted_pair`, with modes
    ``ordered`` and ``symmetric``.
    """
    entries = as_entries(entries)
    if len(entries) != pi.m:
        raise InvalidArgument(f"tuple length {len(entries)} does not match m={pi.m}")
    if mode not in ("ordered", "symmetric"):
        raise InvalidArgument(f"unknown mode {mode!r}")
    if q is None and mode != "ordered":
        for c in _candidate_colors(entries):
            res = _adapted(pi, entries, mode, c)
            if res is not None:
                return res
        return None
    return _adapted(pi, entries, mode, q)


def nci_filter(colored: ColoredNCPartition) -> bool:
    """True iff no subblock carries the imaginary color."""
    q = colored.imaginary_color
    return all(q not in c for c in colored.colors)


# W_k-pairings ---------------------------------------------------------------

def _word_letters(p: int, k: int) -> tuple:
    # letter j as +j, j* as -j
    one = tuple(range(1, p + 1)) + tuple(-j for j in range(p, 0, -1))
    return one * k


def enumerate_word_pairings(p: int, k: int) -> tuple:
    """Noncrossing pairings of ``(1 2 .. p p* .. 2* 1*)^k`` joining ``j`` with ``j*``.

    Examples
    --------
    >>> len(enumerate_word_pairings(2, 3))
    12
    """
    if p < 1 or k < 0:
        raise InvalidArgument("need p >= 1 and k >= 0")
    if k * p > MAX_WORD_PAIRS:
        raise ResourceLimitError(f"W_k enumeration is limited to kp <= {MAX_WORD_PAIRS}")
    return _word_pairings_cached(p, k)


@lru_cache(maxsize=None)
def _word_pairings_cached(p: int, k: int) -> tuple:
    letters = _word_letters(p, k)
    m = len(letters)

    def ok(a, b):
        return letters[a - 1] == -letters[b - 1]

    out = [NCPartition(m, bl) for bl in _pairings(range(1, m + 1), ok)]
    out.sort(key=lambda x: x.blocks)
    return tuple(out)


def right_leg_stats(pi: NCPartition, p: int, k: int) -> tuple:
    """Exponents ``(r_1, ..., r_{p+1})`` of a W_k-pairing.

    ``r_j`` counts right legs carrying letter ``j`` plus right legs carrying
    ``(j-1)*``.

    Examples
    --------
    >>> right_leg_stats(enumerate_word_pairings(2, 1)[0], 2, 1)
    (0, 1, 1)
    """
    letters = _word_letters(p, k)
    if pi.m != len(letters):
        raise InvalidArgument(f"partition size {pi.m} does not match the word length {len(letters)}")
    r = [0] * (p + 2)
    for b in pi.blocks:
        if len(b) != 2 or letters[b[0] - 1] != -letters[b[1] - 1]:
            raise InvalidArgument(f"{pi.blocks} is not a W_k-pairing")
        x = letters[b[1] - 1]
        if x > 0:
            r[x] += 1
        else:
            r[-x + 1] += 1
    return tuple(r[1:])
