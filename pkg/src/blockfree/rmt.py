"""
Monte Carlo block random-matrix simulator.

Samples Hermitian Gaussian (HGRM) and Ginibre block ensembles, forms symmetric
blocks and partial traces, and compares empirical mixed moments with the exact
limits from :mod:`blockfree.moments`.

Randomness
----------
Every block ``(a, b)`` of matrix ``u`` in sample ``i`` at size ``n`` is drawn
from its own Philox-4x64 stream keyed by
``SeedSequence([seed, n, i, stream, u, a, b])`` and turned into normals by the
trigonometric Box-Muller transform. A block's values therefore never depend on
which other blocks were drawn, on evaluation order, or on scheduling.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ._errors import InvalidArgument, UndefinedTrace
from .params import ModelParams, format_fraction, to_fraction
from .words import Op

__all__ = [
    "RNG_ID",
    "FORMAT_VERSION",
    "BlockStructure",
    "EnsembleSpec",
    "SymmetricBlock",
    "MomentRow",
    "MomentReport",
    "Histogram",
    "standard_normals",
    "sample_hgrm",
    "sample_ginibre",
    "symmetric_block",
    "classify_block",
    "parse_block_word",
    "format_block_word",
    "limit_word",
    "exact_limit",
    "trace_samples",
    "partial_trace_moment",
    "convergence_report",
    "eigenvalue_histogram",
    "word_matrix",
]

RNG_ID = "philox4x64-10; SeedSequence(seed, n, sample, stream, label, p, q); box-muller-trig"
FORMAT_VERSION = "blockfree-report/1"
KINDS = ("hermitian-gaussian", "ginibre")
_STREAM = {"hermitian-gaussian": 1, "ginibre": 2, "probe": 3}
_MAX_SEED = 2 ** 64


# structure -----------------------------------------------------------------------

@dataclass(frozen=True)
class BlockStructure:
    """Consecutive intervals ``N_1..N_r`` of sizes ``n_1..n_r`` partitioning ``[n]``.

    Zero sizes are allowed; they model a vanishing dimension at finite ``n``.
    """

    sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or any(s < 0 for s in sizes) or sum(sizes) == 0:
            raise InvalidArgument("block sizes must be nonnegative with a positive total")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def from_dims(cls, d: Sequence, n: int, growth: Optional[float] = 0.5) -> "BlockStructure":
        """Sizes for asymptotic dimensions ``d`` at total size ``n``.

        A zero ``d_q`` gets ``floor(n**growth)`` rows (none when ``growth`` is
        None); the rest of ``[n]`` is split in proportion to the positive
        ``d_q`` by largest remainders.
        """
        d = [to_fraction(x) for x in d]
        if any(x < 0 for x in d) or sum(d) == 0:
            raise InvalidArgument("dimensions must be nonnegative and not all zero")
        zero = [i for i, x in enumerate(d) if x == 0]
        small = math.floor(n ** growth) if zero and growth is not None else 0
        rest = n - small * len(zero)
        if rest < sum(1 for x in d if x > 0):
            raise InvalidArgument(f"n={n} too small for dimensions {d}")
        tot = sum(d)
        quota = [x / tot * rest for x in d]
        sizes = [math.floor(x) if x > 0 else small for x in quota]
        left = rest - sum(s for s, x in zip(sizes, d) if x > 0)
        order = sorted((i for i, x in enumerate(d) if x > 0), key=lambda i: (-(quota[i] - math.floor(quota[i])), i))
        for i in order[:left]:
            sizes[i] += 1
        return cls(tuple(sizes))

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def r(self) -> int:
        return len(self.sizes)

    def interval(self, q: int) -> slice:
        """Row slice of ``N_q`` (1-based ``q``)."""
        lo = sum(self.sizes[: q - 1])
        return slice(lo, lo + self.sizes[q - 1])

    def projection(self, q: int) -> np.ndarray:
        D = np.zeros((self.n, self.n))
        s = self.interval(q)
        D[s, s] = np.eye(self.sizes[q - 1])
        return D

    @property
    def dims(self) -> tuple:
        return tuple(Fraction(s, self.n) for s in self.sizes)


@dataclass(frozen=True)
class EnsembleSpec:
    """Simulation configuration.

    Attributes
    ----------
    kind : {'hermitian-gaussian', 'ginibre'}
    V : tuple
        Variance profiles ``V(1)..V(t)``, each symmetric ``r x r``.
    d : tuple
        Asymptotic dimensions used for the block sizes and the exact limits.
    seed : int
        64-bit seed.
    samples : int
    n_grid : tuple of int
    growth : float or None
        Exponent for the size ``floor(n**growth)`` of blocks with ``d_q = 0``;
        None leaves them empty.
    trace : {'exact', 'probe'}
        ``probe`` replaces the trace by random-phase probes (unbiased).
    probes : int
        Probe vectors per sample in ``probe`` mode.
    """

    kind: str
    V: tuple
    d: tuple
    seed: int = 0
    samples: int = 100
    n_grid: tuple = (100,)
    growth: Optional[float] = 0.5
    trace: str = "exact"
    probes: int = 32

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"kind must be one of {KINDS}, got {self.kind!r}")
        d = tuple(to_fraction(x) for x in self.d)
        r = len(d)
        V = tuple(tuple(tuple(to_fraction(x) for x in row) for row in m) for m in self.V)
        if not V:
            raise InvalidArgument("at least one variance profile is needed")
        for m in V:
            if len(m) != r or any(len(row) != r for row in m):
                raise InvalidArgument(f"each V(u) must be {r}x{r}")
            if any(x < 0 for row in m for x in row):
                raise InvalidArgument("variances must be nonnegative")
            if any(m[i][j] != m[j][i] for i in range(r) for j in range(r)):
                raise InvalidArgument("variance profiles must be symmetric")
        if not 0 <= int(self.seed) < _MAX_SEED:
            raise InvalidArgument("seed must be a 64-bit unsigned integer")
        if int(self.samples) < 1:
            raise InvalidArgument("samples must be positive")
        if self.trace not in ("exact", "probe"):
            raise InvalidArgument("trace must be 'exact' or 'probe'")
        if int(self.probes) < 1:
            raise InvalidArgument("probes must be positive")
        grid = tuple(int(n) for n in self.n_grid)
        if not grid or any(n < 1 for n in grid):
            raise InvalidArgument("n_grid must list positive sizes")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "samples", int(self.samples))
        object.__setattr__(self, "probes", int(self.probes))
        object.__setattr__(self, "n_grid", grid)

    @property
    def r(self) -> int:
        return len(self.d)

    @property
    def t(self) -> int:
        return len(self.V)

    def structure(self, n: int) -> BlockStructure:
        return BlockStructure.from_dims(self.d, n, self.growth)

    def params(self) -> ModelParams:
        """Limit parameters ``B(u) = D V(u)``."""
        return ModelParams.from_variances(self.d, self.V)

    def to_dict(self) -> dict:
        f = format_fraction
        return {
            "kind": self.kind,
            "V": [[[f(x) for x in row] for row in m] for m in self.V],
            "d": [f(x) for x in self.d],
            "seed": self.seed,
            "samples": self.samples,
            "n_grid": list(self.n_grid),
            "growth": self.growth,
            "trace": self.trace,
            "probes": self.probes,
        }


# sampling -------------------------------------------------------------------------

def standard_normals(key: Sequence[int], count: int) -> np.ndarray:
    """``count`` standard normals from the Philox stream keyed by ``key``."""
    if count == 0:
        return np.zeros(0)
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(k) for k in key])))
    m = (count + 1) // 2
    u = gen.random(2 * m)
    rad = np.sqrt(-2.0 * np.log1p(-u[:m]))
    ang = 2.0 * np.pi * u[m:]
    return np.concatenate((rad * np.cos(ang), rad * np.sin(ang)))[:count]


class _Draw:
    """Lazily sampled blocks of the matrices of one sample."""

    def __init__(self, kind: str, structure: BlockStructure, V, seed: int, sample: int):
        self.kind, self.st, self.V = kind, structure, V
        self.key = (seed, structure.n, sample, _STREAM[kind])
        self.cache = {}

    def var(self, u, a, b) -> float:
        return float(self.V[u - 1][a - 1][b - 1])

    def block(self, u: int, a: int, b: int) -> np.ndarray:
        """Block ``Y(u)[N_a, N_b]``."""
        key = (u, a, b)
        if key in self.cache:
            return self.cache[key]
        if self.kind == "hermitian-gaussian" and a > b:
            out = self.block(u, b, a).conj().T
        else:
            out = self._draw(u, a, b)
        self.cache[key] = out
        return out

    def _draw(self, u, a, b):
        na, nb = self.st.sizes[a - 1], self.st.sizes[b - 1]
        n, v = self.st.n, self.var(u, a, b)
        sd = math.sqrt(v / (2 * n))
        if self.kind == "hermitian-gaussian" and a == b:
            # real parts from the strict upper triangle, imaginary parts from the lower
            z = standard_normals(self.key + (u, a, b), na * na).reshape(na, na)
            up = sd * (np.triu(z, 1) + 1j * np.triu(z.T, 1))
            out = up + up.conj().T
            out[np.diag_indices(na)] = np.diagonal(z) * math.sqrt(v / n)
            return out
        z = standard_normals(self.key + (u, a, b), 2 * na * nb)
        return sd * (z[: na * nb] + 1j * z[na * nb:]).reshape(na, nb)

    def matrix(self, u: int) -> np.ndarray:
        r = self.st.r
        return np.block([[self.block(u, a, b) for b in range(1, r + 1)] for a in range(1, r + 1)])


def _check_V(structure: BlockStructure, V):
    V = [[float(to_fraction(x)) for x in row] for row in V]
    r = structure.r
    if len(V) != r or any(len(row) != r for row in V):
        raise InvalidArgument(f"V must be {r}x{r}")
    return V


def sample_hgrm(u: int, structure: BlockStructure, V, seed: int, sample: int = 0) -> np.ndarray:
    """Hermitian Gaussian random matrix with block variance profile ``V``.

    Diagonal entries in ``N_q`` have variance ``v_{q,q}/n``; off-diagonal
    entries in ``N_p x N_q`` have real and imaginary parts of variance
    ``v_{p,q}/(2n)`` each.
    """
    V = [None] * (u - 1) + [_check_V(structure, V)]
    return _Draw("hermitian-gaussian", structure, V, seed, sample).matrix(u)


def sample_ginibre(u: int, structure: BlockStructure, V, seed: int, sample: int = 0) -> np.ndarray:
    """Ginibre matrix: independent entries with ``Re, Im ~ N(0, v_{p,q}/(2n))``."""
    V = [None] * (u - 1) + [_check_V(structure, V)]
    return _Draw("ginibre", structure, V, seed, sample).matrix(u)


def classify_block(p: int, q: int, dims: Sequence) -> str:
    """``balanced`` if ``d_p, d_q > 0``, ``evanescent`` if both vanish, else ``unbalanced``."""
    dp, dq = to_fraction(dims[p - 1]), to_fraction(dims[q - 1])
    if dp > 0 and dq > 0:
        return "balanced"
    if dp == 0 and dq == 0:
        return "evanescent"
    return "unbalanced"


@dataclass
class SymmetricBlock:
    matrix: np.ndarray
    p: int
    q: int
    classification: str


def symmetric_block(Y: np.ndarray, p: int, q: int, structure: BlockStructure,
                    dims: Optional[Sequence] = None) -> SymmetricBlock:
    """``D_q Y D_q`` if ``p = q``, else ``D_p Y D_q + D_q Y D_p``.

    The classification uses ``dims`` (asymptotic dimensions), defaulting to
    the empirical ``n_q / n``.
    """
    if not 1 <= p <= q <= structure.r:
        raise InvalidArgument(f"need 1 <= p <= q <= {structure.r}, got ({p},{q})")
    out = np.zeros_like(Y)
    sp, sq = structure.interval(p), structure.interval(q)
    out[sp, sq] = Y[sp, sq]
    out[sq, sp] = Y[sq, sp]
    kind = classify_block(p, q, dims if dims is not None else structure.dims)
    return SymmetricBlock(out, p, q, kind)


# words ----------------------------------------------------------------------------

_TOKEN = re.compile(r"^(?:T\[\s*(\d+)\s*,\s*(\d+)\s*(?:;\s*(\d+)\s*)?\]|Y(?:\[\s*(\d+)\s*\])?)(\*?)$")


def parse_block_word(text) -> tuple:
    """Parse a word of block letters into ``(p, q, u, star)`` tuples.

    ``T[p,q;u]`` is the symmetric block ``T_{p,q}(u)``; ``Y[u]`` (or ``Y``)
    is the whole matrix, stored as ``p = q = 0``. A trailing ``*`` takes the
    adjoint.
    """
    if not isinstance(text, str):
        return tuple((int(p), int(q), int(u), bool(s)) for p, q, u, s in text)
    out = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise InvalidArgument(f"malformed block token {tok!r}")
        p, q, u, yu, star = m.groups()
        if p is None:
            out.append((0, 0, int(yu or 1), bool(star)))
        else:
            out.append((int(p), int(q), int(u or 1), bool(star)))
    return tuple(out)


def _fmt_letter(p, q, u, s) -> str:
    if p == 0:
        base = "Y" if u == 1 else f"Y[{u}]"
    else:
        base = f"T[{p},{q}" + (f";{u}]" if u != 1 else "]")
    return base + ("*" if s else "")


def format_block_word(word) -> str:
    return " ".join(_fmt_letter(*x) for x in word)


def _adjoint(word) -> tuple:
    return tuple((p, q, u, not s) for p, q, u, s in reversed(word))


def limit_word(word, kind: str) -> tuple:
    """Operator word whose moment is the large-``n`` limit of the block word."""
    if kind == "hermitian-gaussian":
        return tuple(Op("omega_hat", p, q, u) for p, q, u, _ in word)
    return tuple(Op("eta", p, q, u, s) for p, q, u, s in word)


def _expand(word, r: int):
    # replace each Y letter by the symmetric blocks T_{p,q}, p <= q
    pieces = [[(p, q, u, s)] if p else [(a, b, u, s) for a in range(1, r + 1) for b in range(a, r + 1)]
              for p, q, u, s in word]
    return itertools.product(*pieces)


def exact_limit(word, q, spec: EnsembleSpec) -> Fraction:
    """Exact limit of ``tau_q(n)`` (``q=None``: ``tau(n)``) of a block word."""
    from .moments import PSI, moment

    word = parse_block_word(word)
    if not word:
        return Fraction(1)
    params, state = spec.params(), PSI if q is None else q
    return sum((moment(limit_word(w, spec.kind), state, params) for w in _expand(word, spec.r)),
               Fraction(0))


def _apply(draw: _Draw, letter, vec: dict) -> dict:
    # T_{p,q}^eps acting on a vector split by blocks
    p, q, u, star = letter
    out = {}

    def put(dst, mat, src):
        if src in vec and mat.size:
            y = mat @ vec[src]
            out[dst] = out[dst] + y if dst in out else y

    if p == 0:
        for a in range(1, draw.st.r + 1):
            for b in vec:
                put(a, draw.block(u, b, a).conj().T if star else draw.block(u, a, b), b)
        return out
    if p == q:
        Y = draw.block(u, p, p)
        put(p, Y.conj().T if star else Y, p)
        return out
    if star:
        put(q, draw.block(u, p, q).conj().T, p)
        put(p, draw.block(u, q, p).conj().T, q)
    else:
        put(p, draw.block(u, p, q), q)
        put(q, draw.block(u, q, p), p)
    return out


def _check_word(word, spec: EnsembleSpec):
    for p, q, u, _ in word:
        if p == q == 0:
            pass
        elif not (1 <= p <= spec.r and 1 <= q <= spec.r):
            raise InvalidArgument(f"block ({p},{q}) out of range 1..{spec.r}")
        if not 1 <= u <= spec.t:
            raise InvalidArgument(f"label {u} out of range 1..{spec.t}")


def _probe(spec: EnsembleSpec, st: BlockStructure, sample: int, q: int) -> np.ndarray:
    nq = st.sizes[q - 1]
    if spec.trace == "exact":
        return np.eye(nq, dtype=complex)
    # unit-modulus entries with uniform phases: E[z z^*] = I and |z_i| = 1
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(
        [spec.seed, st.n, sample, _STREAM["probe"], 0, q, q])))
    return np.exp(2j * np.pi * gen.random((nq, spec.probes)))


def _sample_traces(draw: _Draw, spec: EnsembleSpec, words: list, q: int, sample: int) -> list:
    # tau_q estimates z^* A B z = <A^* z, B z> for w = AB split in the middle,
    # with products on shared suffixes computed once
    st = draw.st
    Z = _probe(spec, st, sample, q)
    scale = st.sizes[q - 1] * (1 if spec.trace == "exact" else spec.probes)
    memo = {(): {q: Z}}
    hermitian = spec.kind == "hermitian-gaussian"

    def applied(w):
        if w not in memo:
            memo[w] = _apply(draw, w[0], applied(w[1:]))
        return memo[w]

    out = []
    for w in words:
        k = len(w) // 2
        adj = _adjoint(w[:k])
        if hermitian:
            # every letter is self-adjoint
            adj = tuple((p, q_, u, False) for p, q_, u, _ in adj)
        left, right = applied(adj), applied(tuple(w[k:]))
        out.append(sum((np.vdot(left[b], right[b]) for b in left if b in right), 0j) / scale)
    return out


def trace_samples(words, qs, spec: EnsembleSpec, n: int) -> dict:
    """Per-sample estimates of ``tau_q(n)(word)`` for every word and ``q``.

    ``q=None`` stands for the full trace ``tau(n) = sum_q (n_q/n) tau_q(n)``,
    assembled from the partial traces of the same sample.

    Returns
    -------
    dict
        ``(word, q) -> complex ndarray`` of length ``spec.samples``.
    """
    st = spec.structure(n)
    words = [parse_block_word(w) for w in words]
    for w in words:
        _check_word(w, spec)
    qs = list(qs)
    parts = set()
    for q in qs:
        if q is None:
            parts.update(i for i in range(1, st.r + 1) if st.sizes[i - 1])
        else:
            if not 1 <= q <= st.r:
                raise InvalidArgument(f"q={q} out of range 1..{st.r}")
            if st.sizes[q - 1] == 0:
                raise UndefinedTrace(f"n_{q} = 0: the partial trace tau_{q} is undefined")
            parts.add(q)
    vals = {(w, q): np.zeros(spec.samples, dtype=complex) for w in words for q in parts}
    for i in range(spec.samples):
        draw = _Draw(spec.kind, st, spec.V, spec.seed, i)
        for q in sorted(parts):
            for w, x in zip(words, _sample_traces(draw, spec, words, q, i)):
                vals[(w, q)][i] = 1.0 if not w else x
    out = {}
    for w in words:
        for q in qs:
            if q is None:
                acc = sum(st.sizes[p - 1] * vals[(w, p)] for p in sorted(parts))
                out[(w, None)] = acc / st.n
            else:
                out[(w, q)] = vals[(w, q)]
    return out


# reports --------------------------------------------------------------------------

@dataclass
class MomentRow:
    word: str
    q: object
    n: int
    samples: int
    empirical: float
    stderr: float
    exact: Fraction
    tolerance: float = float("nan")

    @property
    def abs_dev(self) -> float:
        return abs(self.empirical - float(self.exact))

    @property
    def z_score(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.abs_dev == 0 else math.inf
        return (self.empirical - float(self.exact)) / self.stderr

    @property
    def passed(self) -> bool:
        return self.abs_dev <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "word": self.word,
            "q": "all" if self.q is None else self.q,
            "n": self.n,
            "samples": self.samples,
            "empirical": self.empirical,
            "stderr": self.stderr,
            "exact": format_fraction(self.exact),
            "z-score": self.z_score,
            "abs_dev": self.abs_dev,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


_COLUMNS = ["word", "q", "n", "samples", "empirical", "stderr", "exact", "z-score",
            "abs_dev", "tolerance", "passed"]


@dataclass
class MomentReport:
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def failures(self) -> list:
        return [row for row in self.rows if not row.passed]

    def to_json(self) -> str:
        return json.dumps({"meta": self.meta, "rows": [r.as_dict() for r in self.rows]}, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.meta.items():
            buf.write(f"# {k}: {json.dumps(v, sort_keys=True)}\n")
        w = csv.DictWriter(buf, fieldnames=_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            d = r.as_dict()
            w.writerow({k: _fmt(d[k]) for k in _COLUMNS})
        return buf.getvalue()


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return x


def _mean_stderr(x: np.ndarray) -> tuple:
    vals = [float(v) for v in x]
    N = len(vals)
    mean = math.fsum(vals) / N
    if N < 2:
        return mean, math.inf
    var = math.fsum((v - mean) ** 2 for v in vals) / (N - 1)
    return mean, math.sqrt(var / N)


def report_meta(spec: EnsembleSpec, **extra) -> dict:
    meta = {"format": FORMAT_VERSION, "rng": RNG_ID, "ensemble": spec.to_dict()}
    meta.update(extra)
    return meta


def partial_trace_moment(word, q, spec: EnsembleSpec, n: Optional[int] = None,
                         c: float = 8.0, rate: str = "1/n", sigmas: float = 3.0) -> MomentRow:
    """Monte Carlo estimate of ``tau_q(n)(word)`` with its exact limit.

    The row's tolerance is ``max(sigmas * stderr, c * rate(n))``.
    """
    n = spec.n_grid[0] if n is None else n
    return convergence_report([word], [q], spec, c=c, rate=rate, sigmas=sigmas, grid=[n]).rows[0]


def _rate(rate: str, n: int) -> float:
    if rate == "1/n":
        return 1.0 / n
    if rate == "1/sqrt(n)":
        return 1.0 / math.sqrt(n)
    raise InvalidArgument(f"rate must be '1/n' or '1/sqrt(n)', got {rate!r}")


def convergence_report(words, qs, spec: EnsembleSpec, c: float = 8.0, rate: str = "1/n",
                       sigmas: float = 3.0, grid: Optional[Sequence[int]] = None) -> MomentReport:
    """Empirical vs exact-limit moments over the size grid.

    Each row passes when ``|empirical - exact| <= max(sigmas * stderr, c * rate(n))``.
    """
    words = [parse_block_word(w) for w in words]
    exact = {(w, q): exact_limit(w, q, spec) for w in words for q in qs}
    rows = []
    for n in (spec.n_grid if grid is None else grid):
        est = trace_samples(words, qs, spec, n)
        for w in words:
            for q in qs:
                mean, se = _mean_stderr(est[(w, q)].real)
                tol = max(sigmas * se, c * _rate(rate, n))
                rows.append(MomentRow(format_block_word(w), q, n, spec.samples, mean, se,
                                      exact[(w, q)], tol))
    return MomentReport(rows, report_meta(spec, tolerance={"c": c, "rate": rate, "sigmas": sigmas}))


# histograms -----------------------------------------------------------------------

@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    centers: np.ndarray
    pdf: Optional[np.ndarray]
    predicted: Optional[np.ndarray]
    l1: Optional[float]
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.meta.items():
            buf.write(f"# {k}: {json.dumps(v, sort_keys=True)}\n")
        buf.write("x,lo,hi,count,freq,pdf,predicted\n")
        total = self.counts.sum()
        for i, x in enumerate(self.centers):
            pdf = "" if self.pdf is None else repr(float(self.pdf[i]))
            pr = "" if self.predicted is None else repr(float(self.predicted[i]))
            buf.write(f"{x!r},{self.edges[i]!r},{self.edges[i + 1]!r},{int(self.counts[i])},"
                      f"{float(self.counts[i] / total)!r},{pdf},{pr}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "meta": self.meta,
            "x": self.centers.tolist(),
            "edges": self.edges.tolist(),
            "count": self.counts.tolist(),
            "pdf": None if self.pdf is None else self.pdf.tolist(),
            "predicted": None if self.predicted is None else self.predicted.tolist(),
            "l1": self.l1,
        }, indent=2)


def word_matrix(draw: _Draw, word, q: Optional[int]) -> np.ndarray:
    """Compression of the word to ``N_q`` (``q=None``: the full matrix)."""
    st = draw.st
    blocks = [q] if q is not None else [i for i in range(1, st.r + 1) if st.sizes[i - 1]]
    cols = []
    for b in blocks:
        v = {b: np.eye(st.sizes[b - 1], dtype=complex)}
        for letter in reversed(word):
            v = _apply(draw, letter, v)
        cols.append(np.vstack([v.get(a, np.zeros((st.sizes[a - 1], st.sizes[b - 1]))) for a in blocks]))
    return np.hstack(cols)


def eigenvalue_histogram(word, q, spec: EnsembleSpec, n: int, bins: int = 50,
                         range_: Optional[tuple] = None, density=None,
                         samples: Optional[int] = None) -> Histogram:
    """Pooled eigenvalue histogram of a Hermitian word, with a density overlay.

    ``density`` is an :class:`blockfree.analytic.Density`. The L1 discrepancy
    is ``sum_bins |freq - predicted mass| + predicted mass outside the range``.

    Raises
    ------
    InvalidArgument
        If the word does not produce a Hermitian matrix.
    """
    word = parse_block_word(word)
    _check_word(word, spec)
    st = spec.structure(n)
    if q is not None and st.sizes[q - 1] == 0:
        raise UndefinedTrace(f"n_{q} = 0")
    N = spec.samples if samples is None else int(samples)
    eigs = []
    for i in range(N):
        draw = _Draw(spec.kind, st, spec.V, spec.seed, i)
        W = word_matrix(draw, word, q)
        scale = max(1.0, float(np.abs(W).max()))
        if np.abs(W - W.conj().T).max() > 1e-10 * scale:
            raise InvalidArgument(f"word {format_block_word(word)} is not Hermitian")
        eigs.append(np.linalg.eigvalsh(W))
    ev = np.concatenate(eigs)
    if range_ is None:
        lo, hi = float(ev.min()), float(ev.max())
        if density is not None:
            sup = density.support()
            lo, hi = min(lo, min(a for a, _ in sup)), max(hi, max(b for _, b in sup))
        pad = 1e-9 * max(1.0, hi - lo)
        range_ = (lo - pad, hi + pad)
    counts, edges = np.histogram(ev, bins=bins, range=range_)
    centers = (edges[:-1] + edges[1:]) / 2
    pdf = predicted = l1 = None
    if density is not None:
        pdf = np.asarray(density.pdf(centers), dtype=float)
        predicted = np.array([density.interval_mass(edges[j], edges[j + 1], include_hi=(j == bins - 1))
                              for j in range(bins)])
        freq = counts / len(ev)
        outside = max(0.0, 1.0 - predicted.sum())
        l1 = float(np.abs(freq - predicted).sum() + outside)
    meta = report_meta(spec, word=format_block_word(word), q="all" if q is None else q, n=n,
                       samples=N, density=None if density is None else density.name)
    return Histogram(edges, counts, centers, pdf, predicted, l1, meta)
