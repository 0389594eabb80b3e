"""Model parameters shared by the exact engines."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ._errors import InvalidArgument

__all__ = ["to_fraction", "format_fraction", "ModelParams"]


def to_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, ``"num/den"`` string or float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InvalidArgument(f"not a number: {x!r}")
    if isinstance(x, (int, float)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise InvalidArgument(f"not a rational: {x!r}") from None
    raise InvalidArgument(f"not a number: {x!r}")


def format_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _matrix(a, r: int, name: str) -> tuple:
    rows = tuple(tuple(to_fraction(x) for x in row) for row in a)
    if len(rows) != r or any(len(row) != r for row in rows):
        raise InvalidArgument(f"{name} must be {r}x{r}")
    if any(x < 0 for row in rows for x in row):
        raise InvalidArgument(f"{name} has negative entries")
    return rows


@dataclass(frozen=True)
class ModelParams:
    """Dimensions, covariances, free cumulants and optional scalings.

    Indices are 1-based in all accessors: ``b(p, q, u)`` is ``b_{p,q}(u)``.

    Attributes
    ----------
    d : tuple of Fraction
        Asymptotic dimensions ``d_1..d_r``.
    B : tuple
        ``t`` covariance matrices; ``B[u-1][p-1][q-1] = b_{p,q}(u)``.
    cumulants : tuple
        ``t`` finite sequences ``(r_1(u), r_2(u), ...)``, zero-extended.
    scalings : tuple or None
        ``t`` matrices ``c_{p,q}(u)`` scaling the canonical variables;
        None means all ones.
    """

    d: tuple
    B: tuple
    cumulants: tuple = ()
    scalings: Optional[tuple] = None

    def __post_init__(self):
        d = tuple(to_fraction(x) for x in self.d)
        if not d or any(x < 0 for x in d):
            raise InvalidArgument("d must be a nonempty sequence of nonnegative numbers")
        r = len(d)
        B = tuple(_matrix(m, r, "B(u)") for m in self.B)
        if not B:
            raise InvalidArgument("at least one covariance matrix is needed")
        cum = tuple(tuple(to_fraction(x) for x in seq) for seq in self.cumulants)
        if cum and len(cum) != len(B):
            raise InvalidArgument("one cumulant sequence per label is needed")
        sc = self.scalings
        if sc is not None:
            sc = tuple(tuple(tuple(to_fraction(x) for x in row) for row in m) for m in sc)
            if len(sc) != len(B) or any(len(m) != r or any(len(row) != r for row in m) for m in sc):
                raise InvalidArgument("scalings must be t matrices of size r x r")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "cumulants", cum)
        object.__setattr__(self, "scalings", sc)

    @classmethod
    def from_variances(cls, d: Sequence, V: Optional[Sequence] = None, t: int = 1,
                       cumulants: Optional[Sequence] = None, scalings=None) -> "ModelParams":
        """Build ``B(u) = D V(u)``; ``V`` defaults to ``t`` all-ones matrices."""
        d = tuple(to_fraction(x) for x in d)
        r = len(d)
        if V is None:
            V = [[[1] * r for _ in range(r)] for _ in range(t)]
        V = [_matrix(m, r, "V(u)") for m in V]
        B = [[[d[p] * m[p][q] for q in range(r)] for p in range(r)] for m in V]
        return cls(d, B, tuple(cumulants or ()), scalings)

    @property
    def r(self) -> int:
        return len(self.d)

    @property
    def t(self) -> int:
        return len(self.B)

    def b(self, p: int, q: int, u: int = 1) -> Fraction:
        return self.B[u - 1][p - 1][q - 1]

    def cumulant(self, k: int, u: int = 1) -> Fraction:
        if not self.cumulants:
            return Fraction(1) if k == 2 else Fraction(0)
        seq = self.cumulants[u - 1]
        return seq[k - 1] if 1 <= k <= len(seq) else Fraction(0)

    def max_cumulant_order(self, u: int = 1) -> int:
        if not self.cumulants:
            return 2
        seq = self.cumulants[u - 1]
        k = len(seq)
        while k > 0 and seq[k - 1] == 0:
            k -= 1
        return k

    def c(self, p: int, q: int, u: int = 1) -> Fraction:
        if self.scalings is None:
            return Fraction(1)
        return self.scalings[u - 1][p - 1][q - 1]

    def collective(self) -> tuple:
        """Matrix ``b_{p,q} = sum_u b_{p,q}(u)``."""
        r = self.r
        return tuple(tuple(sum(m[p][q] for m in self.B) for q in range(r)) for p in range(r))

    def doubled(self) -> "ModelParams":
        """Parameters with labels ``2u-1`` and ``2u`` both carrying ``B(u)``.

        This is the covariance convention for circular-type variables.
        """
        B = [m for m in self.B for _ in (0, 1)]
        cum = [s for s in self.cumulants for _ in (0, 1)]
        sc = None if self.scalings is None else [m for m in self.scalings for _ in (0, 1)]
        return ModelParams(self.d, B, cum, sc)

    def check_indices(self, p: int, q: int, u: int = 1):
        if not (1 <= p <= self.r and 1 <= q <= self.r):
            raise InvalidArgument(f"block index ({p},{q}) out of range 1..{self.r}")
        if not 1 <= u <= self.t:
            raise InvalidArgument(f"label {u} out of range 1..{self.t}")

    def to_dict(self) -> dict:
        f = format_fraction
        out = {
            "d": [f(x) for x in self.d],
            "B": [[[f(x) for x in row] for row in m] for m in self.B],
        }
        if self.cumulants:
            out["cumulants"] = [[f(x) for x in s] for s in self.cumulants]
        if self.scalings is not None:
            out["scalings"] = [[[f(x) for x in row] for row in m] for m in self.scalings]
        return out
