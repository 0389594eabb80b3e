"""Operator symbols and a compact text syntax for words.

A word is written as whitespace-separated tokens ``kind[p,q;u]`` with an
optional trailing ``*`` for the adjoint, e.g.::

    omega_hat[1,2] omega_hat[1,2;2] eta[1,2]* P[1]

The label ``;u`` defaults to 1. ``P[q]`` takes a single index.
"""

from __future__ import annotations

import re
from typing import NamedTuple

from ._errors import InvalidArgument

__all__ = ["Op", "MOMENT_KINDS", "FOCK_KINDS", "parse_word", "format_word"]

MOMENT_KINDS = ("omega", "omega_hat", "gamma", "gamma_hat", "eta")
FOCK_KINDS = MOMENT_KINDS + (
    "create", "annihilate", "create_hat", "annihilate_hat",
    "unit_s", "unit_r", "unit", "unit_hat", "P", "identity",
)
_UNLABELED = ("unit_s", "unit_r", "unit", "unit_hat", "P", "identity")


class Op(NamedTuple):
    """Operator symbol ``kind_{p,q}(u)``, adjoint when ``star``."""

    kind: str
    p: int = 1
    q: int = 1
    u: int = 1
    star: bool = False

    def __str__(self):
        if self.kind == "identity":
            return "identity"
        if self.kind == "P":
            return f"P[{self.q}]"
        lab = "" if self.kind in _UNLABELED or self.u == 1 else f";{self.u}"
        return f"{self.kind}[{self.p},{self.q}{lab}]" + ("*" if self.star else "")


_TOKEN = re.compile(r"^([A-Za-z_]+)(?:\[\s*(\d+)\s*(?:,\s*(\d+)\s*)?(?:;\s*(\d+)\s*)?\])?(\*?)$")


def _parse_token(tok: str) -> Op:
    m = _TOKEN.match(tok)
    if not m:
        raise InvalidArgument(f"malformed operator token {tok!r}")
    kind, a, b, u, star = m.groups()
    if kind not in FOCK_KINDS:
        raise InvalidArgument(f"unknown operator kind {kind!r} in {tok!r}")
    if kind == "identity":
        return Op("identity")
    if a is None:
        raise InvalidArgument(f"missing indices in {tok!r}")
    if kind == "P":
        if b is not None:
            raise InvalidArgument(f"P takes one index: {tok!r}")
        return Op("P", int(a), int(a))
    if b is None:
        raise InvalidArgument(f"{kind} needs two indices: {tok!r}")
    return Op(kind, int(a), int(b), int(u) if u else 1, bool(star))


def parse_word(text) -> tuple:
    """Parse a word from text or pass through a sequence of ``Op``/tuples."""
    if isinstance(text, str):
        return tuple(_parse_token(t) for t in text.split())
    out = []
    for x in text:
        if isinstance(x, Op):
            out.append(x)
        elif isinstance(x, str):
            out.extend(parse_word(x))
        else:
            out.append(Op(*x))
    return tuple(out)


def format_word(word) -> str:
    return " ".join(str(op) for op in word)
