"""
Command-line front end.

Subcommands::

    blockfree moments  --config c.json [--check-oracle]
    blockfree fock     [query|independence] --config c.json [--check-oracle]
    blockfree simulate --config c.json [--seed N]
    blockfree compare  --config c.json [--seed N]
    blockfree tables   --config c.json

Exit codes: 0 success, 1 a compare threshold or oracle check failed,
2 configuration error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

import jsonschema

from . import analytic, fock, moments, rmt
from ._errors import (InvalidArgument, InvalidConfiguration, ResourceLimitError,
                      TruncationOverflow, UndefinedSTransform, UndefinedTrace)
from .params import ModelParams, format_fraction, to_fraction
from .words import format_word, parse_word

__all__ = ["main", "build_parser", "load_config", "CONFIG_SCHEMA", "ConfigError"]

FORMAT_VERSION = rmt.FORMAT_VERSION
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2, 3
DEFAULT_MAX_WORD_LEN = 16


class ConfigError(ValueError):
    """Schema or semantic error in a config file."""


_RATIONAL = {"anyOf": [
    {"type": "integer"},
    {"type": "number"},
    {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$|^\s*-?\d*\.\d+\s*$"},
]}
_VECTOR = {"type": "array", "items": _RATIONAL}
_MATRIX = {"type": "array", "items": _VECTOR}
_MATRICES = {"type": "array", "items": _MATRIX, "minItems": 1}
_STATE = {"oneOf": [{"type": "integer", "minimum": 1}, {"enum": ["Psi", "all"]}]}
_POS = {"type": "integer", "minimum": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "model": {
            "type": "object",
            "additionalProperties": False,
            "required": ["d"],
            "properties": {
                "d": {**_VECTOR, "minItems": 1},
                "V": _MATRICES,
                "B": _MATRICES,
                "t": _POS,
                "cumulants": {"type": "array", "items": _VECTOR},
                "scalings": _MATRICES,
            },
        },
        "queries": {
            "type": "array",
            "items": {"oneOf": [
                {"type": "object", "additionalProperties": False, "required": ["word", "q"],
                 "properties": {"word": {"type": "string"}, "q": _STATE}},
                {"type": "object", "additionalProperties": False, "required": ["polynomial"],
                 "properties": {"polynomial": {
                     "type": "object", "additionalProperties": False, "required": ["p", "k"],
                     "properties": {"p": _POS, "k": {"type": "integer", "minimum": 0},
                                    "d": _VECTOR}}}},
            ]},
        },
        "ensemble": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "V", "d"],
            "properties": {
                "kind": {"enum": list(rmt.KINDS)},
                "V": _MATRICES,
                "d": {**_VECTOR, "minItems": 1},
                "seed": {"type": "integer", "minimum": 0},
                "samples": _POS,
                "n_grid": {"type": "array", "items": _POS, "minItems": 1},
                "growth": {"anyOf": [{"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                                     {"type": "null"}]},
                "trace": {"enum": ["exact", "probe"]},
                "probes": _POS,
            },
        },
        "simulate": {
            "type": "object",
            "additionalProperties": False,
            "required": ["words"],
            "properties": {
                "words": {"type": "array", "items": {"type": "string"}},
                "q": {"type": "array", "items": _STATE},
                "c": {"type": "number", "minimum": 0},
                "rate": {"enum": ["1/n", "1/sqrt(n)"]},
                "sigmas": {"type": "number", "minimum": 0},
            },
        },
        "histogram": {
            "type": "object",
            "additionalProperties": False,
            "required": ["word", "n"],
            "properties": {
                "word": {"type": "string"},
                "q": _STATE,
                "n": _POS,
                "bins": _POS,
                "samples": _POS,
                "range": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                "density": {
                    "type": "object", "additionalProperties": False, "required": ["name"],
                    "properties": {"name": {"enum": ["semicircle", "bernoulli", "theta",
                                                     "marchenko_pastur", "mp_dilated"]},
                                   "args": _VECTOR}},
                "max_l1": {"type": "number", "minimum": 0},
            },
        },
        "tables": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "narayana": {"type": "integer", "minimum": 1},
                "fuss_catalan": {"type": "object", "required": ["p", "k"],
                                 "properties": {"p": _POS, "k": {"type": "integer", "minimum": 0}}},
                "free_bessel": {"type": "object", "required": ["p", "t", "k"],
                                "properties": {"p": _POS, "t": _RATIONAL,
                                               "k": {"type": "integer", "minimum": 0}}},
                "product": {"type": "object", "required": ["p", "k"],
                            "properties": {"p": _POS, "k": {"type": "integer", "minimum": 0}}},
            },
        },
        "independence": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kinds": {"type": "array", "items": {"enum": ["boolean", "monotone"]}},
                "degree": _POS,
            },
        },
    },
}


def _path(err) -> str:
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)


def load_config(source) -> dict:
    """Read and schema-check a config from a path, JSON text or dict."""
    if isinstance(source, dict):
        cfg = source
    else:
        text = Path(source).read_text() if not str(source).lstrip().startswith("{") else str(source)
        try:
            cfg = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    v = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(v.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ConfigError(f"{_path(e)}: {e.message}")
    return cfg


def _model(cfg: dict) -> ModelParams:
    m = cfg.get("model")
    if m is None:
        raise ConfigError("$.model: required for this command")
    try:
        if "B" in m:
            if "V" in m:
                raise ConfigError("$.model: give either V or B, not both")
            return ModelParams(m["d"], m["B"], m.get("cumulants", ()), m.get("scalings"))
        return ModelParams.from_variances(m["d"], m.get("V"), m.get("t", 1),
                                          m.get("cumulants"), m.get("scalings"))
    except InvalidArgument as e:
        raise ConfigError(f"$.model: {e}") from None


def _ensemble(cfg: dict, seed: Optional[int]) -> rmt.EnsembleSpec:
    e = cfg.get("ensemble")
    if e is None:
        raise ConfigError("$.ensemble: required for this command")
    e = dict(e)
    if seed is not None:
        e["seed"] = seed
    try:
        return rmt.EnsembleSpec(**e)
    except InvalidArgument as err:
        raise ConfigError(f"$.ensemble: {err}") from None


def _state(q):
    return moments.PSI if q in ("Psi", "all") else q


# output -------------------------------------------------------------------------

def _render(rows: list, columns: list, meta: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"meta": meta, "rows": rows}, indent=2) + "\n"
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}: {json.dumps(v, sort_keys=True)}\n")
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def _emit(text: str, out: Optional[str], suffix: str = ""):
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if suffix:
        path = path.with_name(path.stem + suffix + path.suffix)
    path.write_text(text)


def _meta(command: str, cfg: dict, **extra) -> dict:
    meta = {"format": FORMAT_VERSION, "command": command, "config": cfg}
    meta.update(extra)
    return meta


# commands -----------------------------------------------------------------------

def _decimal(x: Fraction) -> str:
    return f"{float(x):.12g}"


def _check_len(word, limit: int):
    if len(word) > limit:
        raise ResourceLimitError(f"word of length {len(word)} exceeds --max-word-len {limit}")


def _query_rows(cfg: dict, args, engine: str) -> tuple:
    queries = cfg.get("queries", [])
    needs_model = any("word" in q for q in queries)
    params = _model(cfg) if needs_model else None
    rows, ok = [], True
    for i, qd in enumerate(queries):
        if "polynomial" in qd:
            pd = qd["polynomial"]
            terms = moments.product_polynomial_terms(pd["p"], pd["k"])
            row = {"query": f"P_{pd['k']} (p={pd['p']})", "q": "",
                   "value": moments.format_polynomial(terms), "decimal": ""}
            if "d" in pd:
                val = moments.product_polynomial(pd["p"], pd["k"], pd["d"])
                row["value"], row["decimal"] = format_fraction(val), _decimal(val)
            rows.append(row)
            continue
        try:
            word = parse_word(qd["word"])
        except InvalidArgument as e:
            raise ConfigError(f"$.queries[{i}].word: {e}") from None
        _check_len(word, args.max_word_len)
        q = _state(qd["q"])
        if engine == "moments":
            val = moments.moment(word, q, params)
        else:
            val = fock.expectation(word, q, params)
        row = {"query": format_word(word), "q": qd["q"], "value": format_fraction(val),
               "decimal": _decimal(val)}
        if args.check_oracle:
            other = (fock.expectation(word, q, params) if engine == "moments"
                     else moments.moment(word, q, params))
            row["oracle"] = format_fraction(other)
            row["agree"] = other == val
            ok &= other == val
        rows.append(row)
    return rows, ok


def cmd_moments(cfg: dict, args, engine: str = "moments") -> int:
    rows, ok = _query_rows(cfg, args, engine)
    cols = ["query", "q", "value", "decimal"] + (["oracle", "agree"] if args.check_oracle else [])
    _emit(_render(rows, cols, _meta(engine, cfg), args.format), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def _default_independence_model() -> ModelParams:
    # two labels with distinct cumulant sequences and r_1 = 0
    B = [[[1, 1], [1, 1]], [[1, 1], [1, 1]]]
    return ModelParams([1, 0], B, [[0, 1, 1], [0, 2, 0, 1]])


def cmd_independence(cfg: dict, args) -> int:
    params = _model(cfg) if "model" in cfg else _default_independence_model()
    opts = cfg.get("independence", {})
    rows, ok = [], True
    for kind in opts.get("kinds", ["boolean", "monotone"]):
        rep = fock.independence_check(kind, params, opts.get("degree", 6))
        rows.append({"kind": rep.kind, "passed": rep.passed, "checked": rep.checked,
                     "counterexample": rep.counterexample or ""})
        ok &= rep.passed
    meta = _meta("fock independence", cfg, model=params.to_dict())
    _emit(_render(rows, ["kind", "passed", "checked", "counterexample"], meta, args.format), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_fock(cfg: dict, args) -> int:
    if args.action == "independence":
        return cmd_independence(cfg, args)
    return cmd_moments(cfg, args, engine="fock")


def _histogram(cfg: dict, spec: rmt.EnsembleSpec, args):
    h = cfg["histogram"]
    word = rmt.parse_block_word(h["word"])
    _check_len(word, args.max_word_len)
    dens = None
    if "density" in h:
        dens = analytic.density(h["density"]["name"], *h["density"].get("args", []))
    q = h.get("q", "all")
    return rmt.eigenvalue_histogram(word, None if q in ("all", "Psi") else q, spec, h["n"],
                                    bins=h.get("bins", 50), range_=tuple(h["range"]) if "range" in h else None,
                                    density=dens, samples=h.get("samples"))


def cmd_simulate(cfg: dict, args, compare: bool = False) -> int:
    spec = _ensemble(cfg, args.seed)
    if "simulate" not in cfg and "histogram" not in cfg:
        raise ConfigError("$: a simulate or histogram section is required")
    ok = True
    wrote = False
    if "simulate" in cfg:
        s = cfg["simulate"]
        words = [rmt.parse_block_word(w) for w in s["words"]]
        for w in words:
            _check_len(w, args.max_word_len)
        qs = [None if q in ("all", "Psi") else q for q in s.get("q", [1])]
        rep = rmt.convergence_report(words, qs, spec, c=s.get("c", 8.0), rate=s.get("rate", "1/n"),
                                     sigmas=s.get("sigmas", 3.0))
        rep.meta = _meta("compare" if compare else "simulate", cfg, rng=rmt.RNG_ID,
                         ensemble=spec.to_dict(), tolerance=rep.meta["tolerance"])
        text = rep.to_json() + "\n" if args.format == "json" else rep.to_csv()
        _emit(text, args.out)
        wrote = True
        ok &= rep.passed
    if "histogram" in cfg:
        hist = _histogram(cfg, spec, args)
        hist.meta.update(_meta("compare" if compare else "simulate", cfg, l1=hist.l1))
        text = hist.to_json() + "\n" if args.format == "json" else hist.to_csv()
        _emit(text, args.out, "_histogram" if wrote else "")
        limit = cfg["histogram"].get("max_l1", 0.05)
        if hist.l1 is not None:
            ok &= hist.l1 < limit
    return EXIT_FAIL if compare and not ok else EXIT_OK


def cmd_tables(cfg: dict, args) -> int:
    t = cfg.get("tables", {"narayana": 6, "fuss_catalan": {"p": 3, "k": 5},
                           "free_bessel": {"p": 2, "t": "1/2", "k": 5}})
    rows = []
    if "narayana" in t:
        for k in range(1, t["narayana"] + 1):
            for j in range(1, k + 1):
                rows.append({"table": "narayana", "row": k, "col": j, "value": analytic.narayana(k, j)})
    if "fuss_catalan" in t:
        for p in range(1, t["fuss_catalan"]["p"] + 1):
            for k in range(t["fuss_catalan"]["k"] + 1):
                rows.append({"table": "fuss_catalan", "row": p, "col": k,
                             "value": analytic.fuss_catalan(p, k)})
    if "free_bessel" in t:
        fb = t["free_bessel"]
        m = analytic.free_bessel_moments(fb["p"], fb["t"], fb["k"])
        for k, x in enumerate(m):
            rows.append({"table": f"free_bessel(p={fb['p']},t={format_fraction(to_fraction(fb['t']))})",
                         "row": k, "col": "", "value": format_fraction(x)})
    if "product" in t:
        pp = t["product"]
        for k in range(pp["k"] + 1):
            rows.append({"table": f"P_k(p={pp['p']})", "row": k, "col": "",
                         "value": moments.format_polynomial(moments.product_polynomial_terms(pp["p"], k))})
    _emit(_render(rows, ["table", "row", "col", "value"], _meta("tables", cfg), args.format), args.out)
    return EXIT_OK


# entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument("--seed", type=int, default=None, help="override the ensemble seed")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--check-oracle", action="store_true",
                        help="evaluate queries with both exact engines and diff them")
    common.add_argument("--max-word-len", type=int, default=DEFAULT_MAX_WORD_LEN, metavar="N")

    parser = argparse.ArgumentParser(prog="blockfree", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("moments", parents=[common], help="exact limit moments")
    f = sub.add_parser("fock", parents=[common], help="Fock-space vacuum expectations")
    f.add_argument("action", nargs="?", choices=["query", "independence"], default="query")
    sub.add_parser("simulate", parents=[common], help="Monte Carlo moments and histograms")
    sub.add_parser("compare", parents=[common], help="simulate and fail outside tolerance")
    sub.add_parser("tables", parents=[common], help="Narayana, Fuss-Catalan, free Bessel, P_k")
    return parser


_COMMANDS = {
    "moments": cmd_moments,
    "fock": cmd_fock,
    "simulate": cmd_simulate,
    "compare": lambda cfg, args: cmd_simulate(cfg, args, compare=True),
    "tables": cmd_tables,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is None:
            if args.command not in ("tables", "fock"):
                raise ConfigError("--config is required")
            cfg = {}
        else:
            cfg = load_config(args.config)
        return _COMMANDS[args.command](cfg, args)
    except (ConfigError, InvalidArgument, InvalidConfiguration, UndefinedTrace,
            UndefinedSTransform, OSError) as e:
        print(f"blockfree: error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResourceLimitError, TruncationOverflow) as e:
        print(f"blockfree: resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
