"""JSON encodings of points, sets, measures, trees and cyclotomic values.

Inputs are checked against the bundled JSON schemas and then against the
semantic constraints (prime p, residues in range, masses summing to 1).
Every failure is raised as ``InputError`` naming the offending location.
"""
from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Any, Optional

import jsonschema

from .cyclotomic import CycInt, CycRat
from .measures import BallMeasure, DiscreteSetQp
from .padic import PAdicScaled, is_prime
from .trees import HomoTree

SCHEMAS = ("measure", "set", "tree", "residues")


class InputError(ValueError):
    def __init__(self, location: str, message: str):
        self.location = location or "<root>"
        super().__init__(f"{self.location}: {message}")


@lru_cache(maxsize=None)
def schema(name: str) -> dict:
    if name not in SCHEMAS:
        raise KeyError(name)
    return json.loads(resources.files(__package__).joinpath("schemas", f"{name}.json").read_text())


def _where(path) -> str:
    return "/".join(str(x) for x in path)


def validate(data: Any, name: str, source: str = "") -> None:
    validator = jsonschema.Draft202012Validator(schema(name))
    errors = sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        e = errors[0]
        loc = _where(e.absolute_path)
        raise InputError(f"{source}:{loc}" if source else loc, e.message)


def _check_p(data: dict, source: str) -> int:
    p = data["p"]
    if not is_prime(p):
        raise InputError(f"{source}:p" if source else "p", f"{p} is not prime")
    return p


def _loc(source: str, *parts) -> str:
    inner = _where(parts)
    return f"{source}:{inner}" if source else inner


# -- points ---------------------------------------------------------------

def scaled_to_json(x: PAdicScaled):
    return x.a if x.m == 0 else x.to_string()


def scaled_from_json(p: int, value, location: str = "") -> PAdicScaled:
    try:
        if isinstance(value, bool):
            raise ValueError("booleans are not numbers")
        if isinstance(value, int):
            return PAdicScaled(p, value)
        return PAdicScaled.parse(p, value)
    except ValueError as exc:
        raise InputError(location, str(exc)) from None


def fraction_to_json(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def number_to_json(v):
    """Fractions as "num/den" strings, everything else unchanged."""
    if isinstance(v, Fraction):
        return fraction_to_json(v)
    return v


# -- sets -----------------------------------------------------------------

def set_to_json(E: DiscreteSetQp) -> dict:
    return {"p": E.p, "elements": [scaled_to_json(x) for x in E]}


def set_from_json(data: Any, source: str = "") -> DiscreteSetQp:
    validate(data, "set", source)
    p = _check_p(data, source)
    pts = [scaled_from_json(p, v, _loc(source, "elements", i)) for i, v in enumerate(data["elements"])]
    seen = {}
    for i, x in enumerate(pts):
        if x in seen:
            raise InputError(_loc(source, "elements", i), f"repeats element {seen[x]}")
        seen[x] = i
    return DiscreteSetQp(p, tuple(pts))


def residues_from_json(data: Any, source: str = "") -> tuple:
    validate(data, "residues", source)
    p = _check_p(data, source)
    N = p ** data["gamma"]
    for i, c in enumerate(data["residues"]):
        if c >= N:
            raise InputError(_loc(source, "residues", i), f"{c} is not below p^gamma = {N}")
    return p, data["gamma"], list(data["residues"])


# -- measures -------------------------------------------------------------

def measure_to_json(mu: BallMeasure) -> dict:
    out = {
        "p": mu.p,
        "gamma": mu.gamma,
        "scale": mu.scale,
        "masses": {str(c): fraction_to_json(w) for c, w in mu.masses},
    }
    if not mu.normalized:
        out["normalized"] = False
    return out


def measure_from_json(data: Any, source: str = "") -> BallMeasure:
    validate(data, "measure", source)
    p = _check_p(data, source)
    gamma = data["gamma"]
    N = p ** gamma
    masses = {}
    for key, raw in data["masses"].items():
        c = int(key)
        if c >= N:
            raise InputError(_loc(source, "masses", key), f"residue {c} is not below p^gamma = {N}")
        try:
            w = Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(_loc(source, "masses", key), str(exc)) from None
        masses[c] = w
    normalized = data.get("normalized", True)
    total = sum(masses.values(), Fraction(0))
    if normalized and total != 1:
        raise InputError(_loc(source, "masses"), f"masses sum to {total}, expected 1")
    return BallMeasure(p, gamma, data.get("scale", 0), masses, normalized)


# -- trees ----------------------------------------------------------------

def prefix_key(prefix: tuple) -> str:
    return ".".join(str(d) for d in prefix)


def tree_to_json(t: HomoTree) -> dict:
    return {
        "p": t.p,
        "gamma": t.gamma,
        "I": sorted(t.I),
        "J": sorted(t.J),
        "choice": {prefix_key(pre): d for pre, d in t.choice},
        "leaves": t.leaves(),
    }


def tree_from_json(data: Any, source: str = "") -> HomoTree:
    data = {k: v for k, v in data.items() if k not in ("J", "leaves")} if isinstance(data, dict) else data
    validate(data, "tree", source)
    p = _check_p(data, source)
    gamma = data["gamma"]
    for i, lv in enumerate(data["I"]):
        if lv >= gamma:
            raise InputError(_loc(source, "I", i), f"level {lv} is not below gamma = {gamma}")
    choice = {}
    for key, d in data.get("choice", {}).items():
        pre = tuple(int(x) for x in key.split(".")) if key else ()
        if any(x >= p for x in pre) or d >= p:
            raise InputError(_loc(source, "choice", key), f"digits must be below p = {p}")
        choice[pre] = d
    try:
        return HomoTree.build(p, gamma, data["I"], (lambda level, pre: choice.get(pre, 0)))
    except ValueError as exc:
        raise InputError(_loc(source), str(exc)) from None


# -- cyclotomic values ------------------------------------------------------

def cycrat_to_json(z: CycRat) -> dict:
    """Power-basis coefficients at the lowest level, over a positive denominator."""
    r = z.num.reduced()
    z = CycRat(r, z.den)
    return {"level": z.num.n, "num": list(z.num.coeffs), "den": z.den, "complex": _complex_json(z.to_complex())}


def cycrat_from_json(p: int, data: dict) -> CycRat:
    return CycRat(CycInt(p, data["level"], data["num"]), data.get("den", 1))


def _complex_json(c: complex) -> list:
    return [round(c.real, 12) + 0.0, round(c.imag, 12) + 0.0]


# -- files ----------------------------------------------------------------

MAX_INLINE = 4096


def load_json(text_or_path: str, what: str) -> tuple:
    """(data, source label) from a path or, when it starts with '{', inline JSON."""
    s = text_or_path.strip()
    if s.startswith("{"):
        if len(s) > MAX_INLINE:
            raise InputError(f"<inline {what}>", f"inline input longer than {MAX_INLINE} characters; use a file")
        source = f"<inline {what}>"
        text = s
    else:
        source = text_or_path
        try:
            with open(text_or_path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(source, exc.strerror or str(exc)) from None
    try:
        return json.loads(text), source
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:line {exc.lineno} column {exc.colno}", exc.msg) from None


def dumps(data: Any, indent: Optional[int] = 2) -> str:
    return json.dumps(data, sort_keys=True, indent=indent, default=_default)


def _default(o):
    if isinstance(o, Fraction):
        return fraction_to_json(o)
    if isinstance(o, PAdicScaled):
        return scaled_to_json(o)
    if isinstance(o, CycRat):
        return cycrat_to_json(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if hasattr(o, "item"):
        return o.item()
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")
